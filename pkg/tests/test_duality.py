"""The transform pair, norms, the Stirling envelope, the volume-product
scan against a root-finding oracle, and the operator bounds."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

import fockdual as fd
from fockdual.moments import MultiIndex, iter_indices


@pytest.fixture(scope="module")
def table1(fock1):
    return fd.moment_table(fock1, 10)


@pytest.fixture(scope="module")
def table1_star(fock1):
    return fd.moment_table(fd.dual_weight(fock1), 10)


def seq(n, degree, entries):
    return fd.CoefficientSequence(
        n=n,
        coeffs={MultiIndex(a): complex(c) for a, c in entries.items()},
        truncation_degree=degree,
    )


def test_sequence_validation():
    with pytest.raises(ValueError):
        seq(1, 2, {(3,): 1.0})
    with pytest.raises(ValueError):
        seq(2, 3, {(1,): 1.0})


def test_sequence_json_roundtrip(tmp_path):
    b = seq(2, 3, {(0, 0): 1 + 2j, (1, 2): -0.5j})
    path = tmp_path / "seq.json"
    b.to_json(path)
    back = fd.CoefficientSequence.from_json(path)
    assert back.n == 2 and back.truncation_degree == 3
    assert back.get(MultiIndex((0, 0))) == 1 + 2j
    assert back.get(MultiIndex((1, 2))) == -0.5j
    assert back.get(MultiIndex((3, 0))) == 0j


def test_norm_sq_examples(table1):
    assert fd.norm_sq(seq(1, 10, {(0,): 1.0}), table1) == pytest.approx(math.pi, rel=1e-12)
    assert fd.norm_sq(seq(1, 10, {(0,): 1.0, (1,): 1.0}), table1) == pytest.approx(
        2 * math.pi, rel=1e-9
    )
    single = seq(1, 10, {(4,): 2.0})
    assert fd.norm_sq(single, table1) == pytest.approx(
        4 * table1.entry(MultiIndex((4,))).value, rel=1e-12
    )
    with pytest.raises(KeyError):
        fd.norm_sq(seq(1, 12, {(12,): 1.0}), table1)


def test_parseval_cross_check_one_plus_z(fock1, table1):
    # direct 2-real-dimensional quadrature of int |1+z|^2 e^{-|z|^2}
    L, count = 8.0, 1601
    x = np.linspace(-L, L, count)
    wts = np.ones(count)
    wts[1:-1:2], wts[2:-1:2] = 4.0, 2.0
    h = x[1] - x[0]
    X, Y = np.meshgrid(x, x, indexing="ij")
    integrand = ((1 + X) ** 2 + Y**2) * np.exp(-(X**2) - Y**2)
    direct = float(wts @ integrand @ wts) * (h / 3) ** 2
    norm = fd.norm_sq(seq(1, 10, {(0,): 1.0, (1,): 1.0}), table1)
    assert norm == pytest.approx(direct, rel=1e-5)
    assert direct == pytest.approx(2 * math.pi, rel=1e-9)


def test_forward_and_inverse_examples(table1):
    d = fd.forward_map(seq(1, 10, {(0,): 1.0}), table1)
    assert d.get(MultiIndex((0,))) == pytest.approx(math.pi, rel=1e-12)
    d1 = fd.forward_map(seq(1, 10, {(1,): 1.0}), table1)
    assert d1.get(MultiIndex((1,))) == pytest.approx(math.pi, rel=1e-9)
    zero = fd.forward_map(seq(1, 10, {}), table1)
    assert zero.items() == []
    g = fd.inverse_map(seq(1, 10, {(0,): math.pi}), table1)
    assert g.get(MultiIndex((0,))) == pytest.approx(1.0, rel=1e-12)
    gi = fd.inverse_map(seq(1, 10, {(1,): math.pi * 1j}), table1)
    assert gi.get(MultiIndex((1,))) == pytest.approx(-1j, rel=1e-9)


@given(
    re=st.floats(-5, 5), im=st.floats(-5, 5),
    scale_re=st.floats(-2, 2), scale_im=st.floats(-2, 2),
)
@settings(max_examples=100, deadline=None)
def test_forward_antilinearity(re, im, scale_re, scale_im, table1):
    lam = complex(scale_re, scale_im)
    b = seq(1, 10, {(2,): complex(re, im)})
    lhs = fd.forward_map(
        seq(1, 10, {(2,): lam * complex(re, im)}), table1
    ).get(MultiIndex((2,)))
    rhs = lam.conjugate() * fd.forward_map(b, table1).get(MultiIndex((2,)))
    assert cmath.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-300)


@given(seed=st.integers(0, 2**31 - 1))
@settings(max_examples=50, deadline=None)
def test_roundtrip_within_4_ulp(seed, table1):
    rng = np.random.default_rng(seed)
    b = fd.random_sequence(1, 10, rng)
    assert fd.roundtrip_ulp_error(b, table1) <= 4.0


def test_norm_scaling(table1):
    b = seq(1, 10, {(0,): 1 + 1j, (3,): 2.0})
    lam = 0.7 - 1.9j
    scaled = seq(1, 10, {(0,): lam * (1 + 1j), (3,): lam * 2.0})
    assert fd.norm_sq(scaled, table1) == pytest.approx(
        abs(lam) ** 2 * fd.norm_sq(b, table1), rel=1e-12
    )


def test_stirling_envelope_values(fock1, fock2):
    r0 = fd.stirling_identity_check(fock1, MultiIndex((0,)))
    assert r0.ok
    # closed forms: conjugate sum is 2(ln 1 - 1) = -2, so r = 2 pi e^{-2}
    assert math.exp(r0.ln_ratio) == pytest.approx(2 * math.pi * math.exp(-2), abs=1e-5)
    assert math.exp(r0.ln_ratio) == pytest.approx(0.85033, abs=3e-3)
    assert math.exp(r0.ln_lower) == pytest.approx(math.exp(-1 / 6), rel=1e-12)
    r11 = fd.stirling_identity_check(fock2, MultiIndex((1, 1)))
    assert r11.ok
    assert r11.ln_lower == pytest.approx(-1 / 6, rel=1e-12)


def test_stirling_envelope_all_degrees(fock1, power4):
    for w in (fock1, power4):
        for a in range(0, 11):
            rep = fd.stirling_identity_check(w, MultiIndex((a,)))
            assert rep.ok, (w.label, a)


def oracle_volume_1d(a: int) -> float:
    """Half the measure of {s : e^s - 1 - s <= 1/a} (substituted gap set)."""
    f = lambda s: math.exp(s) - 1.0 - s - 1.0 / a
    s_plus = brentq(f, 1e-12, 60.0, xtol=1e-14)
    s_minus = brentq(f, -60.0, -1e-12, xtol=1e-14)
    return 0.5 * (s_plus - s_minus)


def test_k_scan_against_root_finding_oracle(fock1):
    alphas = [MultiIndex((a,)) for a in (1, 2, 10, 100)]
    rep = fd.k_condition_scan(fock1, alphas)
    for alpha in alphas:
        a = alpha.components[0]
        v = oracle_volume_1d(a)
        assert rep.products[alpha] == pytest.approx(a * v * v, rel=5e-3)
    assert rep.products[MultiIndex((1,))] == pytest.approx(2.23, abs=0.03)
    assert rep.products[MultiIndex((100,))] == pytest.approx(2.00, abs=0.02)


def test_k_scan_full_range(fock1):
    alphas = [MultiIndex((a,)) for a in range(1, 101)]
    rep = fd.k_condition_scan(fock1, alphas)
    products = np.array([rep.products[a] for a in alphas])
    assert products.min() >= 1.95
    assert products.max() <= 2.30
    assert rep.K_hat == pytest.approx(2.24, abs=0.05)
    assert rep.K_hat >= 1.0


def test_k_scan_rejects_zero_component(fock2):
    with pytest.raises(ValueError):
        fd.k_condition_scan(fock2, [MultiIndex((1, 0))])


def test_isomorphism_bounds(fock1, table1, table1_star):
    K = 2.24
    b0 = seq(1, 10, {(0,): 1.0})
    r1, r2 = fd.isomorphism_bound_check(b0, table1, table1_star, K)
    assert r1.ok and r2.ok
    # for the quadratic weight the tables coincide and the forward norm is
    # pi^2 times the input norm
    assert r1.lhs == pytest.approx(math.pi**2 * math.pi, rel=1e-9)
    assert r1.rhs == pytest.approx(2 * math.pi * 4 * K * math.pi, rel=1e-12)
    assert r1.constant_used == pytest.approx(2 * math.pi * 4 * K)
    assert r2.constant_used == pytest.approx(K * math.e**2 * 2 * math.e * math.pi)
    zero = seq(1, 10, {})
    z1, z2 = fd.isomorphism_bound_check(zero, table1, table1_star, K)
    assert z1.ok and z1.lhs == 0.0 and z1.rhs == 0.0
    assert z2.ok


def test_bounds_hold_on_random_sequences(fock1, table1, table1_star):
    rng = np.random.default_rng(0)
    K = 2.24
    lower = 1.0 / (K * math.e**2 * (2 * math.e * math.pi))
    for _ in range(100):
        b = fd.random_sequence(1, 10, rng)
        r1, r2 = fd.isomorphism_bound_check(b, table1, table1_star, K)
        assert r1.ok and r2.ok
        ratio = r1.lhs / fd.norm_sq(b, table1)
        assert ratio >= lower * (1 - 1e-9)


def test_norm_identity_two_evaluation_orders(fock1, table1, table1_star):
    rng = np.random.default_rng(5)
    b = fd.random_sequence(1, 10, rng)
    d = fd.forward_map(b, table1)
    via_norm = fd.norm_sq(d, table1_star)
    terms = [
        math.exp(2 * (table1.ln(a) + math.log(abs(v)) - a.log_factorial())
                 + table1_star.ln(a))
        for a, v in b.items()
    ]
    direct = math.fsum(sorted(terms, reverse=True))
    assert via_norm == pytest.approx(direct, rel=1e-12)


def test_transform_space_matches_for_fock(table1, table1_star):
    # self-conjugate weight: the two moment tables coincide numerically
    for alpha in iter_indices(1, 10):
        assert table1_star.ln(alpha) == pytest.approx(table1.ln(alpha), abs=1e-9)


def test_orthogonality(fock1, power4, table1):
    cases = [((0,), (1,)), ((1,), (3,)), ((0,), (2,))]
    for a, b in cases:
        v = fd.monomial_orthogonality_check(fock1, MultiIndex(a), MultiIndex(b))
        ca = table1.entry(MultiIndex(a)).value
        cb = table1.entry(MultiIndex(b)).value
        assert v <= 1e-10 * math.sqrt(ca * cb)
    v = fd.monomial_orthogonality_check(power4, MultiIndex((0,)), MultiIndex((2,)))
    assert v <= 1e-8
    with pytest.raises(ValueError):
        fd.monomial_orthogonality_check(fock1, MultiIndex((1,)), MultiIndex((1,)))
