"""Coefficient-level duality: norms, the diagonal transform pair, the
Stirling envelope, the volume-product condition and the operator bounds.

A continuous functional with Riesz representer sum b_alpha z^alpha has
transform coefficients d_alpha = c_alpha(phi) conj(b_alpha) / alpha!; the
inverse recovers g_alpha = conj(d_alpha) alpha! / c_alpha(phi). Bounding
these maps between the weighted sequence norms is exactly what the
volume-product condition certifies. All large factors (moments,
factorials squared) are combined in log space.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .config import DEFAULT, NumericsConfig
from .fenchel import dual_weight, log_image, scale_fn, truncated_sup
from .laplace import SublevelSpec, default_volume_method, laplace_integral, sublevel_volume
from .moments import LN_2PI, MomentTable, MultiIndex, iter_indices
from .weights import WeightFunction


@dataclass(frozen=True)
class CoefficientSequence:
    """Finite coefficient family alpha -> complex; absent entries are zero."""

    n: int
    coeffs: dict
    truncation_degree: int

    def __post_init__(self):
        for alpha in self.coeffs:
            if alpha.n != self.n:
                raise ValueError("coefficient index dimension mismatch")
            if alpha.degree > self.truncation_degree:
                raise ValueError(
                    f"index {alpha.components} exceeds truncation degree"
                )

    def items(self) -> list[tuple[MultiIndex, complex]]:
        return sorted(self.coeffs.items())

    def get(self, alpha: MultiIndex) -> complex:
        return self.coeffs.get(alpha, 0j)

    def to_json(self, path) -> None:
        payload = {
            "n": self.n,
            "degree": self.truncation_degree,
            "terms": [
                {"alpha": list(a.components), "re": c.real, "im": c.imag}
                for a, c in self.items()
            ],
        }
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def from_json(cls, path) -> "CoefficientSequence":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        coeffs = {
            MultiIndex(tuple(t["alpha"])): complex(t["re"], t["im"])
            for t in payload["terms"]
        }
        return cls(n=payload["n"], coeffs=coeffs, truncation_degree=payload["degree"])


def random_sequence(n: int, degree: int, rng: np.random.Generator) -> CoefficientSequence:
    """Dense standard-complex-normal coefficients up to the given degree."""
    coeffs = {}
    for alpha in iter_indices(n, degree):
        re, im = rng.standard_normal(2)
        coeffs[alpha] = complex(re, im) / math.sqrt(2.0)
    return CoefficientSequence(n=n, coeffs=coeffs, truncation_degree=degree)


def _pairwise_desc_sum(values: Iterable[float]) -> float:
    # numpy's reduction is pairwise; feeding it magnitude-sorted terms keeps
    # the accumulation well conditioned for wildly scaled summands
    arr = np.sort(np.asarray(list(values), dtype=np.float64))[::-1]
    if arr.size == 0:
        return 0.0
    return float(arr.sum())


def norm_sq(c: CoefficientSequence, table: MomentTable) -> float:
    """Squared weighted norm sum |a_alpha|^2 c_alpha (diagonal Gram matrix)."""
    if table.max_degree < c.truncation_degree:
        raise KeyError("moment table does not cover the truncation degree")
    terms = []
    for alpha, a in c.items():
        mag = abs(a)
        if mag == 0.0:
            continue
        terms.append(math.exp(2.0 * math.log(mag) + table.ln(alpha)))
    return _pairwise_desc_sum(terms)


def _scale(table: MomentTable, alpha: MultiIndex) -> float:
    """c_alpha / alpha! evaluated once, shared by both map directions."""
    return math.exp(table.ln(alpha) - alpha.log_factorial())


def forward_map(b: CoefficientSequence, table_phi: MomentTable) -> CoefficientSequence:
    """Transform coefficients d_alpha = c_alpha conj(b_alpha) / alpha!."""
    if table_phi.max_degree < b.truncation_degree:
        raise KeyError("moment table does not cover the truncation degree")
    coeffs = {}
    for alpha, val in b.items():
        coeffs[alpha] = val.conjugate() * _scale(table_phi, alpha)
    return CoefficientSequence(
        n=b.n, coeffs=coeffs, truncation_degree=b.truncation_degree
    )


def inverse_map(d: CoefficientSequence, table_phi: MomentTable) -> CoefficientSequence:
    """Inverse g_alpha = conj(d_alpha) alpha! / c_alpha; dividing by the same
    stored scale makes inverse_map(forward_map(b)) exact to rounding."""
    if table_phi.max_degree < d.truncation_degree:
        raise KeyError("moment table does not cover the truncation degree")
    coeffs = {}
    for alpha, val in d.items():
        coeffs[alpha] = val.conjugate() / _scale(table_phi, alpha)
    return CoefficientSequence(
        n=d.n, coeffs=coeffs, truncation_degree=d.truncation_degree
    )


@dataclass(frozen=True)
class StirlingReport:
    ln_ratio: float
    ln_lower: float
    ok: bool


def stirling_identity_check(phi: WeightFunction, alpha: MultiIndex,
                            cfg: NumericsConfig = DEFAULT) -> StirlingReport:
    """Envelope check for the normalized conjugate-sum ratio.

    r = e^{2 (s + s*)} / alpha!^2 * (2 pi)^n / prod(alpha_j + 1), with s and
    s* the log-substituted conjugates of the weight and its dual at the
    shifted index, must lie in (prod e^{-1/(6 (alpha_j + 1))}, 1].
    """
    shifted = np.asarray(alpha.shifted(), dtype=np.float64)
    s = truncated_sup(log_image(phi), shifted, cfg).value
    s_dual = truncated_sup(log_image(dual_weight(phi, cfg)), shifted, cfg).value
    ln_ratio = (
        2.0 * (s + s_dual)
        - 2.0 * alpha.log_factorial()
        + phi.n * LN_2PI
        - float(np.sum(np.log(shifted)))
    )
    ln_lower = float(np.sum(-1.0 / (6.0 * shifted)))
    ok = (ln_ratio > ln_lower) and (ln_ratio <= 1e-12)
    return StirlingReport(ln_ratio=ln_ratio, ln_lower=ln_lower, ok=ok)


@dataclass(frozen=True)
class KConditionReport:
    """Volume products V(phi-side) V(dual-side) prod(alpha_j) over a scan range.

    K_hat is the smallest constant certifying the two-sided condition on
    the scanned set (reports state the range; the full condition ranges
    over all strictly positive indices).
    """

    products: dict
    K_hat: float
    alpha_range: tuple

    def __post_init__(self):
        if any(p <= 0 for p in self.products.values()):
            raise ValueError("volume products must be positive")


def _half_slack_volume(w: WeightFunction, y: np.ndarray, cfg: NumericsConfig) -> float:
    h = log_image(w)
    sup = truncated_sup(h, y, cfg)
    spec = SublevelSpec(h=h, y=y, p=0.5, hstar_y=sup.value, argmax=sup.argmax)
    return sublevel_volume(spec, method=default_volume_method(w.n), cfg=cfg).value


def k_condition_scan(phi: WeightFunction, alphas,
                     cfg: NumericsConfig = DEFAULT,
                     phi_dual: Optional[WeightFunction] = None) -> KConditionReport:
    """Scan the volume-product condition over strictly positive indices."""
    if phi_dual is None:
        phi_dual = dual_weight(phi, cfg)
    products = {}
    k_hat = 1.0
    alphas = list(alphas)
    for alpha in sorted(alphas):
        if any(c < 1 for c in alpha.components):
            raise ValueError("scan indices must have strictly positive components")
        y = np.asarray(alpha.components, dtype=np.float64)
        v1 = _half_slack_volume(phi, y, cfg)
        v2 = _half_slack_volume(phi_dual, y, cfg)
        prod = v1 * v2 * float(np.prod(y))
        products[alpha] = prod
        k_hat = max(k_hat, prod, 1.0 / prod)
    return KConditionReport(
        products=products,
        K_hat=k_hat,
        alpha_range=tuple(sorted(a.components for a in alphas)),
    )


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    constant_used: float
    ok: bool


_BOUND_TOL = 1e-9


def isomorphism_bound_check(b: CoefficientSequence, table_phi: MomentTable,
                            table_phi_star: MomentTable,
                            K: float) -> tuple[BoundReport, BoundReport]:
    """Operator bounds for the transform pair at a certified constant K.

    Forward: ||forward(b)||^2 (dual weight) <= (2 pi)^n (1 + n!)^2 K ||b||^2.
    Inverse: for G = forward(b), ||inverse(G)||^2 <= K e^2 (2 e pi)^n ||G||^2.
    """
    n = b.n
    m1 = (2.0 * math.pi) ** n * (1.0 + math.factorial(n)) ** 2 * K
    d = forward_map(b, table_phi)
    lhs1 = norm_sq(d, table_phi_star)
    rhs1 = m1 * norm_sq(b, table_phi)
    report1 = BoundReport(
        lhs=lhs1, rhs=rhs1, constant_used=m1, ok=lhs1 <= rhs1 * (1.0 + _BOUND_TOL)
    )
    c_inv = K * math.e**2 * (2.0 * math.e * math.pi) ** n
    g = inverse_map(d, table_phi)
    lhs2 = norm_sq(g, table_phi)
    rhs2 = c_inv * norm_sq(d, table_phi_star)
    report2 = BoundReport(
        lhs=lhs2, rhs=rhs2, constant_used=c_inv, ok=lhs2 <= rhs2 * (1.0 + _BOUND_TOL)
    )
    return report1, report2


def roundtrip_ulp_error(b: CoefficientSequence, table_phi: MomentTable) -> float:
    """Max per-component ulp distance of inverse(forward(b)) from b."""
    back = inverse_map(forward_map(b, table_phi), table_phi)
    worst = 0.0
    for alpha, val in b.items():
        rec = back.get(alpha)
        for part, ref in ((rec.real, val.real), (rec.imag, val.imag)):
            ulp = math.ulp(abs(ref)) if ref != 0 else math.ulp(1.0)
            worst = max(worst, abs(part - ref) / ulp)
    return worst


def monomial_orthogonality_check(phi: WeightFunction, alpha: MultiIndex,
                                 beta: MultiIndex,
                                 cfg: NumericsConfig = DEFAULT,
                                 angular_nodes: int = 64) -> float:
    """|inner product of z^alpha and z^beta| by polar product quadrature.

    The integrand splits into per-axis angular harmonics times a radial
    factor; the uniform angular sums vanish to rounding whenever the
    harmonics differ, for any weight of the coordinate moduli.
    """
    if alpha == beta:
        raise ValueError("orthogonality check needs distinct indices")
    if alpha.n != phi.n or beta.n != phi.n:
        raise ValueError("multi-index dimension mismatch")
    k = np.asarray(alpha.components) - np.asarray(beta.components)
    if angular_nodes <= int(np.max(np.abs(k))):
        raise ValueError("angular grid too coarse for these harmonics")
    theta = 2.0 * math.pi * np.arange(angular_nodes) / angular_nodes
    angular = 1.0
    for kj in k:
        angular *= abs(np.sum(np.exp(1j * kj * theta))) * (2.0 * math.pi / angular_nodes)
    # radial factor via the log substitution: exponent <a+b+2, t> - 2 phi[e]
    y = (
        np.asarray(alpha.components, dtype=np.float64)
        + np.asarray(beta.components, dtype=np.float64)
        + 2.0
    )
    h = scale_fn(log_image(phi), 2.0)
    radial = laplace_integral(h, y, cfg)
    return float(angular * math.exp(radial.ln_value))
