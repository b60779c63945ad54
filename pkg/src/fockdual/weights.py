"""Weight functions: a validated catalog plus JSON-specified sums of powers.

A weight is a convex function of the coordinate moduli, nondecreasing on
[0, inf)^n and superlinear at infinity. Class membership is certified by
sampling (midpoint convexity, axis monotonicity, two-radius growth), not by
proof; user-supplied weights are restricted to positive combinations of
power terms so they are convex by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np


class WeightSpecError(ValueError):
    """Malformed weight description (bad JSON, bad preset, bad parameters)."""


@dataclass(frozen=True)
class PowerTerm:
    """One additive term: coef * sum_j x_j**p / p or coef * ||x||**p / p."""

    kind: str  # "power" | "radial_power"
    p: float
    coef: float

    def __post_init__(self):
        if self.kind not in ("power", "radial_power"):
            raise WeightSpecError(f"unknown term type {self.kind!r}")
        if not self.p > 1.0:
            raise WeightSpecError("term exponent must exceed 1 (superlinearity)")
        if not self.coef > 0.0:
            raise WeightSpecError("term coefficient must be positive")

    def axis_value(self, r: np.ndarray) -> np.ndarray:
        """1-D profile coef * r**p / p (valid per axis for 'power' terms)."""
        return self.coef * np.abs(r) ** self.p / self.p

    def dual(self) -> "PowerTerm":
        # sup_x (x*y - c*x^p/p) = c^(1-q) * y^q / q with 1/p + 1/q = 1;
        # the same rule holds radially for nondecreasing profiles.
        q = self.p / (self.p - 1.0)
        return PowerTerm(self.kind, q, self.coef ** (1.0 - q))


def _terms_on_axes(terms: Sequence[PowerTerm], axes: Sequence[np.ndarray]) -> np.ndarray:
    n = len(axes)
    shape = tuple(len(a) for a in axes)
    total = np.zeros(shape)
    for term in terms:
        if term.kind == "power":
            for j, a in enumerate(axes):
                sl = [None] * n
                sl[j] = slice(None)
                total += term.axis_value(a)[tuple(sl)]
        else:
            r2 = np.zeros(shape)
            for j, a in enumerate(axes):
                sl = [None] * n
                sl[j] = slice(None)
                r2 = r2 + (np.asarray(a) ** 2)[tuple(sl)]
            total += term.coef * r2 ** (term.p / 2.0) / term.p
    return total


def _terms_eval(terms: Sequence[PowerTerm]) -> Callable[[np.ndarray], np.ndarray]:
    def evaluate(x: np.ndarray) -> np.ndarray:
        x = np.abs(np.asarray(x, dtype=np.float64))
        total = np.zeros(x.shape[:-1])
        for term in terms:
            if term.kind == "power":
                total += term.axis_value(x).sum(axis=-1)
            else:
                r2 = (x**2).sum(axis=-1)
                total += term.coef * r2 ** (term.p / 2.0) / term.p
        return total

    return evaluate


@dataclass(frozen=True)
class WeightFunction:
    """A weight (or candidate): finite evaluator on [0, inf)^n.

    ``eval`` is vectorized over a trailing coordinate axis of length ``n``.
    ``terms`` is set for catalog/JSON weights and drives separability
    detection and structural duals; custom test doubles leave it None.
    ``grid_eval`` and ``separable_profile`` let numerically-defined weights
    (discrete conjugates) plug into the product-grid fast paths.
    """

    n: int
    eval: Callable[[np.ndarray], np.ndarray]
    label: str
    conjugate_closed_form: Optional[Callable[[np.ndarray], np.ndarray]] = None
    terms: Optional[tuple[PowerTerm, ...]] = None
    grid_eval: Optional[Callable[[Sequence[np.ndarray]], np.ndarray]] = None
    separable_profile: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def symmetrized(self, x: np.ndarray) -> np.ndarray:
        """g(x) = eval(|x_1|, ..., |x_n|), even in each coordinate exactly."""
        return self.eval(np.abs(np.asarray(x, dtype=np.float64)))

    @property
    def is_separable(self) -> bool:
        if self.separable_profile is not None or self.n == 1:
            return True
        if self.terms is None:
            return False
        return all(t.kind == "power" for t in self.terms)

    def axis_profile(self) -> Callable[[np.ndarray], np.ndarray]:
        """Shared per-axis profile f with eval(x) = sum_j f(x_j); separable only."""
        if self.separable_profile is not None:
            return self.separable_profile
        if self.terms is None and self.n == 1:
            return lambda r: self.eval(np.abs(np.asarray(r, dtype=np.float64))[..., None])
        if not self.is_separable:
            raise ValueError(f"{self.label} is not separable")
        terms = self.terms

        def profile(r: np.ndarray) -> np.ndarray:
            r = np.abs(np.asarray(r, dtype=np.float64))
            out = np.zeros(r.shape)
            for t in terms:
                out += t.axis_value(r)
            return out

        return profile

    def eval_on_axes(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        """Evaluate on the product grid of per-axis node arrays."""
        if len(axes) != self.n:
            raise ValueError("axis count mismatch")
        axes = [np.abs(np.asarray(a, dtype=np.float64)) for a in axes]
        if self.grid_eval is not None:
            return self.grid_eval(axes)
        if self.terms is not None:
            return _terms_on_axes(self.terms, axes)
        mesh = np.meshgrid(*axes, indexing="ij")
        return self.eval(np.stack(mesh, axis=-1))

    def dual(self) -> Optional["WeightFunction"]:
        """Structural conjugate weight, when a closed form exists."""
        if self.terms is None or len(self.terms) != 1:
            return None
        dual_term = self.terms[0].dual()
        return WeightFunction(
            n=self.n,
            eval=_terms_eval([dual_term]),
            label=self.label + "*",
            conjugate_closed_form=self.eval,
            terms=(dual_term,),
        )


def make_fock(n: int) -> WeightFunction:
    """Quadratic weight ||x||^2 / 2; self-conjugate."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"invalid dimension {n!r}")
    term = PowerTerm("power", 2.0, 1.0)
    return WeightFunction(
        n=n,
        eval=_terms_eval([term]),
        label=f"fock:{n}",
        conjugate_closed_form=_terms_eval([term.dual()]),
        terms=(term,),
    )


def make_separable_power(n: int, p: float) -> WeightFunction:
    """Separable weight sum_j x_j**p / p with conjugate sum_j y_j**q / q."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"invalid dimension {n!r}")
    if not p > 1.0:
        raise ValueError("exponent must exceed 1 (superlinearity fails otherwise)")
    term = PowerTerm("power", float(p), 1.0)
    return WeightFunction(
        n=n,
        eval=_terms_eval([term]),
        label=f"power:{p:g}:{n}",
        conjugate_closed_form=_terms_eval([term.dual()]),
        terms=(term,),
    )


def weight_from_json(source) -> WeightFunction:
    """Build a weight from the JSON form {"n": int, "terms": [...]}.

    Each term is {"type": "power"|"radial_power", "p": float, "coef": float}
    with p > 1 and coef > 0, so the result is convex, symmetric, monotone
    and superlinear by construction.
    """
    if isinstance(source, (str, Path)):
        try:
            obj = json.loads(Path(source).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise WeightSpecError(f"cannot read weight spec: {exc}") from exc
    else:
        obj = source
    if not isinstance(obj, dict):
        raise WeightSpecError("weight spec must be a JSON object")
    try:
        n = obj["n"]
        raw_terms = obj["terms"]
    except (KeyError, TypeError) as exc:
        raise WeightSpecError("weight spec needs 'n' and 'terms'") from exc
    if not isinstance(n, int) or n < 1:
        raise WeightSpecError(f"invalid dimension {n!r}")
    if not isinstance(raw_terms, list) or not raw_terms:
        raise WeightSpecError("'terms' must be a non-empty list")
    terms = []
    for entry in raw_terms:
        if not isinstance(entry, dict):
            raise WeightSpecError("each term must be an object")
        try:
            terms.append(PowerTerm(entry["type"], float(entry["p"]), float(entry["coef"])))
        except KeyError as exc:
            raise WeightSpecError(f"term missing field {exc}") from exc
    terms = tuple(terms)
    if len(terms) == 1:
        closed = _terms_eval([terms[0].dual()])
    else:
        closed = None
    return WeightFunction(
        n=n,
        eval=_terms_eval(terms),
        label="json:" + ",".join(f"{t.kind[0]}{t.p:g}x{t.coef:g}" for t in terms),
        conjugate_closed_form=closed,
        terms=terms,
    )


def parse_preset(name: str) -> WeightFunction:
    """Presets: "fock:N" and "power:P:N"."""
    parts = name.split(":")
    try:
        if parts[0] == "fock" and len(parts) == 2:
            return make_fock(int(parts[1]))
        if parts[0] == "power" and len(parts) == 3:
            return make_separable_power(int(parts[2]), float(parts[1]))
    except ValueError as exc:
        raise WeightSpecError(f"bad preset {name!r}: {exc}") from exc
    raise WeightSpecError(f"unknown preset {name!r}")


@dataclass(frozen=True)
class ClassVSampling:
    """Sampling plan for validate_class_V.

    The box [0, box_radius]^n is gridded with points_per_axis nodes per axis
    (>= 3); growth is probed on the two spheres of the given radii.
    """

    box_radius: float = 8.0
    points_per_axis: int = 5
    radii: tuple[float, float] = (8.0, 16.0)
    n_directions: int = 64
    growth_margin: float = 0.25
    tolerance: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.points_per_axis < 3:
            raise ValueError("need at least 3 points per axis")
        if not self.radii[0] < self.radii[1]:
            raise ValueError("growth probe needs two radii R1 < R2")


@dataclass(frozen=True)
class ClassVReport:
    symmetric_ok: bool
    monotone_ok: bool
    superlinear_ok: bool
    worst_violation: float
    samples_used: int


def _unit_directions(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    dirs = [np.eye(n)[j] for j in range(n)]
    if n > 1:
        extra = np.abs(rng.standard_normal((count, n)))
        extra /= np.linalg.norm(extra, axis=1, keepdims=True)
        dirs.extend(extra)
    return np.array(dirs)


def validate_class_V(phi: WeightFunction, sampling: ClassVSampling = ClassVSampling()) -> ClassVReport:
    """Certify (by sampling) symmetry, axis monotonicity and superlinear growth.

    Failures never raise; they are carried in the report flags.
    """
    rng = np.random.default_rng(sampling.seed)
    n = phi.n
    axis = np.linspace(0.0, sampling.box_radius, sampling.points_per_axis)
    grid = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    samples = 0

    # symmetry: does the raw evaluator already agree with its symmetrization?
    signs = rng.choice([-1.0, 1.0], size=grid.shape)
    flipped = grid * signs
    sym_viol = float(np.max(np.abs(np.asarray(phi.eval(flipped), dtype=float) - phi.eval(grid))))
    if not math.isfinite(sym_viol):
        sym_viol = math.inf
    samples += 2 * len(grid)

    # monotonicity along each axis on [0, inf)^n
    mono_viol = 0.0
    delta = sampling.box_radius / (2.0 * (sampling.points_per_axis - 1))
    base_vals = phi.eval(grid)
    for j in range(n):
        shifted = grid.copy()
        shifted[:, j] += delta
        drop = np.max(base_vals - phi.eval(shifted))
        mono_viol = max(mono_viol, float(drop))
        samples += len(grid)

    # superlinearity: min over directions of g(R d)/R must grow by the margin
    dirs = _unit_directions(n, sampling.n_directions, rng)
    r1, r2 = sampling.radii
    ratio1 = float(np.min(phi.eval(dirs * r1) / r1))
    ratio2 = float(np.min(phi.eval(dirs * r2) / r2))
    samples += 2 * len(dirs)
    super_viol = max(0.0, sampling.growth_margin - (ratio2 - ratio1))

    tol = sampling.tolerance
    return ClassVReport(
        symmetric_ok=sym_viol <= tol,
        monotone_ok=mono_viol <= tol,
        superlinear_ok=super_viol <= 0.0,
        worst_violation=max(sym_viol, mono_viol, super_viol, 0.0),
        samples_used=samples,
    )


def convexity_violation(phi: WeightFunction, n_triples: int = 400,
                        box_radius: float = 6.0, seed: int = 0) -> float:
    """Worst midpoint-convexity violation of the symmetrized weight on random triples."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(-box_radius, box_radius, size=(n_triples, phi.n))
    y = rng.uniform(-box_radius, box_radius, size=(n_triples, phi.n))
    mid = phi.symmetrized((x + y) / 2.0)
    avg = (phi.symmetrized(x) + phi.symmetrized(y)) / 2.0
    return float(np.max(mid - avg))
