"""Monomial moments of weighted Fock-type spaces.

The moment of a multi-index alpha is the squared weighted L^2 norm of the
monomial z^alpha; after polar coordinates and a log substitution it is
(2 pi)^n times a Laplace integral with exponent <2 (alpha+1), t> - 2 phi[e](t),
which is where the volume bounds and conjugate lower bounds attach.
Everything is tracked in log space: moments grow super-geometrically.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

import numpy as np

from .config import DEFAULT, NumericsConfig
from .fenchel import log_image, scale_fn, truncated_sup
from .laplace import (
    SublevelSpec,
    VolumeEstimate,
    default_volume_method,
    laplace_integral,
    sublevel_volume,
)
from .weights import WeightFunction

LN_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Element of Z_+^n indexing monomials and moments."""

    components: tuple[int, ...]

    def __post_init__(self):
        if not self.components or any(
            not isinstance(c, int) or c < 0 for c in self.components
        ):
            raise ValueError("multi-index needs nonnegative integer components")

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        return sum(self.components)

    def shifted(self) -> tuple[int, ...]:
        """alpha + 1 elementwise (the polar-Jacobian shift)."""
        return tuple(c + 1 for c in self.components)

    def factorial(self) -> int:
        """prod alpha_j!, exact integer arithmetic."""
        out = 1
        for c in self.components:
            out *= math.factorial(c)
        return out

    def log_factorial(self) -> float:
        return sum(math.lgamma(c + 1) for c in self.components)


def iter_indices(n: int, max_degree: int) -> Iterator[MultiIndex]:
    """All alpha with |alpha| <= max_degree, in lexicographic order."""

    def rec(prefix: tuple[int, ...], remaining: int, left: int):
        if left == 0:
            yield MultiIndex(prefix)
            return
        for c in range(remaining + 1):
            yield from rec(prefix + (c,), remaining - c, left - 1)

    yield from sorted(rec((), max_degree, n))


@dataclass(frozen=True)
class MomentEntry:
    value: float
    ln_value: float
    rel_error: float


def moment(phi: WeightFunction, alpha: MultiIndex,
           cfg: NumericsConfig = DEFAULT) -> MomentEntry:
    """c_alpha = (2 pi)^n * integral of e^{<2(alpha+1), t> - 2 phi[e](t)} dt."""
    if alpha.n != phi.n:
        raise ValueError("multi-index dimension mismatch")
    h = scale_fn(log_image(phi), 2.0)
    y = 2.0 * np.asarray(alpha.shifted(), dtype=np.float64)
    est = laplace_integral(h, y, cfg)
    ln_value = phi.n * LN_2PI + est.ln_value
    value = math.exp(ln_value) if ln_value < 709 else math.inf
    return MomentEntry(value=value, ln_value=ln_value, rel_error=est.rel_error)


@dataclass(frozen=True)
class FockMoment:
    value: float
    ln_value: float


def fock_oracle(alpha: MultiIndex, n: int) -> FockMoment:
    """Closed form pi^n * alpha! for the quadratic weight.

    From 2 phi = ||z||^2 and per-axis radial integrals
    2 pi * int r^{2a+1} e^{-r^2} dr = pi * a!. The log channel stays valid
    when the plain value overflows.
    """
    if alpha.n != n:
        raise ValueError("multi-index dimension mismatch")
    ln_value = n * math.log(math.pi) + alpha.log_factorial()
    value = math.exp(ln_value) if ln_value < 709 else math.inf
    return FockMoment(value=value, ln_value=ln_value)


@dataclass(frozen=True)
class MomentTable:
    """Moments for all |alpha| <= max_degree, with per-entry error estimates."""

    phi_label: str
    n: int
    max_degree: int
    entries: dict

    def __post_init__(self):
        for alpha in iter_indices(self.n, self.max_degree):
            if alpha not in self.entries:
                raise ValueError(f"table missing {alpha.components}")
        for alpha, e in self.entries.items():
            if not e.value > 0:
                raise ValueError(f"moment at {alpha.components} must be positive")

    def entry(self, alpha: MultiIndex) -> MomentEntry:
        try:
            return self.entries[alpha]
        except KeyError:
            raise KeyError(f"moment table has no entry for {alpha.components}") from None

    def ln(self, alpha: MultiIndex) -> float:
        return self.entry(alpha).ln_value

    def rows(self) -> list[tuple]:
        out = []
        for alpha in iter_indices(self.n, self.max_degree):
            e = self.entries[alpha]
            out.append(alpha.components + (e.value, e.ln_value, e.rel_error))
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                [f"alpha_{j + 1}" for j in range(self.n)]
                + ["value", "ln_value", "rel_error"]
            )
            for row in self.rows():
                writer.writerow(
                    [repr(float(v)) if isinstance(v, float) else v for v in row]
                )

    def to_json(self, path) -> None:
        payload = {
            "phi_label": self.phi_label,
            "n": self.n,
            "max_degree": self.max_degree,
            "entries": [
                {
                    "alpha": list(row[: self.n]),
                    "value": row[self.n],
                    "ln_value": row[self.n + 1],
                    "rel_error": row[self.n + 2],
                }
                for row in self.rows()
            ],
        }
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def from_csv(cls, path, phi_label: str = "", max_degree: Optional[int] = None) -> "MomentTable":
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            n = sum(1 for name in header if name.startswith("alpha_"))
            entries = {}
            best_degree = 0
            for row in reader:
                alpha = MultiIndex(tuple(int(v) for v in row[:n]))
                best_degree = max(best_degree, alpha.degree)
                entries[alpha] = MomentEntry(
                    value=float(row[n]),
                    ln_value=float(row[n + 1]),
                    rel_error=float(row[n + 2]),
                )
        degree = max_degree if max_degree is not None else best_degree
        return cls(phi_label=phi_label, n=n, max_degree=degree, entries=entries)

    @classmethod
    def from_json(cls, path) -> "MomentTable":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        entries = {
            MultiIndex(tuple(e["alpha"])): MomentEntry(
                value=e["value"], ln_value=e["ln_value"], rel_error=e["rel_error"]
            )
            for e in payload["entries"]
        }
        return cls(
            phi_label=payload["phi_label"],
            n=payload["n"],
            max_degree=payload["max_degree"],
            entries=entries,
        )


def moment_table(phi: WeightFunction, max_degree: int,
                 cfg: NumericsConfig = DEFAULT) -> MomentTable:
    entries = {}
    for alpha in iter_indices(phi.n, max_degree):
        entries[alpha] = moment(phi, alpha, cfg)
    return MomentTable(
        phi_label=phi.label, n=phi.n, max_degree=max_degree, entries=entries
    )


@dataclass(frozen=True)
class Lemma2Report:
    bound_ln: float
    value_ln: float
    ok: bool


def lemma2_check(phi: WeightFunction, alpha: MultiIndex,
                 cfg: NumericsConfig = DEFAULT,
                 entry: Optional[MomentEntry] = None) -> Lemma2Report:
    """Lower bound pi^n / prod(alpha_j + 1) * e^{2 (phi[e])^*(alpha+1)} <= c_alpha."""
    if entry is None:
        entry = moment(phi, alpha, cfg)
    shifted = np.asarray(alpha.shifted(), dtype=np.float64)
    conj = truncated_sup(log_image(phi), shifted, cfg).value
    bound_ln = (
        phi.n * math.log(math.pi) - float(np.sum(np.log(shifted))) + 2.0 * conj
    )
    slack = entry.rel_error + 1e-9
    return Lemma2Report(
        bound_ln=bound_ln,
        value_ln=entry.ln_value,
        ok=entry.ln_value >= bound_ln - slack,
    )


@dataclass(frozen=True)
class Lemma4Report:
    lo_ln: float
    value_ln: float
    hi_ln: float
    volume: VolumeEstimate
    conj: float
    ok: bool


def lemma4_check(phi: WeightFunction, alpha: MultiIndex,
                 cfg: NumericsConfig = DEFAULT,
                 entry: Optional[MomentEntry] = None) -> Lemma4Report:
    """Two-sided volume bracket for c_alpha at slack 1/2.

    (2 pi)^n e^{-1} V e^{2 s} <= c_alpha <= (2 pi)^n (1 + n!) V e^{2 s}
    where V is the volume of the slack-1/2 sublevel set of phi[e] at the
    shifted index and s is the log-substituted conjugate there.
    """
    if entry is None:
        entry = moment(phi, alpha, cfg)
    shifted = np.asarray(alpha.shifted(), dtype=np.float64)
    h = log_image(phi)
    sup = truncated_sup(h, shifted, cfg)
    spec = SublevelSpec(h=h, y=shifted, p=0.5, hstar_y=sup.value, argmax=sup.argmax)
    vol = sublevel_volume(spec, method=default_volume_method(phi.n), cfg=cfg)
    base = phi.n * LN_2PI + math.log(vol.value) + 2.0 * sup.value
    lo_ln = base - 1.0
    hi_ln = base + math.log(1.0 + math.factorial(phi.n))
    slack = vol.half_width / vol.value + entry.rel_error + 1e-9
    ok = (entry.ln_value >= lo_ln - slack) and (entry.ln_value <= hi_ln + slack)
    return Lemma4Report(
        lo_ln=lo_ln,
        value_ln=entry.ln_value,
        hi_ln=hi_ln,
        volume=vol,
        conj=sup.value,
        ok=ok,
    )


@dataclass(frozen=True)
class GrowthReport:
    rate: float
    floor_ln: float
    log_convex_ok: bool


def growth_floor(table: MomentTable, rate: float, tol: float = 1e-6) -> GrowthReport:
    """Witness for super-geometric growth: ln c_alpha - |alpha| ln M is
    bounded below with axiswise log-convex increments."""
    floor_ln = math.inf
    ok = True
    ln_rate = math.log(rate)
    for alpha in iter_indices(table.n, table.max_degree):
        floor_ln = min(floor_ln, table.ln(alpha) - alpha.degree * ln_rate)
        for j in range(table.n):
            comp = list(alpha.components)
            comp[j] += 1
            mid = MultiIndex(tuple(comp))
            comp[j] += 1
            top = MultiIndex(tuple(comp))
            if top.degree <= table.max_degree:
                second = table.ln(top) - 2 * table.ln(mid) + table.ln(alpha)
                if second < -tol:
                    ok = False
    return GrowthReport(rate=rate, floor_ln=floor_ln, log_convex_ok=ok)
