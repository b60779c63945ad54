"""Discrete Young-Fenchel conjugation and its log-substitution identities.

Two conjugation surfaces live here:

* grid-to-grid transforms (`conjugate_1d`, `conjugate_nd`) built on the
  linear-time hull scan kernel, used for dual tables and biconjugation;
* per-point truncated sups (`truncated_sup`, `log_conj`, `dual_log_conj`)
  over decay-budget boxes, used by the identity verifiers and by the
  Laplace/moment modules.

The grid transforms compute the exact max over sample nodes (lower
conjugate), which keeps the Fenchel-Young inequality exact at nodes and
gives the brute-force oracle a well-defined target. The per-point sups
additionally lift the argmax node through a parabolic fit so their error
is smooth in the grid step instead of alignment-quantized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._scan import conjugate_lines
from .config import DEFAULT, NumericsConfig
from .weights import WeightFunction


class DivergenceError(RuntimeError):
    """Objective failed to decay within the expansion cap (not superlinear,
    or the dual point lies outside the finite-conjugate region)."""


# ---------------------------------------------------------------------------
# sampled functions on uniform tensor grids


@dataclass(frozen=True)
class GridAxis:
    """Uniform 1-D grid with count >= 2 nodes on [lo, hi]."""

    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("grid needs at least 2 nodes")
        if not self.hi > self.lo:
            raise ValueError("grid axis must be strictly increasing")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.count - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SampledFunction:
    """Tensor-grid sampling of a scalar function on a box."""

    axes: tuple[GridAxis, ...]
    values: np.ndarray
    domain_tag: str = "linear-scale"

    def __post_init__(self):
        if self.domain_tag not in ("linear-scale", "log-substituted"):
            raise ValueError(f"unknown domain tag {self.domain_tag!r}")
        shape = tuple(a.count for a in self.axes)
        if self.values.shape != shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sampled values must be finite at every node")

    @property
    def n(self) -> int:
        return len(self.axes)


def interp(f: SampledFunction, pts: np.ndarray) -> np.ndarray:
    """Multilinear interpolation at points of shape (..., n); error off-grid."""
    pts = np.asarray(pts, dtype=np.float64)
    if pts.shape[-1] != f.n:
        raise ValueError("point dimension mismatch")
    out_shape = pts.shape[:-1]
    flat = pts.reshape(-1, f.n)
    idx = []
    frac = []
    for j, ax in enumerate(f.axes):
        rel = (flat[:, j] - ax.lo) / ax.step
        if np.any(rel < -1e-9) or np.any(rel > ax.count - 1 + 1e-9):
            raise ValueError("interpolation point outside sampled box")
        i = np.clip(np.floor(rel).astype(np.intp), 0, ax.count - 2)
        idx.append(i)
        frac.append(rel - i)
    vals = np.zeros(flat.shape[0])
    for corner in range(1 << f.n):
        weight = np.ones(flat.shape[0])
        coord = []
        for j in range(f.n):
            if corner >> j & 1:
                weight *= frac[j]
                coord.append(idx[j] + 1)
            else:
                weight *= 1.0 - frac[j]
                coord.append(idx[j])
        vals += weight * f.values[tuple(coord)]
    return vals.reshape(out_shape)


# ---------------------------------------------------------------------------
# objectives evaluatable on product grids


@dataclass
class GridFn:
    """Function of n variables evaluatable both pointwise and on product grids.

    ``axis_profiles`` is set when the function splits as a sum of 1-D
    profiles, which unlocks the exact per-axis conjugation fast path.
    """

    n: int
    at: Callable[[np.ndarray], np.ndarray]
    on_axes: Callable[[Sequence[np.ndarray]], np.ndarray]
    axis_profiles: Optional[tuple[Callable[[np.ndarray], np.ndarray], ...]] = None


def symmetrized_fn(w: WeightFunction) -> GridFn:
    """The even extension g(x) = eval(abs x) as a grid function on R^n."""
    profiles = None
    if w.is_separable:
        prof = w.axis_profile()
        profiles = tuple([prof] * w.n)
    return GridFn(
        n=w.n,
        at=w.symmetrized,
        on_axes=w.eval_on_axes,
        axis_profiles=profiles,
    )


def log_image(w: WeightFunction) -> GridFn:
    """The log substitution t -> eval(e^{t_1}, ..., e^{t_n})."""

    def at(t: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return w.eval(np.exp(np.asarray(t, dtype=np.float64)))

    def on_axes(axes: Sequence[np.ndarray]) -> np.ndarray:
        with np.errstate(over="ignore"):
            return w.eval_on_axes([np.exp(np.asarray(a)) for a in axes])

    profiles = None
    if w.is_separable:
        prof = w.axis_profile()

        def log_prof(t: np.ndarray) -> np.ndarray:
            with np.errstate(over="ignore"):
                return prof(np.exp(np.asarray(t, dtype=np.float64)))

        profiles = tuple([log_prof] * w.n)
    return GridFn(n=w.n, at=at, on_axes=on_axes, axis_profiles=profiles)


def scale_fn(fn: GridFn, c: float) -> GridFn:
    profiles = None
    if fn.axis_profiles is not None:
        profiles = tuple((lambda t, p=p: c * p(t)) for p in fn.axis_profiles)
    return GridFn(
        n=fn.n,
        at=lambda x: c * fn.at(x),
        on_axes=lambda axes: c * fn.on_axes(axes),
        axis_profiles=profiles,
    )


# ---------------------------------------------------------------------------
# grid-to-grid conjugation


def _scan_axis(nodes: np.ndarray, tensor: np.ndarray, dual_nodes: np.ndarray,
               axis: int) -> np.ndarray:
    """Apply the 1-D scan along ``axis``: max over nodes of x*node - tensor."""
    moved = np.moveaxis(tensor, axis, -1)
    lead = moved.shape[:-1]
    rows = np.ascontiguousarray(moved.reshape(-1, moved.shape[-1]))
    out = conjugate_lines(nodes, rows, np.asarray(dual_nodes, dtype=np.float64))
    return np.moveaxis(out.reshape(lead + (len(dual_nodes),)), -1, axis)


def conjugate_values(axes_nodes: Sequence[np.ndarray], values: np.ndarray,
                     dual_nodes: Sequence[np.ndarray]) -> np.ndarray:
    """Discrete conjugate on arbitrary ascending node arrays.

    Returns max over all primal grid nodes x of <xi, x> - values(x), for xi
    on the product of ``dual_nodes``, via iterated per-axis scans (the
    iterated max over a product grid factors exactly).
    """
    n = len(axes_nodes)
    if n != len(dual_nodes):
        raise ValueError("dual grid dimension mismatch")
    t = np.asarray(values, dtype=np.float64)
    for j in range(n):
        if j > 0:
            t = -t
        t = _scan_axis(np.asarray(axes_nodes[j], dtype=np.float64), t, dual_nodes[j], j)
    return t


@dataclass(frozen=True)
class ConjugateResult:
    dual: SampledFunction
    slope_range: tuple[tuple[float, float], ...]


def _slope_range(f: SampledFunction) -> tuple[tuple[float, float], ...]:
    out = []
    for j, ax in enumerate(f.axes):
        d = np.diff(f.values, axis=j) / ax.step
        out.append((float(d.min()), float(d.max())))
    return tuple(out)


def conjugate_1d(f: SampledFunction, dual_grid: GridAxis) -> ConjugateResult:
    """Conjugate of a 1-D sampling: dual value at x is max_i (x y_i - f_i)."""
    if f.n != 1:
        raise ValueError("conjugate_1d needs a one-dimensional sampling")
    dual_nodes = dual_grid.nodes()
    vals = conjugate_values([f.axes[0].nodes()], f.values, [dual_nodes])
    dual = SampledFunction((dual_grid,), vals, "linear-scale")
    return ConjugateResult(dual, _slope_range(f))


def conjugate_nd(f: SampledFunction, dual_grid: Sequence[GridAxis]) -> ConjugateResult:
    """n-dimensional discrete conjugate by iterated per-axis scans."""
    dual_grid = tuple(dual_grid)
    if len(dual_grid) != f.n:
        raise ValueError("dual grid dimension mismatch")
    vals = conjugate_values(
        [a.nodes() for a in f.axes], f.values, [g.nodes() for g in dual_grid]
    )
    dual = SampledFunction(dual_grid, vals, "linear-scale")
    return ConjugateResult(dual, _slope_range(f))


def conjugate_bruteforce(f: SampledFunction, dual_grid: Sequence[GridAxis],
                         chunk: int = 4096) -> np.ndarray:
    """Exhaustive-max oracle for the scan-based conjugates."""
    dual_grid = tuple(dual_grid)
    mesh = np.meshgrid(*[a.nodes() for a in f.axes], indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=1)
    vals = f.values.ravel()
    duals = np.stack(
        [m.ravel() for m in np.meshgrid(*[g.nodes() for g in dual_grid], indexing="ij")],
        axis=1,
    )
    out = np.empty(len(duals))
    for start in range(0, len(duals), chunk):
        block = duals[start:start + chunk]
        out[start:start + chunk] = np.max(block @ nodes.T - vals, axis=1)
    return out.reshape(tuple(g.count for g in dual_grid))


# ---------------------------------------------------------------------------
# log substitution of weights and samplings


def log_substitute(u, box: Sequence[GridAxis]) -> SampledFunction:
    """Sample t -> u(e^{t_1}, ..., e^{t_n}) on a box in t-space."""
    box = tuple(box)
    axes_nodes = [a.nodes() for a in box]
    if isinstance(u, WeightFunction):
        if len(box) != u.n:
            raise ValueError("box dimension mismatch")
        vals = log_image(u).on_axes(axes_nodes)
    elif isinstance(u, SampledFunction):
        if len(box) != u.n:
            raise ValueError("box dimension mismatch")
        mesh = np.meshgrid(*[np.exp(a) for a in axes_nodes], indexing="ij")
        vals = interp(u, np.stack(mesh, axis=-1))
    else:
        raise TypeError("u must be a WeightFunction or SampledFunction")
    return SampledFunction(box, vals, "log-substituted")


# ---------------------------------------------------------------------------
# per-point truncated sups


@dataclass(frozen=True)
class SupResult:
    """Truncated sup of a concave objective with its decay box."""

    value: float
    argmax: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    curvature: np.ndarray = field(default_factory=lambda: np.array([]))


_EXPAND_CAP = 600.0


def _sup_line(objective: Callable[[np.ndarray], np.ndarray], cfg: NumericsConfig,
              step: float, floor: Optional[float]) -> tuple[float, float, float, float]:
    """Maximize a 1-D objective over its decay box.

    Returns (value, argmax, lo, hi). The box is grown until the objective
    has dropped ``decay_budget`` below its running max on both ends; a
    floor pins the lower end (log-space degenerate directions approach
    their sup as t -> -inf, so the box stops at the configured floor).
    """
    budget = cfg.decay_budget
    lo = floor if floor is not None else -2.0
    hi = 2.0
    coarse = 0.25
    while True:
        t = np.arange(lo, hi + coarse / 2, coarse)
        psi = objective(t)
        psi = np.where(np.isfinite(psi), psi, -np.inf)
        m = psi.max()
        if not np.isfinite(m):
            raise DivergenceError("objective is -inf on the whole probe box")
        need_hi = psi[-1] > m - budget
        need_lo = psi[0] > m - budget and floor is None
        if not (need_hi or need_lo):
            break
        if need_hi:
            hi = hi * 2 if hi >= 1 else hi + 2
            if hi > _EXPAND_CAP:
                raise DivergenceError("objective does not decay (superlinearity fails)")
        if need_lo:
            lo = lo * 2 if lo <= -1 else lo - 2
            if lo < -_EXPAND_CAP:
                raise DivergenceError("objective does not decay (superlinearity fails)")
    keep = np.flatnonzero(psi > m - budget)
    lo_box = t[max(keep[0] - 1, 0)]
    hi_box = t[min(keep[-1] + 1, len(t) - 1)]
    if floor is not None:
        lo_box = max(lo_box, floor)
    # power-of-two interval count: halving the step inserts exact midpoints,
    # so refinement never loses a node and residuals shrink monotonically
    intervals = 1 << max(1, math.ceil(math.log2((hi_box - lo_box) / step)))
    fine = np.linspace(lo_box, hi_box, intervals + 1)
    vals = objective(fine)
    vals = np.where(np.isfinite(vals), vals, -np.inf)
    k = int(np.argmax(vals))
    value = float(vals[k])
    if 0 < k < len(fine) - 1 and np.isfinite(vals[k - 1]) and np.isfinite(vals[k + 1]):
        # parabolic peak lift through the bracketing triple; the vertex is
        # always within half a step of the argmax node, and the lift removes
        # the alignment-quantized part of the node-max error
        num = float(vals[k + 1] - vals[k - 1])
        den = float(vals[k + 1] - 2.0 * vals[k] + vals[k - 1])
        if den < 0.0:
            value += num * num / (-8.0 * den)
    return value, float(fine[k]), lo_box, hi_box


def _coordinate_argmax(fn: GridFn, y: np.ndarray, cfg: NumericsConfig,
                       floor: Optional[float]) -> np.ndarray:
    """Approximate maximizer of <y, t> - fn(t) by per-coordinate bisection
    on the sign of the directional derivative (concave objectives)."""
    n = fn.n
    t = np.zeros(n)
    h = 1e-5
    lo_default = floor if floor is not None else -_EXPAND_CAP

    def dpsi(j: int, tj: float) -> float:
        a = t.copy()
        a[j] = tj + h
        b = t.copy()
        b[j] = tj - h
        return float(y[j] - (fn.at(a) - fn.at(b)) / (2 * h))

    for _ in range(5):
        for j in range(n):
            lo, hi = lo_default, 2.0
            if dpsi(j, lo) <= 0.0:
                t[j] = lo
                continue
            while dpsi(j, hi) > 0.0:
                hi = hi * 2 if hi >= 1 else hi + 2
                if hi > _EXPAND_CAP:
                    raise DivergenceError("no finite maximizer (superlinearity fails)")
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if dpsi(j, mid) > 0.0:
                    lo = mid
                else:
                    hi = mid
            t[j] = 0.5 * (lo + hi)
    return t


def _axis_box(fn: GridFn, t_star: np.ndarray, y: np.ndarray, cfg: NumericsConfig,
              floor: Optional[float]) -> tuple[np.ndarray, np.ndarray]:
    """Per-axis decay box around the maximizer for the full objective."""
    n = fn.n
    psi_star = float(np.dot(y, t_star) - fn.at(t_star))
    lo = np.empty(n)
    hi = np.empty(n)
    budget = cfg.decay_budget
    for j in range(n):
        for sign, store in ((1.0, "hi"), (-1.0, "lo")):
            d = 0.5
            while True:
                probe = t_star.copy()
                probe[j] += sign * d
                if floor is not None and sign < 0 and probe[j] <= floor:
                    edge = floor
                    break
                val = float(np.dot(y, probe) - fn.at(probe))
                if not math.isfinite(val) or val <= psi_star - budget:
                    edge = probe[j]
                    break
                d *= 2.0
                if d > _EXPAND_CAP:
                    raise DivergenceError("objective does not decay (superlinearity fails)")
            if store == "hi":
                hi[j] = edge
            else:
                lo[j] = edge
    return lo, hi


def _peak_curvature(fn: GridFn, t_star: np.ndarray, y: np.ndarray) -> np.ndarray:
    """|second difference| of the objective along each axis at the maximizer."""
    n = fn.n
    h = 1e-3
    out = np.empty(n)
    mid = float(np.dot(y, t_star) - fn.at(t_star))
    for j in range(n):
        a = t_star.copy()
        a[j] += h
        b = t_star.copy()
        b[j] -= h
        va = float(np.dot(y, a) - fn.at(a))
        vb = float(np.dot(y, b) - fn.at(b))
        out[j] = abs(va + vb - 2 * mid) / h**2
    return out


def truncated_sup(fn: GridFn, y, cfg: NumericsConfig = DEFAULT,
                  floor: Optional[float] = None) -> SupResult:
    """sup over t of <y, t> - fn(t), truncated to the decay-budget box.

    Separable objectives are maximized axis by axis (exact factorization);
    otherwise the box is gridded and the max taken over nodes.
    """
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if y.shape != (fn.n,):
        raise ValueError("dual point dimension mismatch")
    if fn.axis_profiles is not None:
        step = cfg.step_for(fn.n, separable=True)
        total = 0.0
        arg = np.empty(fn.n)
        lo = np.empty(fn.n)
        hi = np.empty(fn.n)
        curv = np.empty(fn.n)
        for j, prof in enumerate(fn.axis_profiles):
            val, tj, lo_j, hi_j = _sup_line(
                lambda t, p=prof, yj=y[j]: yj * t - p(t), cfg, step, floor
            )
            total += val
            arg[j] = tj
            lo[j] = lo_j
            hi[j] = hi_j
            h = 1e-3
            curv[j] = abs(
                float(prof(np.array(tj + h)) + prof(np.array(tj - h))
                      - 2 * prof(np.array(tj)))
            ) / h**2
        return SupResult(total, arg, lo, hi, curv)

    if fn.n == 1:
        step = cfg.step_for(1, separable=False)
        val, tj, lo_j, hi_j = _sup_line(
            lambda t: y[0] * t - fn.at(t[:, None]), cfg, step, floor
        )
        arg = np.array([tj])
        return SupResult(val, arg, np.array([lo_j]), np.array([hi_j]),
                         _peak_curvature(fn, arg, y))

    step = cfg.step_for(fn.n, separable=False)
    t_star = _coordinate_argmax(fn, y, cfg, floor)
    lo, hi = _axis_box(fn, t_star, y, cfg, floor)
    axes = []
    total_nodes = 1
    for j in range(fn.n):
        intervals = 1 << max(1, math.ceil(math.log2((hi[j] - lo[j]) / step)))
        axes.append(np.linspace(lo[j], hi[j], intervals + 1))
        total_nodes *= intervals + 1
    if total_nodes > 6e7:
        raise ValueError("probe box too large; coarsen the conjugation step")
    tensor = fn.on_axes(axes)
    psi = -tensor
    for j, a in enumerate(axes):
        sl = [None] * fn.n
        sl[j] = slice(None)
        psi = psi + (y[j] * a)[tuple(sl)]
    psi = np.where(np.isfinite(psi), psi, -np.inf)
    flat = int(np.argmax(psi))
    idx = np.unravel_index(flat, psi.shape)
    arg = np.array([axes[j][idx[j]] for j in range(fn.n)])
    return SupResult(float(psi[idx]), arg, lo, hi, _peak_curvature(fn, arg, y))


# ---------------------------------------------------------------------------
# numeric duals (weights without a closed-form conjugate)


class _NumericDual:
    """Conjugate of a weight evaluated through discrete scans of its samples."""

    def __init__(self, w: WeightFunction, cfg: NumericsConfig):
        self.w = w
        self.cfg = cfg
        self.n = w.n
        self._axis_samples: Optional[tuple[np.ndarray, np.ndarray]] = None
        self._nd_samples: Optional[tuple[list[np.ndarray], np.ndarray]] = None

    def _primal_extent(self, r_max: float) -> float:
        fn = symmetrized_fn(self.w)
        if fn.axis_profiles is not None:
            prof = fn.axis_profiles[0]
            _, _, _, hi = _sup_line(
                lambda t: max(r_max, 1.0) * t - prof(t), self.cfg,
                step=0.5, floor=0.0,
            )
            return hi
        slope = max(r_max * self.n, 1.0)
        _, _, _, hi = _sup_line(
            lambda t: slope * t - self.w.eval(
                np.repeat(t[:, None], self.n, axis=1)),
            self.cfg, step=0.5, floor=0.0,
        )
        return hi

    def _axis_table(self, r_max: float) -> tuple[np.ndarray, np.ndarray]:
        if self._axis_samples is not None:
            nodes, vals = self._axis_samples
            if nodes[-1] >= self._primal_extent(r_max) - 1e-12:
                return nodes, vals
        extent = self._primal_extent(r_max)
        step = self.cfg.conj_step_1d
        nodes = np.linspace(0.0, extent, int(math.ceil(extent / step)) + 1)
        vals = self.w.axis_profile()(nodes)
        self._axis_samples = (nodes, vals)
        return nodes, vals

    def _nd_table(self, r_max: float) -> tuple[list[np.ndarray], np.ndarray]:
        if self._nd_samples is not None:
            axes, vals = self._nd_samples
            if axes[0][-1] >= self._primal_extent(r_max) - 1e-12:
                return axes, vals
        extent = self._primal_extent(r_max)
        step = max(self.cfg.conj_step_nd, extent / 1200)
        nodes = np.linspace(0.0, extent, int(math.ceil(extent / step)) + 1)
        axes = [nodes] * self.n
        vals = self.w.eval_on_axes(axes)
        self._nd_samples = (axes, vals)
        return axes, vals

    def eval(self, pts: np.ndarray) -> np.ndarray:
        pts = np.abs(np.asarray(pts, dtype=np.float64))
        out_shape = pts.shape[:-1]
        flat = pts.reshape(-1, self.n)
        r_max = float(flat.max()) if flat.size else 1.0
        if self.w.is_separable:
            nodes, vals = self._axis_table(r_max)
            rows = vals[None, :]
            total = np.zeros(flat.shape[0])
            for j in range(self.n):
                order = np.argsort(flat[:, j], kind="stable")
                conj = conjugate_lines(nodes, rows, flat[order, j])[0]
                total[order] += conj
            return total.reshape(out_shape)
        axes, vals = self._nd_table(r_max)
        mesh = np.meshgrid(*axes, indexing="ij")
        nodes = np.stack([m.ravel() for m in mesh], axis=1)
        flat_vals = vals.ravel()
        out = np.empty(flat.shape[0])
        for start in range(0, flat.shape[0], 512):
            block = flat[start:start + 512]
            out[start:start + 512] = np.max(block @ nodes.T - flat_vals, axis=1)
        return out.reshape(out_shape)

    def eval_on_axes(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        axes = [np.abs(np.asarray(a, dtype=np.float64)) for a in axes]
        r_max = max(float(a.max()) for a in axes)
        if self.w.is_separable:
            nodes, vals = self._axis_table(r_max)
            rows = vals[None, :]
            n = self.n
            total = np.zeros(tuple(len(a) for a in axes))
            for j, a in enumerate(axes):
                order = np.argsort(a, kind="stable")
                conj = np.empty(len(a))
                conj[order] = conjugate_lines(nodes, rows, a[order])[0]
                sl = [None] * n
                sl[j] = slice(None)
                total = total + conj[tuple(sl)]
            return total
        p_axes, vals = self._nd_table(r_max)
        t = vals
        for j, a in enumerate(axes):
            if j > 0:
                t = -t
            order = np.argsort(a, kind="stable")
            scanned = _scan_axis(p_axes[j], t, a[order], j)
            t = np.take(scanned, np.argsort(order, kind="stable"), axis=j)
        return t


def numeric_dual_weight(w: WeightFunction, cfg: NumericsConfig = DEFAULT) -> WeightFunction:
    """Conjugate weight computed by discrete scans (no closed form needed)."""
    nd = _NumericDual(w, cfg)
    profile = None
    if w.is_separable:
        # the conjugate of a sum of per-axis profiles is the per-axis conjugate sum
        def profile(r: np.ndarray) -> np.ndarray:
            r = np.abs(np.asarray(r, dtype=np.float64))
            nodes, vals = nd._axis_table(float(r.max()) if r.size else 1.0)
            flat = r.ravel()
            order = np.argsort(flat, kind="stable")
            out = np.empty(flat.shape[0])
            out[order] = conjugate_lines(nodes, vals[None, :], flat[order])[0]
            return out.reshape(r.shape)

    return WeightFunction(
        n=w.n,
        eval=nd.eval,
        label=w.label + "*",
        conjugate_closed_form=None,
        terms=None,
        grid_eval=nd.eval_on_axes,
        separable_profile=profile,
    )


def dual_weight(w: WeightFunction, cfg: NumericsConfig = DEFAULT) -> WeightFunction:
    """The conjugate weight: structural closed form when available, else numeric."""
    structural = w.dual()
    if structural is not None:
        return structural
    if w.conjugate_closed_form is not None:
        return WeightFunction(
            n=w.n,
            eval=w.conjugate_closed_form,
            label=w.label + "*",
            conjugate_closed_form=w.eval,
            terms=None,
        )
    return numeric_dual_weight(w, cfg)


# ---------------------------------------------------------------------------
# the log-substituted conjugates and identity verifiers


def _check_probe(x: np.ndarray, n: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.shape != (n,):
        raise ValueError(f"probe must have {n} coordinates")
    if np.any(x < 0):
        raise ValueError("probe outside [0, inf)^n: the conjugate is +inf there")
    return x


def log_conj(w: WeightFunction, x, cfg: NumericsConfig = DEFAULT) -> float:
    """(u[e])^*(x) = sup_t (<x, t> - u(e^t)) for x in [0, inf)^n."""
    x = _check_probe(x, w.n)
    return truncated_sup(log_image(w), x, cfg, floor=cfg.t_floor).value


def dual_log_conj(w: WeightFunction, x, cfg: NumericsConfig = DEFAULT,
                  w_dual: Optional[WeightFunction] = None) -> float:
    """(u^*[e])^*(x), with u^* taken closed-form when available."""
    x = _check_probe(x, w.n)
    if w_dual is None:
        w_dual = dual_weight(w, cfg)
    return truncated_sup(log_image(w_dual), x, cfg, floor=cfg.t_floor).value


def entropy_sum(x: np.ndarray) -> float:
    """sum over nonzero coordinates of x_j ln x_j - x_j."""
    x = np.asarray(x, dtype=np.float64)
    nz = x[x > 0]
    return float(np.sum(nz * np.log(nz) - nz))


@dataclass(frozen=True)
class IdentityReport:
    points: tuple[tuple[float, ...], ...]
    lhs: tuple[float, ...]
    rhs: tuple[float, ...]
    max_abs_residual: float
    max_positive_residual: float


def _identity_report(u: WeightFunction, points, cfg: NumericsConfig) -> IdentityReport:
    w_dual = dual_weight(u, cfg)
    pts = []
    lhs = []
    rhs = []
    for x in points:
        x = _check_probe(x, u.n)
        left = log_conj(u, x, cfg) + dual_log_conj(u, x, cfg, w_dual=w_dual)
        pts.append(tuple(float(v) for v in x))
        lhs.append(left)
        rhs.append(entropy_sum(x))
    resid = np.array(lhs) - np.array(rhs)
    return IdentityReport(
        points=tuple(pts),
        lhs=tuple(lhs),
        rhs=tuple(rhs),
        max_abs_residual=float(np.max(np.abs(resid))),
        max_positive_residual=float(max(np.max(resid), 0.0)),
    )


def verify_prop3(u: WeightFunction, points, cfg: NumericsConfig = DEFAULT) -> IdentityReport:
    """One-sided check: the sum of log-substituted conjugates never exceeds
    the entropy sum (holds for any continuous superlinear u)."""
    return _identity_report(u, points, cfg)


def verify_prop6_7(u: WeightFunction, points, cfg: NumericsConfig = DEFAULT) -> IdentityReport:
    """Two-sided check: for convex symmetric monotone weights the sum of
    log-substituted conjugates equals the entropy sum, including boundary
    probes (some x_j = 0) and the origin."""
    return _identity_report(u, points, cfg)


@dataclass(frozen=True)
class DivergenceProfile:
    rows: tuple[tuple[float, float], ...]
    witness_x: tuple[float, ...]
    witness_sups: tuple[float, ...]


def divergence_profile(u: WeightFunction, directions, radii,
                       cfg: NumericsConfig = DEFAULT) -> DivergenceProfile:
    """Growth profile of the log-substituted conjugate.

    For each radius r: min over the given nonnegative unit directions d of
    (u[e])^*(r d) / r (superlinear growth of the conjugate). Also witnesses
    divergence outside [0, inf)^n: the running sup of <x, t> - u(e^t) over
    expanding boxes for a probe x with a negative coordinate.
    """
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be strictly increasing")
    dirs = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    if dirs.shape[1] != u.n:
        raise ValueError("direction dimension mismatch")
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero direction rejected")
    if np.any(dirs < 0):
        raise ValueError("directions must lie in [0, inf)^n")
    dirs = dirs / norms[:, None]

    rows = []
    for r in radii:
        ratios = [log_conj(u, r * d, cfg) / r for d in dirs]
        rows.append((r, float(min(ratios))))

    witness = np.zeros(u.n)
    witness[0] = -1.0
    fn = log_image(u)
    sups = []
    for r in radii:
        if fn.axis_profiles is not None:
            total = 0.0
            for j, prof in enumerate(fn.axis_profiles):
                t = np.linspace(-r, r, max(int(2 * r / 0.01) + 1, 9))
                total += float(np.max(witness[j] * t - prof(t)))
            sups.append(total)
        else:
            axes = [np.linspace(-r, r, 201)] * u.n
            tensor = fn.on_axes(axes)
            psi = -tensor
            for j, a in enumerate(axes):
                sl = [None] * u.n
                sl[j] = slice(None)
                psi = psi + (witness[j] * a)[tuple(sl)]
            sups.append(float(psi.max()))
    return DivergenceProfile(
        rows=tuple(rows),
        witness_x=tuple(witness),
        witness_sups=tuple(sups),
    )
