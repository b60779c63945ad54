"""Command-line verification surface.

One subcommand per library module plus ``all``; each runs that module's
checks on the configured weight and writes CSV or JSON reports. Exit code
0 means every check passed, 1 means a check failed, 2 means the
configuration or usage was invalid. Reports are deterministic: same
config and seed give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import duality, fenchel, laplace, moments, weights
from .config import DEFAULT, NumericsConfig
from .fenchel import GridAxis, SampledFunction
from .weights import WeightFunction, WeightSpecError

# scattered probe values (generic offsets avoid accidental grid alignment)
_PROBES_1D = [
    0.0, 0.137, 0.271, 0.31, 0.5, 0.618, 0.731, 0.9, 1.0, 1.234, 1.37, 1.5,
    1.62, 1.81, 2.0, 2.236, 2.41, 2.555, 2.718, 2.89, 3.0, 3.14, 3.37, 3.61, 3.8,
]
_PROBES_AXIS_2D = [0.0, 0.731, 1.37, 2.41, 3.14]
_PROBES_AXIS_3D = [0.0, 1.0, 2.41]


@dataclass(frozen=True)
class RunConfig:
    """CLI-level configuration (weight source, degree, output, seed)."""

    weight_path: Optional[str] = None
    weight_preset: Optional[str] = None
    max_degree: int = 8
    out_dir: str = "fockdual-out"
    fmt: str = "csv"
    seed: int = 0
    refine: int = 0
    volume_cells: Optional[int] = None
    tol_identity: Optional[float] = None

    def __post_init__(self):
        if self.max_degree < 0:
            raise WeightSpecError("degree must be nonnegative")
        if self.fmt not in ("csv", "json"):
            raise WeightSpecError(f"unknown report format {self.fmt!r}")


@dataclass
class SuiteResult:
    command: str
    checks: list = field(default_factory=list)  # (check_id, passed, detail)
    artifacts: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def add(self, check_id: str, ok: bool, detail: str = "") -> None:
        self.checks.append((check_id, bool(ok), detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {self.command}:{check_id}"
              + (f" ({detail})" if detail else ""))


def load_weight(run: RunConfig) -> WeightFunction:
    if run.weight_path and run.weight_preset:
        raise WeightSpecError("give either --weight or --weight-preset, not both")
    if run.weight_path:
        return weights.weight_from_json(run.weight_path)
    preset = run.weight_preset or "fock:1"
    return weights.parse_preset(preset)


def numerics_for(run: RunConfig) -> NumericsConfig:
    cfg = DEFAULT
    if run.refine:
        cfg = cfg.refined(run.refine)
    return cfg


def _fmt_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_table(out_dir: Path, name: str, header: list, rows: list, fmt: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = out_dir / f"{name}.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt_cell(v) for v in row])
    else:
        path = out_dir / f"{name}.json"
        payload = [
            {k: (bool(v) if isinstance(v, (bool, np.bool_)) else
                 float(v) if isinstance(v, (float, np.floating)) else v)
             for k, v in zip(header, row)}
            for row in rows
        ]
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path


def _emit_checks(result: SuiteResult, out_dir: Path, fmt: str) -> None:
    path = write_table(
        out_dir, f"{result.command}_checks", ["check_id", "passed", "detail"],
        result.checks, fmt,
    )
    result.artifacts.append(str(path))


def _probe_points(n: int) -> list:
    if n == 1:
        return [[v] for v in _PROBES_1D]
    axis = _PROBES_AXIS_2D if n == 2 else _PROBES_AXIS_3D
    pts = []

    def rec(prefix):
        if len(prefix) == n:
            pts.append(list(prefix))
            return
        for v in axis:
            rec(prefix + [v])

    rec([])
    return pts


def _axis_weight(w: WeightFunction) -> WeightFunction:
    prof = w.axis_profile()
    return WeightFunction(
        n=1, eval=lambda x: prof(x[..., 0]), label=w.label + "|axis"
    )


# ---------------------------------------------------------------------------
# subcommands


def cmd_conjugate(w: WeightFunction, cfg: NumericsConfig, run: RunConfig) -> SuiteResult:
    t0 = time.perf_counter()
    result = SuiteResult("conjugate")
    out_dir = Path(run.out_dir)

    report = weights.validate_class_V(w)
    result.add(
        "class_v",
        report.symmetric_ok and report.monotone_ok and report.superlinear_ok,
        f"worst_violation={float(report.worst_violation)!r}",
    )

    # dual weight table on [0, 4]^n, scan-based, against the closed form
    nodes_per_axis = {1: 65, 2: 33}.get(w.n, 9)
    axis = np.linspace(0.0, 4.0, nodes_per_axis)
    numeric_dual = fenchel.numeric_dual_weight(w, cfg)
    dual_tensor = numeric_dual.eval_on_axes([axis] * w.n)
    header = [f"y_{j + 1}" for j in range(w.n)] + ["value"]
    mesh = np.meshgrid(*([axis] * w.n), indexing="ij")
    coords = np.stack([m.ravel() for m in mesh], axis=1)
    rows = [tuple(c) + (v,) for c, v in zip(coords, dual_tensor.ravel())]
    if w.conjugate_closed_form is not None:
        closed = w.conjugate_closed_form(
            np.stack(mesh, axis=-1)).ravel()
        header += ["closed_form", "abs_diff"]
        rows = [
            r + (cf, abs(r[-1] - cf)) for r, cf in zip(rows, closed)
        ]
        worst = max(r[-1] for r in rows)
        # the non-separable numeric dual samples on a much coarser grid
        tol = 1e-6 if w.is_separable else 1e-3
        result.add("closed_form_match", worst <= tol, f"max_abs_diff={float(worst)!r}")
    result.artifacts.append(
        str(write_table(out_dir, "conjugate_dual_table", header, rows, run.fmt))
    )

    # log-substituted conjugate table on the same dual grid
    if w.is_separable:
        wa = _axis_weight(w)
        axis_vals = np.array([fenchel.log_conj(wa, [v], cfg) for v in axis])
        log_tensor = np.zeros((nodes_per_axis,) * w.n)
        for j in range(w.n):
            sl = [None] * w.n
            sl[j] = slice(None)
            log_tensor = log_tensor + axis_vals[tuple(sl)]
    else:
        log_tensor = np.array(
            [fenchel.log_conj(w, c, cfg) for c in coords]
        ).reshape((nodes_per_axis,) * w.n)
    rows = [
        tuple(c) + (v,) for c, v in zip(coords, log_tensor.ravel())
    ]
    result.artifacts.append(
        str(write_table(
            out_dir, "conjugate_log_dual_table",
            [f"x_{j + 1}" for j in range(w.n)] + ["value"], rows, run.fmt,
        ))
    )

    # grid transform invariants: Fenchel-Young and biconjugation
    counts = {1: 321, 2: 97}.get(w.n, 25)
    primal = tuple(GridAxis(-6.0, 6.0, counts) for _ in range(w.n))
    f_vals = fenchel.symmetrized_fn(w).on_axes([a.nodes() for a in primal])
    f = SampledFunction(primal, f_vals)
    slope_hi = max(
        float(np.max(np.abs(np.diff(f_vals, axis=j)))) / primal[j].step
        for j in range(w.n)
    )
    dual_counts = {1: 257, 2: 65}.get(w.n, 17)
    dual_grid = tuple(
        GridAxis(-1.05 * slope_hi, 1.05 * slope_hi, dual_counts) for _ in range(w.n)
    )
    conj = fenchel.conjugate_nd(f, dual_grid)

    rng = np.random.default_rng(run.seed)
    fy_worst = -math.inf
    primal_nodes = [a.nodes() for a in primal]
    dual_nodes = [g.nodes() for g in dual_grid]
    for _ in range(200):
        i = tuple(rng.integers(0, counts) for _ in range(w.n))
        k = tuple(rng.integers(0, dual_counts) for _ in range(w.n))
        x = np.array([primal_nodes[j][i[j]] for j in range(w.n)])
        xi = np.array([dual_nodes[j][k[j]] for j in range(w.n)])
        gap = float(x @ xi) - float(f.values[i]) - float(conj.dual.values[k])
        fy_worst = max(fy_worst, gap)
    result.add("fenchel_young", fy_worst <= 1e-10, f"worst_gap={fy_worst!r}")

    back = fenchel.conjugate_nd(conj.dual, primal)
    interior = tuple(slice(1, -1) for _ in range(w.n))
    resid = float(np.max(np.abs(
        f.values[interior] - back.dual.values[interior]
    )))
    bound = 0.0
    for j in range(w.n):
        second = np.abs(np.diff(conj.dual.values, n=2, axis=j))
        bound += float(second.max()) / 8.0
    result.add(
        "biconjugation", resid <= 2.0 * bound + 1e-12,
        f"residual={resid!r} bound={(2.0 * bound)!r}",
    )

    _emit_checks(result, out_dir, run.fmt)
    result.wall_time = time.perf_counter() - t0
    return result


def cmd_identities(w: WeightFunction, cfg: NumericsConfig, run: RunConfig,
                   expect_convex: bool = True) -> SuiteResult:
    t0 = time.perf_counter()
    result = SuiteResult("identities")
    out_dir = Path(run.out_dir)
    tol = run.tol_identity if run.tol_identity is not None else cfg.tol_identity
    probes = _probe_points(w.n)

    rep3 = fenchel.verify_prop3(w, probes, cfg)
    result.add(
        "prop3", rep3.max_positive_residual <= tol,
        f"max_positive_residual={rep3.max_positive_residual!r}",
    )
    rows = []
    for pt, lhs, rhs in zip(rep3.points, rep3.lhs, rep3.rhs):
        rows.append(("prop3",) + pt + (lhs, rhs, lhs - rhs))

    if expect_convex:
        rep67 = fenchel.verify_prop6_7(w, probes, cfg)
        ok = rep67.max_abs_residual <= tol
        if not ok:
            # one grid refinement before declaring failure
            rep67 = fenchel.verify_prop6_7(w, probes, cfg.refined())
            ok = rep67.max_abs_residual <= tol
        result.add(
            "prop6_7", ok, f"max_abs_residual={rep67.max_abs_residual!r}",
        )
        for pt, lhs, rhs in zip(rep67.points, rep67.lhs, rep67.rhs):
            rows.append(("prop6_7",) + pt + (lhs, rhs, lhs - rhs))
        if run.refine:
            fine = fenchel.verify_prop6_7(w, probes, cfg.refined())
            base = rep67.max_abs_residual
            shrink = base / fine.max_abs_residual if fine.max_abs_residual > 0 else math.inf
            result.add(
                "refine_shrink",
                base <= 1e-12 or shrink >= cfg.refine_shrink,
                f"shrink={shrink!r}",
            )
    result.artifacts.append(str(write_table(
        out_dir, "identities_residuals",
        ["check_id"] + [f"x_{j + 1}" for j in range(w.n)] + ["lhs", "rhs", "residual"],
        rows, run.fmt,
    )))

    dirs = list(np.eye(w.n))
    if w.n > 1:
        dirs.append(np.ones(w.n) / math.sqrt(w.n))
    radii = [5.0, 10.0]
    prof = fenchel.divergence_profile(w, dirs, radii, cfg)
    ratios = [r for _, r in prof.rows]
    result.add(
        "divergence_ratios", all(b > a for a, b in zip(ratios, ratios[1:])),
        f"ratios={ratios!r}",
    )
    increases = [
        b - a >= 0.8 * (rb - ra)
        for (a, b), (ra, rb) in zip(
            zip(prof.witness_sups, prof.witness_sups[1:]), zip(radii, radii[1:])
        )
    ]
    result.add("divergence_witness", all(increases),
               f"sups={list(prof.witness_sups)!r}")
    div_rows = [("ratio", r, v) for r, v in prof.rows]
    div_rows += [("witness", r, s) for r, s in zip(radii, prof.witness_sups)]
    result.artifacts.append(str(write_table(
        out_dir, "identities_divergence", ["kind", "radius", "value"],
        div_rows, run.fmt,
    )))

    _emit_checks(result, out_dir, run.fmt)
    result.wall_time = time.perf_counter() - t0
    return result


def _sandwich_grid(n: int) -> list:
    if n == 1:
        return [[v] for v in np.linspace(-2.0, 2.0, 9)]
    axis = [-1.5, 0.0, 1.5] if n == 2 else [-1.0, 0.0, 1.0]
    pts = []

    def rec(prefix):
        if len(prefix) == n:
            pts.append(list(prefix))
            return
        for v in axis:
            rec(prefix + [v])

    rec([])
    return pts


def cmd_sandwich(w: WeightFunction, cfg: NumericsConfig, run: RunConfig) -> SuiteResult:
    t0 = time.perf_counter()
    result = SuiteResult("sandwich")
    out_dir = Path(run.out_dir)
    h = fenchel.symmetrized_fn(w)
    rows = []
    all_ok = True
    worst_err = 0.0
    for y in _sandwich_grid(w.n):
        rep = laplace.sandwich_check(
            h, y, cfg, resolution=run.volume_cells, seed=run.seed
        )
        all_ok = all_ok and rep.verdict
        worst_err = max(worst_err, rep.combined_rel_error)
        rows.append(tuple(y) + (
            rep.integral, rep.volume.value, rep.volume.half_width,
            rep.hstar_y, rep.ratio, rep.verdict,
        ))
    result.add("theorem_b", all_ok, f"worst_rel_error={float(worst_err)!r}")
    result.artifacts.append(str(write_table(
        out_dir, "sandwich_table",
        [f"y_{j + 1}" for j in range(w.n)]
        + ["integral", "volume", "half_width", "hstar", "ratio", "verdict"],
        rows, run.fmt,
    )))
    _emit_checks(result, out_dir, run.fmt)
    result.wall_time = time.perf_counter() - t0
    return result


def cmd_moments(w: WeightFunction, cfg: NumericsConfig, run: RunConfig) -> SuiteResult:
    t0 = time.perf_counter()
    result = SuiteResult("moments")
    out_dir = Path(run.out_dir)
    table = moments.moment_table(w, run.max_degree, cfg)
    path = out_dir / ("moments_table.csv" if run.fmt == "csv" else "moments_table.json")
    out_dir.mkdir(parents=True, exist_ok=True)
    if run.fmt == "csv":
        table.to_csv(path)
    else:
        table.to_json(path)
    result.artifacts.append(str(path))

    check_rows = []
    lemma2_ok = True
    lemma4_ok = True
    for alpha in moments.iter_indices(w.n, run.max_degree):
        entry = table.entry(alpha)
        r2 = moments.lemma2_check(w, alpha, cfg, entry=entry)
        r4 = moments.lemma4_check(w, alpha, cfg, entry=entry)
        lemma2_ok = lemma2_ok and r2.ok
        lemma4_ok = lemma4_ok and r4.ok
        check_rows.append(
            ("lemma2",) + alpha.components + (r2.bound_ln, r2.value_ln, r2.ok)
        )
        check_rows.append(
            ("lemma4",) + alpha.components + (r4.lo_ln, r4.value_ln, r4.ok)
        )
    result.add("lemma2", lemma2_ok)
    result.add("lemma4", lemma4_ok)
    result.artifacts.append(str(write_table(
        out_dir, "moments_checks_detail",
        ["check_id"] + [f"alpha_{j + 1}" for j in range(w.n)]
        + ["bound_ln", "value_ln", "passed"],
        check_rows, run.fmt,
    )))

    if w.label.startswith("fock:"):
        worst = 0.0
        for alpha in moments.iter_indices(w.n, run.max_degree):
            oracle = moments.fock_oracle(alpha, w.n)
            worst = max(worst, abs(
                math.expm1(table.ln(alpha) - oracle.ln_value)
            ))
        result.add("fock_oracle", worst <= 1e-6, f"max_rel={worst!r}")

    for rate in (2.0, 10.0):
        g = moments.growth_floor(table, rate)
        result.add(
            f"growth_rate_{rate:g}",
            g.log_convex_ok and math.isfinite(g.floor_ln),
            f"floor_ln={g.floor_ln!r}",
        )

    _emit_checks(result, out_dir, run.fmt)
    result.wall_time = time.perf_counter() - t0
    return result


def cmd_duality(w: WeightFunction, cfg: NumericsConfig, run: RunConfig) -> SuiteResult:
    t0 = time.perf_counter()
    result = SuiteResult("duality")
    out_dir = Path(run.out_dir)
    w_star = fenchel.dual_weight(w, cfg)
    table = moments.moment_table(w, run.max_degree, cfg)
    table_star = moments.moment_table(w_star, run.max_degree, cfg)

    scan_alphas = [
        a for a in moments.iter_indices(w.n, run.max_degree)
        if all(c >= 1 for c in a.components)
    ]
    krep = duality.k_condition_scan(w, scan_alphas, cfg, phi_dual=w_star)
    result.add("k_condition", all(p > 0 for p in krep.products.values()),
               f"K_hat={krep.K_hat!r}")
    result.artifacts.append(str(write_table(
        out_dir, "duality_kscan",
        [f"alpha_{j + 1}" for j in range(w.n)] + ["product"],
        [a.components + (p,) for a, p in sorted(krep.products.items())],
        run.fmt,
    )))

    stirling_rows = []
    stirling_ok = True
    for alpha in moments.iter_indices(w.n, run.max_degree):
        rep = duality.stirling_identity_check(w, alpha, cfg)
        stirling_ok = stirling_ok and rep.ok
        stirling_rows.append(
            alpha.components + (rep.ln_ratio, rep.ln_lower, rep.ok)
        )
    result.add("stirling_envelope", stirling_ok)
    result.artifacts.append(str(write_table(
        out_dir, "duality_stirling",
        [f"alpha_{j + 1}" for j in range(w.n)] + ["ln_ratio", "ln_lower", "passed"],
        stirling_rows, run.fmt,
    )))

    rng = np.random.default_rng(run.seed)
    bound_rows = []
    forward_ok = True
    inverse_ok = True
    ulp_worst = 0.0
    eq1_worst = 0.0
    for seq_id in range(100):
        b = duality.random_sequence(w.n, run.max_degree, rng)
        r1, r2 = duality.isomorphism_bound_check(b, table, table_star, krep.K_hat)
        forward_ok = forward_ok and r1.ok
        inverse_ok = inverse_ok and r2.ok
        ulp_worst = max(ulp_worst, duality.roundtrip_ulp_error(b, table))
        d = duality.forward_map(b, table)
        direct = duality._pairwise_desc_sum(
            math.exp(2.0 * (table.ln(a) + math.log(abs(v)) - a.log_factorial())
                     + table_star.ln(a))
            for a, v in b.items() if abs(v) > 0
        )
        eq1_worst = max(eq1_worst, abs(
            duality.norm_sq(d, table_star) / direct - 1.0
        ))
        bound_rows.append((seq_id, r1.lhs, r1.rhs, r1.ok, r2.lhs, r2.rhs, r2.ok))
    result.add("bounds_forward", forward_ok, f"M1={(2 * math.pi) ** w.n * (1 + math.factorial(w.n)) ** 2 * krep.K_hat!r}")
    result.add("bounds_inverse", inverse_ok)
    result.add("roundtrip_ulp", ulp_worst <= 4.0, f"worst_ulp={ulp_worst!r}")
    result.add("norm_identity_consistency", eq1_worst <= 1e-12, f"worst_rel={eq1_worst!r}")
    result.artifacts.append(str(write_table(
        out_dir, "duality_bounds",
        ["seq", "lhs_forward", "rhs_forward", "ok_forward",
         "lhs_inverse", "rhs_inverse", "ok_inverse"],
        bound_rows, run.fmt,
    )))

    _emit_checks(result, out_dir, run.fmt)
    result.wall_time = time.perf_counter() - t0
    return result


_COMMANDS = {
    "conjugate": cmd_conjugate,
    "identities": cmd_identities,
    "sandwich": cmd_sandwich,
    "moments": cmd_moments,
    "duality": cmd_duality,
}


def run_all(w: WeightFunction, cfg: NumericsConfig, run: RunConfig) -> list:
    results = []
    for name in ("conjugate", "identities", "sandwich", "moments", "duality"):
        results.append(_COMMANDS[name](w, cfg, run))
    summary = [
        (r.command, check_id, ok)
        for r in results
        for check_id, ok, _ in r.checks
    ]
    path = write_table(
        Path(run.out_dir), "summary", ["command", "check_id", "passed"],
        summary, run.fmt,
    )
    results[-1].artifacts.append(str(path))
    return results


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockdual",
        description="Verification suites for conjugation, Laplace bounds, "
                    "moments and the coefficient-level duality transform.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("conjugate", "identities", "sandwich", "moments", "duality", "all"):
        p = sub.add_parser(name)
        p.add_argument("--weight", dest="weight_path", default=None,
                       help="path to a JSON weight spec")
        p.add_argument("--weight-preset", dest="weight_preset", default=None,
                       help="catalog weight, e.g. fock:2 or power:4:1")
        p.add_argument("--degree", type=int, default=8,
                       help="moment/scan truncation degree")
        p.add_argument("--out", dest="out_dir", default="fockdual-out")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--refine", action="count", default=0,
                       help="halve grid steps (repeatable); identities also "
                            "check the residual shrink factor")
        p.add_argument("--volume-cells", type=int, default=None,
                       help="override cells per axis for grid volumes")
        p.add_argument("--tol-identity", type=float, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = RunConfig(
            weight_path=args.weight_path,
            weight_preset=args.weight_preset,
            max_degree=args.degree,
            out_dir=args.out_dir,
            fmt=args.fmt,
            seed=args.seed,
            refine=args.refine,
            volume_cells=args.volume_cells,
            tol_identity=args.tol_identity,
        )
        w = load_weight(run)
    except WeightSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    cfg = numerics_for(run)
    try:
        if args.command == "all":
            results = run_all(w, cfg, run)
        else:
            results = [_COMMANDS[args.command](w, cfg, run)]
    except (fenchel.DivergenceError, WeightSpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    total = sum(r.wall_time for r in results)
    ok = all(r.passed for r in results)
    print(f"{'all checks passed' if ok else 'CHECK FAILURES'} "
          f"({total:.1f}s)")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
