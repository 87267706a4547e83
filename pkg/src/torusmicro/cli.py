"""Command-line interface.

Exit codes: 0 on success (and on met expectations), 1 when a verdict or
expectation fails, 2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .charts import (
    ChartDomainError,
    PolarChart,
    PolarPoint,
    ProjectiveChart,
    REGISTERED_CHART_FUNCTIONS,
    lift_check,
)
from .coisotropic import regularity_norm, regularity_order
from .config import ConfigError, ExperimentConfig, build_probe_point, load_config
from .fields import TorusFunction, inner_product, l2_norm, make_uk_family
from .hamilton import cancellation_check, free_particle
from .profiles import GaussianBumpProfile, PolynomialProfile, coordinate_profile
from .quantize import (
    QuantizationKind,
    Symbol,
    adjoint_apply,
    apply,
    commutator_check,
    compose_numeric,
    multiplier,
)
from .report import RunReport, timed_header, write_csv, write_text
from .wavefront import (
    boundary_grid,
    classify,
    decay_fit,
    interior_grid,
    probe_symbol,
    quasimode_defect_symbol,
    verify_propagation,
    wf_scan,
)

_THREAD_ENV = "TORUSMICRO_THREADS"


def _apply_thread_env() -> None:
    """Honor TORUSMICRO_THREADS by capping the usual BLAS pool variables."""
    wanted = os.environ.get(_THREAD_ENV)
    if not wanted:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, wanted)


def _emit(report: RunReport, args) -> None:
    if getattr(args, "out", None):
        write_text(args.out, report.full_text())
    print(report.body_text(), end="")


def _fmt_slope(v: float) -> str:
    return "inf" if math.isinf(v) else f"{v + 0.0:.4f}"


def _cmd_regularity(args) -> int:
    cfg = load_config(args.config)
    fam = cfg.family()
    C = cfg.coisotropic()
    opts = cfg.section("regularity") or {}
    report = RunReport(
        f"regularity: family={fam.label} codim={C.codim}",
        header_lines=timed_header(__version__, command="regularity", seed=args.seed),
    )
    rep = regularity_order(
        fam,
        C,
        s=float(opts.get("s", 0.0)),
        k_max=int(opts.get("k_max", 3)),
        exponent_tol=float(opts.get("exponent_tol", 0.1)),
        ratio_tol=float(opts.get("ratio_tol", 1.2)),
    )
    report.add(*rep.to_text().splitlines())
    _emit(report, args)
    if args.csv:
        write_csv(args.csv, rep.to_csv_rows())
    expect = cfg.section("expect") or {}
    if "order" in expect and rep.coisotropic_order() != int(expect["order"]):
        print(
            f"expectation failed: order {rep.coisotropic_order()} != {int(expect['order'])}",
            file=sys.stderr,
        )
        return 1
    return 0


def _cmd_wavefront(args) -> int:
    cfg = load_config(args.config)
    fam = cfg.family()
    widths = cfg.widths()
    thresholds = cfg.thresholds()
    m, l = cfg.orders()
    scan = cfg.section("scan") or {"mode": "interior"}
    mode = scan.get("mode", "interior")
    x0 = scan.get("x0")
    if mode == "interior":
        points = interior_grid(
            fam.dim,
            x0=x0,
            lo=float(scan.get("lo", -1.5)),
            hi=float(scan.get("hi", 1.5)),
            spacing=float(scan.get("spacing", 0.5)),
            widths=widths,
        )
    elif mode == "boundary":
        C = cfg.coisotropic()
        points = boundary_grid(
            C,
            x0=x0,
            n_angles=int(scan.get("n_angles", 8)),
            xipp_lo=float(scan.get("lo", -1.5)),
            xipp_hi=float(scan.get("hi", 1.5)),
            xipp_spacing=float(scan.get("spacing", 0.5)),
            widths=widths,
        )
    else:
        raise ConfigError(f"unknown scan mode {mode!r}")
    report = RunReport(
        f"wavefront scan: family={fam.label} mode={mode} m={m:.6g} l={l:.6g}",
        header_lines=timed_header(__version__, command="wavefront", seed=args.seed),
    )
    verdicts = wf_scan(fam, points, m, l, thresholds)
    counts = {"PRESENT": 0, "ABSENT": 0, "INCONCLUSIVE": 0}
    for v in verdicts:
        counts[v.classification] += 1
        report.add(v.line())
    report.add(
        "summary: present={PRESENT} absent={ABSENT} inconclusive={INCONCLUSIVE}".format(
            **counts
        )
    )
    _emit(report, args)
    if args.csv:
        rows = [["label", "slope", "residual_rms", "classification", "order"]]
        for v in verdicts:
            rows.append(
                [
                    v.point.label(),
                    _fmt_slope(v.fit.slope),
                    f"{v.fit.residual_rms:.6e}" if not v.fit.is_sentinel else "nan",
                    v.classification,
                    "" if v.order is None else ("inf" if math.isinf(v.order) else f"{v.order:.0f}"),
                ]
            )
        write_csv(args.csv, rows)
    expect = cfg.section("expect") or {}
    for key, name in (
        ("n_present", "PRESENT"),
        ("n_absent", "ABSENT"),
        ("n_inconclusive", "INCONCLUSIVE"),
    ):
        if key in expect and counts[name] != int(expect[key]):
            print(
                f"expectation failed: {key} {counts[name]} != {int(expect[key])}",
                file=sys.stderr,
            )
            return 1
    return 0


def _cmd_propagate(args) -> int:
    cfg = load_config(args.config)
    fam = cfg.family()
    C = cfg.coisotropic()
    p = cfg.symbol()
    widths = cfg.widths()
    thresholds = cfg.thresholds()
    seeds_cfg = cfg.raw.get("seeds")
    if not seeds_cfg:
        raise ConfigError("propagate needs a nonempty 'seeds' list")
    seeds = [build_probe_point(d, C, widths) for d in seeds_cfg]
    flow_opts = cfg.section("flow") or {}
    report = RunReport(
        f"propagation: family={fam.label}",
        header_lines=timed_header(__version__, command="propagate", seed=args.seed),
    )
    rep = verify_propagation(
        fam,
        p,
        C,
        seeds,
        t=float(flow_opts.get("t", 0.7)),
        config=thresholds,
        energy=float(flow_opts.get("energy", 0.5)),
        certify_slope=float(flow_opts.get("certify_slope", 2.0)),
        collar=float(flow_opts.get("collar", 0.5)),
        dt=float(flow_opts.get("dt", 1e-3)),
        leading_orders=tuple(flow_opts.get("leading_orders", (0.0, 0.0))),
        first_orders=tuple(flow_opts.get("first_orders", (2.0, -1.0))),
    )
    report.add(*rep.to_text().splitlines())
    _emit(report, args)
    expect = cfg.section("expect") or {}
    if "verdict" in expect:
        return 0 if rep.verdict == expect["verdict"] else 1
    return 0 if rep.verdict == "PASS" else 1


def _cmd_flow(args) -> int:
    from .hamilton import flow as run_flow, taylor_split

    cfg = load_config(args.config)
    C = cfg.coisotropic()
    p = cfg.symbol()
    split = taylor_split(p, C)
    start_cfg = cfg.require("start")
    start = PolarPoint(
        tuple(float(c) for c in start_cfg["x0"]),
        float(start_cfg.get("rho", 0.0)),
        tuple(float(c) for c in start_cfg["gamma"]),
        tuple(float(c) for c in start_cfg["normal"]),
    )
    flow_opts = cfg.section("flow") or {}
    name = flow_opts.get("field", "leading")
    if name == "leading":
        field = split.as_h1_field()
    elif name == "first-order":
        field = split.as_h2_field(collar=float(flow_opts.get("collar", 0.5)))
    elif name == "full":
        field = split.as_full_field()
    else:
        raise ConfigError(f"unknown flow field {name!r}")
    report = RunReport(
        f"flow: symbol={p.label} field={name}",
        header_lines=timed_header(__version__, command="flow", seed=args.seed),
    )
    traj = run_flow(field, start, float(flow_opts.get("t", 0.7)), dt=float(flow_opts.get("dt", 1e-3)))
    report.add(f"steps: {len(traj.times) - 1}")
    final = traj.final()
    report.add("final x=" + ", ".join(f"{c:.12g}" for c in final.x))
    _emit(report, args)
    if args.csv:
        write_csv(args.csv, traj.to_csv_rows())
    return 0


def _cmd_chart(args) -> int:
    cfg = load_config(args.config)
    C = cfg.coisotropic()
    xi = tuple(float(s) for s in args.xi.split(","))
    x = (
        tuple(float(s) for s in args.x.split(","))
        if args.x
        else (0.0,) * C.dim
    )
    report = RunReport(
        f"chart: codim={C.codim} pivot={args.pivot} sign={args.sign}",
        header_lines=timed_header(__version__, command="chart", seed=args.seed),
    )
    proj = ProjectiveChart(C, pivot=args.pivot, sign=args.sign)
    try:
        pt = proj.to_projective(x, xi, args.h)
    except ChartDomainError as exc:
        print(f"chart error: {exc}", file=sys.stderr)
        return 1
    report.add(
        f"projective: zeta={pt.zeta:.12g} H={pt.h_ratio:.12g} "
        f"slopes=({', '.join(f'{c:.12g}' for c in pt.slopes)}) "
        f"normal=({', '.join(f'{c:.12g}' for c in pt.normal)})"
    )
    x_back, xi_back, h_back = proj.from_projective(pt)
    defect = max(
        float(np.max(np.abs(np.asarray(xi_back) - np.asarray(xi)))),
        abs(h_back - args.h),
    )
    report.add(f"projective roundtrip defect: {defect:.3e}")
    polar = PolarChart(C)
    try:
        pp = polar.to_polar(x, xi)
        report.add(
            f"polar: rho={pp.rho:.12g} "
            f"gamma=({', '.join(f'{c:.12g}' for c in pp.gamma)}) "
            f"normal=({', '.join(f'{c:.12g}' for c in pp.normal)})"
        )
    except ChartDomainError as exc:
        report.add(f"polar: undefined ({exc})")
    _emit(report, args)
    return 0


def _cmd_quantize(args) -> int:
    cfg = load_config(args.config)
    fam = cfg.family()
    widths = cfg.widths()
    thresholds = cfg.thresholds()
    m, l = cfg.orders()
    C = cfg.coisotropic() if cfg.section("coisotropic") else None
    point = build_probe_point(cfg.require("probe_point"), C, widths)
    report = RunReport(
        f"quantize: family={fam.label} {point.label()}",
        header_lines=timed_header(__version__, command="quantize", seed=args.seed),
    )
    df = decay_fit(fam, probe_symbol(point), thresholds.quantization)
    verdict = classify(fam, point, m, l, thresholds)
    for h, norm in df.table:
        report.add(f"h={h:.10g} norm={norm:.12e}")
    report.add(
        f"fit: slope={_fmt_slope(df.fit.slope)} "
        f"residual_rms={df.fit.residual_rms:.6e} n_used={df.fit.n_used}"
    )
    report.add(f"verdict: {verdict.line()}")
    _emit(report, args)
    if args.csv:
        rows = [["h", "norm"]] + [[repr(h), repr(v)] for h, v in df.table]
        write_csv(args.csv, rows)
    return 0


def _random_function(rng, dim: int, band: int) -> TorusFunction:
    coeffs = {}
    for _ in range(6):
        m = tuple(int(v) for v in rng.integers(-band, band + 1, dim))
        coeffs[m] = complex(rng.normal(), rng.normal())
    u = TorusFunction(dim, band, coeffs)
    return (1.0 / l2_norm(u)) * u


def _selftest_checks(perturb: bool, seed: int):
    """Yield (name, ok, detail) for each internal consistency check."""
    shift2 = (0.1, 0.0)
    rng = np.random.default_rng(seed)

    # Adjoint identity <Op(a)u, v> == <u, Op(a)* v> for all three rules.
    psi2 = GaussianBumpProfile((0.3, -0.2), (0.8, 1.1))
    a2 = Symbol(
        2,
        {
            (1, 0): psi2,
            (0, -1): PolynomialProfile(2, {(1, 0): 0.5 + 0.25j, (0, 0): 1.0}),
            (0, 0): GaussianBumpProfile((0.0, 0.0), (1.0, 1.0)),
        },
    )
    worst = 0.0
    for _ in range(4):
        u = _random_function(rng, 2, 3)
        v = _random_function(rng, 2, 3)
        for kind in QuantizationKind:
            lhs = inner_product(apply(a2, kind, u, 0.2), v)
            if perturb:
                swapped = {
                    QuantizationKind.LEFT: QuantizationKind.RIGHT,
                    QuantizationKind.RIGHT: QuantizationKind.LEFT,
                    QuantizationKind.WEYL: QuantizationKind.WEYL,
                }[kind]
                av = apply(a2.conjugate(), swapped, v, 0.2, _eval_shift=shift2)
            else:
                av = adjoint_apply(a2, kind, v, 0.2)
            worst = max(worst, abs(lhs - inner_product(u, av)))
    yield "adjoint identity", worst <= 1e-12, f"max defect {worst:.3e}"

    # Composition defect of a frequency multiplier against an x-mode symbol
    # decays at first order; the table is h exactly for this pair.
    xi_mult = multiplier(coordinate_profile(1, 0))
    bump = Symbol(1, {(1,): GaussianBumpProfile((0.0,), (math.sqrt(0.5),))})
    probe = TorusFunction(1, 0, {(0,): 1.0})
    hs = [2.0 ** (-j) for j in range(3, 8)]
    comp = compose_numeric(xi_mult, bump, QuantizationKind.LEFT, hs, [probe])
    ok = not comp.fit.is_sentinel and abs(comp.fit.slope - 1.0) <= 0.05
    yield "composition defect slope", ok, f"slope {_fmt_slope(comp.fit.slope)}"

    # Commutator residual against the Poisson bracket correction decays at
    # second order.  The perturbed run displaces the correction's evaluation
    # points, which knocks the residual down to first order.
    quad = multiplier(coordinate_profile(1, 0, power=2))
    if perturb:
        from .quantize import poisson_bracket
        from .fitting import fit_loglog

        bracket = poisson_bracket(bump, quad)
        rows = []
        for h in hs:
            ab = apply(bump, QuantizationKind.LEFT, apply(quad, QuantizationKind.LEFT, probe, h), h)
            ba = apply(quad, QuantizationKind.LEFT, apply(bump, QuantizationKind.LEFT, probe, h), h)
            corr = apply(bracket, QuantizationKind.LEFT, probe, h, _eval_shift=(0.1,))
            rows.append((h, l2_norm((ab - ba) - (h / 1j) * corr)))
        fit = fit_loglog(rows, zero_tol=1e-14)
        slope = fit.slope
    else:
        comm = commutator_check(bump, quad, hs, [probe])
        slope = comm.fit.slope
    ok = not math.isinf(slope) and abs(slope - 2.0) <= 0.05
    yield "commutator bracket slope", ok, f"slope {_fmt_slope(slope)}"

    # Frozen directional-regularity norm.
    u = TorusFunction(3, 7, {(3, 4, 7): 1.0})
    C3 = _standard_axes_c3()
    got = regularity_norm(u, C3, k=1, s=0.0, h=0.1)
    ok = abs(got - math.sqrt(1.25)) <= 1e-12
    yield "regularity norm frozen value", ok, f"got {got:.15f}"

    # Projective chart: frozen example and the derivative lift identity.
    chart = ProjectiveChart(C3, pivot=1)
    pt = chart.to_projective((0.0, 0.0, 0.0), (2.0, 1.0, 5.0), 0.5)
    frozen_ok = (
        pt.zeta == 2.0
        and pt.h_ratio == 0.25
        and pt.slopes == (0.5,)
        and pt.normal == (5.0,)
    )
    sample = chart.to_projective((0.0, 0.0, 0.0), (1.2, -0.7, 0.9), 0.05)
    lc = lift_check(chart, axis=0, f=REGISTERED_CHART_FUNCTIONS["full-mix"], points=[sample])
    ok = frozen_ok and lc.max_defect <= 1e-6
    yield "projective chart and lift", ok, f"lift defect {lc.max_defect:.3e}"

    # Polar-chart angular cancellation for the free particle.
    cc = cancellation_check(free_particle(3), samples=20, seed=seed)
    ok = cc.max_defect <= 1e-8
    yield "polar angular cancellation", ok, f"max defect {cc.max_defect:.3e}"

    # The standard concentrating family solves the shell equation to float
    # roundoff (h*|m| squares back to 1 only up to epsilon).
    fam = make_uk_family(3, [8, 16, 24, 32, 40])
    q = quasimode_defect_symbol(free_particle(3))
    df = decay_fit(fam, q, QuantizationKind.RIGHT)
    ok = df.max_norm <= 1e-12
    yield "shell quasimode defect", ok, f"max defect {df.max_norm:.3e}"


def _standard_axes_c3():
    from .coisotropic import LinearCoisotropic

    return LinearCoisotropic(3, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [[0.0, 0.0, 1.0]])


def _cmd_selftest(args) -> int:
    failures = 0
    for name, ok, detail in _selftest_checks(args.perturb_quantization, args.seed or 0):
        status = "ok" if ok else "FAIL"
        print(f"{status} - {name} ({detail})")
        if not ok:
            failures += 1
    if args.perturb_quantization:
        print("note: quantization rule deliberately perturbed; failures expected")
    print(f"selftest: {'PASS' if failures == 0 else f'{failures} failure(s)'}")
    return 0 if failures == 0 else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusmicro",
        description="Exact torus quantization and coisotropic concentration measurements.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, config: bool = True) -> None:
        if config:
            p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", help="write the full report (with header) to this file")
        p.add_argument("--csv", help="write machine-readable rows to this CSV file")
        p.add_argument("--seed", type=int, default=None, help="seed for randomized checks")

    p = sub.add_parser("regularity", help="directional-regularity exponent table")
    common(p)
    p.set_defaults(fn=_cmd_regularity)

    p = sub.add_parser("wavefront", help="grid scan of decay-rate verdicts")
    common(p)
    p.set_defaults(fn=_cmd_wavefront)

    p = sub.add_parser("propagate", help="verdict transport along the split flows")
    common(p)
    p.set_defaults(fn=_cmd_propagate)

    p = sub.add_parser("flow", help="integrate one split field and export the path")
    common(p)
    p.set_defaults(fn=_cmd_flow)

    p = sub.add_parser("chart", help="print blowup coordinates of a frequency point")
    common(p)
    p.add_argument("--xi", required=True, help="comma-separated frequency, e.g. 2,1,5")
    p.add_argument("--h", type=float, required=True, help="semiclassical scale")
    p.add_argument("--x", default=None, help="comma-separated base point (default 0)")
    p.add_argument("--pivot", type=int, default=1, help="1-based pivot generator")
    p.add_argument("--sign", type=int, default=1, choices=(-1, 1))
    p.set_defaults(fn=_cmd_chart)

    p = sub.add_parser("quantize", help="norm table of one probe across the family")
    common(p)
    p.set_defaults(fn=_cmd_quantize)

    p = sub.add_parser("selftest", help="internal consistency checks")
    common(p, config=False)
    p.add_argument(
        "--perturb-quantization",
        action="store_true",
        help="displace symbol evaluation points; the exactness checks must then fail",
    )
    p.set_defaults(fn=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    _apply_thread_env()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
