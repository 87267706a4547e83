"""End-to-end acceptance checks.

Each test is one criterion and `pytest -v` prints one pass/fail line per
criterion; the print() calls add the measured numbers for -s runs.  These
tests exercise the public API the way the worked examples do, at desk scale.
"""

import json
import math
import time

import numpy as np
import pytest

from torusmicro.charts import ProjectiveChart, ProjectivePoint, REGISTERED_CHART_FUNCTIONS, lift_check
from torusmicro.cli import main
from torusmicro.coisotropic import LinearCoisotropic, regularity_order
from torusmicro.fields import (
    TorusFunction,
    inner_product,
    l2_norm,
    make_plane_wave_family,
    make_uk_family,
    make_wavepacket_family,
)
from torusmicro.fitting import fit_loglog
from torusmicro.hamilton import (
    ChartSymbol,
    CodimTwoPolarField,
    cancellation_check,
    commutation_check,
    free_particle,
    make_x_perturbation,
    quartic_radial,
    taylor_split,
)
from torusmicro.profiles import (
    GaussianBumpProfile,
    PolynomialProfile,
    RadialPlateauProfile,
    SmoothstepHalflineProfile,
    coordinate_profile,
)
from torusmicro.quantize import (
    QuantizationKind,
    Symbol,
    apply,
    commutator_check,
    multiplier,
    symbol_product,
)
from torusmicro.wavefront import (
    ProbePoint,
    boundary_grid,
    interior_grid,
    verify_propagation,
    wf_scan,
)

SCHEDULE = [1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128]
KS = [8, 12, 16, 24, 32, 48, 64]
DIAG = (math.sqrt(0.5), math.sqrt(0.5))


def axes_c2_in_3() -> LinearCoisotropic:
    return LinearCoisotropic(3, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [[0.0, 0.0, 1.0]])


def skew_pair_in_4() -> LinearCoisotropic:
    return LinearCoisotropic(
        4,
        [[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]],
        [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]],
    )


def slope_clears(verdict, threshold: float) -> bool:
    return math.isinf(verdict.fit.slope) or verdict.fit.slope >= threshold


def test_criterion_01_second_wavefront_angular_scan():
    start = time.perf_counter()
    C = axes_c2_in_3()
    points = boundary_grid(C, xipp_lo=1.0, xipp_hi=1.0)
    assert len(points) == 8  # one ring of approach angles at the conserved value 1
    for ks, present_idx, flipped_idx in (
        (KS, 1, 5),
        ([-k for k in KS], 5, 1),
    ):
        fam = make_uk_family(3, ks)
        verdicts = wf_scan(fam, points)
        present = [i for i, v in enumerate(verdicts) if v.classification == "PRESENT"]
        assert present == [present_idx]
        for i, v in enumerate(verdicts):
            if i != present_idx:
                assert v.classification == "ABSENT"
        assert slope_clears(verdicts[flipped_idx], 4.0)
    elapsed = time.perf_counter() - start
    print(f"criterion 1: angular scans for both sign families in {elapsed:.2f}s")
    assert elapsed < 30.0


def test_criterion_02_interior_frequency_scan():
    fam = make_uk_family(3, KS)
    points = interior_grid(3)
    assert len(points) == 343
    verdicts = wf_scan(fam, points)
    target = np.array([0.0, 0.0, 1.0])
    n_present = 0
    for v in verdicts:
        xi0 = np.array(v.point.xi0)
        if v.classification == "PRESENT":
            n_present += 1
            assert float(np.max(np.abs(xi0 - target))) <= 0.5 + 1e-12
        if not 0.8 <= float(np.linalg.norm(xi0)) <= 1.2:
            assert v.classification == "ABSENT"
            assert slope_clears(v, 4.0)
    assert n_present >= 1
    print(f"criterion 2: {n_present} PRESENT cell(s), all within one window of (0,0,1)")


def test_criterion_03_directional_regularity_orders():
    C = axes_c2_in_3()
    tangential = make_plane_wave_family((0, 0, 1), SCHEDULE)
    rep = regularity_order(tangential, C, k_max=4)
    assert rep.coisotropic_order() == 4

    transverse = make_plane_wave_family((1, 0, 0), SCHEDULE)
    rep2 = regularity_order(transverse, C, k_max=1)
    assert rep2.coisotropic_order() == 0
    entry = rep2.entry((1, 0))
    assert not entry.bounded
    assert entry.exponent == pytest.approx(-1.0, abs=0.1)
    print(
        "criterion 3: tangential order 4; transverse fails at k=1 with "
        f"exponent {entry.exponent:.4f}"
    )


def _random_band8(rng) -> TorusFunction:
    coeffs = {}
    for _ in range(12):
        m = tuple(int(v) for v in rng.integers(-8, 9, 2))
        coeffs[m] = complex(rng.normal(), rng.normal())
    u = TorusFunction(2, 8, coeffs)
    return (1.0 / l2_norm(u)) * u


def test_criterion_04_quantization_algebra():
    a = Symbol(
        2,
        {
            (1, 0): GaussianBumpProfile((0.3, -0.2), (0.8, 1.1)),
            (0, -1): PolynomialProfile(2, {(1, 0): 0.5 + 0.25j, (0, 0): 1.0}),
            (0, 0): GaussianBumpProfile((0.0, 0.0), (1.0, 1.0)),
        },
    )
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(20):
        u = _random_band8(rng)
        v = _random_band8(rng)
        lhs = inner_product(apply(a, QuantizationKind.LEFT, u, 0.2), v)
        rhs = inner_product(u, apply(a.conjugate(), QuantizationKind.RIGHT, v, 0.2))
        worst = max(worst, abs(lhs - rhs))
    assert worst <= 1e-12

    bump = Symbol(1, {(1,): GaussianBumpProfile((0.0,), (math.sqrt(0.5),))})
    quad = multiplier(coordinate_profile(1, 0, power=2))
    probe = TorusFunction(1, 0, {(0,): 1.0})
    comm = commutator_check(bump, quad, [1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64], [probe])
    assert not comm.fit.is_sentinel
    assert comm.fit.slope >= 1.8

    w1 = multiplier(RadialPlateauProfile(1, None, 0.55, 0.04))
    w2 = multiplier(SmoothstepHalflineProfile((1.0,), offset=0.19, scale=0.05))
    w3 = multiplier(RadialPlateauProfile(1, None, 0.80, 0.04))
    u = _random_band8(rng)
    u1 = TorusFunction(1, 8, {(m[0],): c for m, c in u.coeffs.items()})
    h = 0.125
    ab = apply(w1, QuantizationKind.LEFT, apply(w2, QuantizationKind.LEFT, u1, h), h)
    ba = apply(w2, QuantizationKind.LEFT, apply(w1, QuantizationKind.LEFT, u1, h), h)
    assert ab.coeffs == ba.coeffs
    grouped_left = apply(symbol_product(symbol_product(w1, w2), w3), QuantizationKind.LEFT, u1, h)
    grouped_right = apply(symbol_product(w1, symbol_product(w2, w3)), QuantizationKind.LEFT, u1, h)
    assert grouped_left.coeffs == grouped_right.coeffs
    print(
        f"criterion 4: adjoint defect {worst:.3e}; commutator slope "
        f"{comm.fit.slope:.4f}; window algebra bitwise equal"
    )


def _random_chart_points(chart: ProjectiveChart, count: int, seed: int):
    rng = np.random.default_rng(seed)
    n, d = chart.C.dim, chart.C.codim
    points = []
    for _ in range(count):
        points.append(
            ProjectivePoint(
                x=tuple(float(c) for c in rng.uniform(0.0, 2.0 * math.pi, n)),
                zeta=float(rng.uniform(0.3, 1.5)),
                h_ratio=float(rng.uniform(0.05, 0.5)),
                slopes=tuple(float(c) for c in rng.uniform(-1.0, 1.0, d - 1)),
                normal=tuple(float(c) for c in rng.uniform(-1.5, 1.5, n - d)),
            )
        )
    return points


def test_criterion_05_chart_lift_identity():
    cases = [
        LinearCoisotropic(3, [[1.0, 0.5, 0.0]]),
        axes_c2_in_3(),
        LinearCoisotropic(4, [[1.0, 0.0, 0.5, 0.0]]),
        skew_pair_in_4(),
    ]
    worst = 0.0
    for idx, C in enumerate(cases):
        chart = ProjectiveChart(C)
        points = _random_chart_points(chart, 100, seed=40 + idx)
        for name in sorted(REGISTERED_CHART_FUNCTIONS):
            f = REGISTERED_CHART_FUNCTIONS[name]
            for axis in range(C.dim):
                check = lift_check(chart, axis, f, points)
                worst = max(worst, check.max_defect)
    assert worst <= 1e-6
    print(f"criterion 5: lift defect {worst:.3e} over 4 charts x 3 functions")


def test_criterion_06_split_coefficients_and_remainder():
    normal = (0.7, -0.4)
    gamma = (0.6, 0.8)
    CA = LinearCoisotropic(
        4,
        [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]],
        [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]],
    )
    split_a = taylor_split(free_particle(4), CA)
    assert np.array_equal(split_a.h1_velocity(normal), np.array([0.0, 0.0, 0.7, -0.4]))
    assert np.array_equal(
        split_a.h2_velocity(gamma, normal), np.array([0.6, 0.8, 0.0, 0.0])
    )
    assert np.array_equal(
        split_a.h2_tilde_coeffs(gamma, normal), np.array([0.6, 0.8, 0.0, 0.0])
    )

    CB = skew_pair_in_4()
    split_b = taylor_split(free_particle(4), CB)
    assert np.allclose(
        split_b.h1_velocity(normal), np.array([-0.7, 0.4, 0.7, -0.4]), atol=1e-15
    )
    assert np.allclose(
        split_b.h2_velocity(gamma, normal), np.array([0.6, 0.8, 0.0, 0.0]), atol=1e-15
    )
    inv_t_transpose = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, 0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0, 1.0],
        ]
    )
    expected_tilde = inv_t_transpose @ np.array([0.6, 0.8, 0.0, 0.0])
    assert np.allclose(split_b.h2_tilde_coeffs(gamma, normal), expected_tilde, atol=1e-15)

    # The quadratic remainder cancels identically; the quartic shows the
    # generic second-order vanishing that the fitted slope measures.
    for C in (CA, CB):
        assert float(np.max(np.abs(
            taylor_split(free_particle(4), C).remainder_velocity(0.3, gamma, normal)
        ))) <= 1e-15
        split_q = taylor_split(quartic_radial(4), C)
        rows = [
            (rho, float(np.max(np.abs(split_q.remainder_velocity(rho, gamma, normal)))))
            for rho in (0.4, 0.2, 0.1, 0.05, 0.025)
        ]
        fit = fit_loglog(rows)
        assert fit.slope == pytest.approx(2.0, abs=0.2)
    print(f"criterion 6: splits coefficient-exact; quartic remainder slope {fit.slope:.4f}")


def test_criterion_07_commutation_of_split_fields():
    split = taylor_split(free_particle(3), axes_c2_in_3())
    clean = commutation_check(split, samples=100, seed=3)
    assert clean.max_defect <= 1e-12
    pert = commutation_check(
        split,
        samples=100,
        seed=3,
        perturbation=make_x_perturbation(split.C, axis=2, amplitude=0.5),
    )
    assert pert.max_defect >= 1e-3
    print(
        f"criterion 7: clean bracket {clean.max_defect:.3e}, perturbed "
        f"{pert.max_defect:.3e}"
    )


def test_criterion_08_verdict_transport():
    C = axes_c2_in_3()
    fam = make_uk_family(3, [8, 16, 32, 64, 128])
    seeds = [
        ProbePoint.boundary((0.0,) * 3, DIAG, (1.0,), C),
        ProbePoint.boundary((0.0,) * 3, (0.0, 1.0), (1.0,), C),
    ]
    report = verify_propagation(fam, free_particle(3), C, seeds, t=0.7)
    assert report.certified
    assert report.verdict == "PASS"
    assert {row.branch for row in report.rows} == {"leading", "first-order"}
    assert all(row.agree for row in report.rows)

    bad = make_wavepacket_family((0.0,) * 3, (0, 0, 1), 2.0, SCHEDULE, mode_radius=3)
    bad_report = verify_propagation(bad, free_particle(3), C, [seeds[0]], t=0.7)
    assert not bad_report.certified
    assert bad_report.verdict == "FAIL"
    print(
        "criterion 8: shell family PASS on both branches; control family FAIL "
        f"(defect {bad_report.certification.max_norm:.3e})"
    )


def test_criterion_09_angular_cancellation_and_polar_field():
    worst_cancel = 0.0
    for p in (free_particle(3), quartic_radial(3)):
        check = cancellation_check(p, samples=100, seed=11)
        worst_cancel = max(worst_cancel, check.max_defect)
    assert worst_cancel <= 1e-8

    amp = 0.3

    def value(x1, x2, x3, rho, theta, xi3):
        q = rho * rho + xi3 * xi3
        return q * q / 4.0 + amp * math.sin(x1) * rho * rho

    field = CodimTwoPolarField(ChartSymbol(value), exponent=0.0)
    rng = np.random.default_rng(17)
    worst_field = 0.0
    for _ in range(100):
        state = {
            "x1": float(rng.uniform(0.0, 2.0 * math.pi)),
            "x2": float(rng.uniform(0.0, 2.0 * math.pi)),
            "x3": float(rng.uniform(0.0, 2.0 * math.pi)),
            "rho": float(rng.uniform(0.05, 1.2)),
            "theta": float(rng.uniform(0.0, 2.0 * math.pi)),
            "xi3": float(rng.uniform(-1.2, 1.2)),
        }
        rho, theta, xi3 = state["rho"], state["theta"], state["xi3"]
        xi = np.array([rho * math.cos(theta), rho * math.sin(theta), xi3])
        q = float(xi @ xi)
        dx = q * xi + amp * math.sin(state["x1"]) * np.array([2.0 * xi[0], 2.0 * xi[1], 0.0])
        xi_dot = np.array([-amp * math.cos(state["x1"]) * rho * rho, 0.0, 0.0])
        drho = math.cos(theta) * xi_dot[0] + math.sin(theta) * xi_dot[1]
        dtheta = (xi_dot[1] * math.cos(theta) - xi_dot[0] * math.sin(theta)) / rho
        expected = np.concatenate([dx, [drho, dtheta, xi_dot[2]]])
        got = field.unrescaled_velocity(state)
        worst_field = max(worst_field, float(np.max(np.abs(got - expected))))
    assert worst_field <= 1e-8
    print(
        f"criterion 9: cancellation defect {worst_cancel:.3e}, polar field "
        f"defect {worst_field:.3e}"
    )


def test_criterion_10_report_determinism(tmp_path, capsys):
    cfg = tmp_path / "scan.json"
    cfg.write_text(
        json.dumps(
            {
                "family": {"kind": "uk", "n": 3, "ks": [8, 16, 32, 64, 128]},
                "coisotropic": {
                    "dim": 3,
                    "v": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
                    "w": [[0.0, 0.0, 1.0]],
                },
                "scan": {"mode": "boundary", "lo": 1.0, "hi": 1.0},
                "expect": {"n_present": 1, "n_absent": 7},
            }
        )
    )
    rc1 = main(["wavefront", "--config", str(cfg)])
    first = capsys.readouterr().out
    rc2 = main(["wavefront", "--config", str(cfg)])
    second = capsys.readouterr().out
    assert rc1 == 0 and rc2 == 0
    assert first == second
    assert "summary: present=1 absent=7 inconclusive=0" in first
    print("criterion 10: two runs produced byte-identical report bodies")
