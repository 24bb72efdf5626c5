"""Acceptance suite: one test per top-level criterion, each printing a
PASS/FAIL line with its measured numbers.

Heavy criteria carry explicit wall-clock budgets and are parallelized over
the available cores.  One check (test_a07b) is a strict bound that the
exact dynamics of this model do not satisfy, because the coupling pair
omega12*omega23 mediates an effective direct coupling through the
far-detuned middle level; it is implemented as stated and left red rather
than loosened, with the measured value printed for inspection.
"""

import math
import os
import time
from dataclasses import replace
from itertools import product
from multiprocessing import get_context

import numpy as np
import pytest

from lz3._integrate import propagate_linear
from lz3.ica import ica_predict
from lz3.model import SystemParams
from lz3.propagate import (
    DensityMatrix4,
    StateVector,
    propagate_lindblad,
    propagate_nonhermitian,
    propagate_schrodinger,
    transfer_efficiency,
)
from lz3.spectrum import min_gap
from lz3.sweep import PRESET_NAMES, figure_preset, run_sweep
from lz3.ica import crossing_schedule, lz_probability

WORKERS = max(1, min(os.cpu_count() or 1, 8))


def report(name: str, ok: bool, detail: str):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def _subsample(axis, max_points=5):
    grid = axis.grid()
    if len(grid) <= max_points:
        return grid
    idx = np.unique(np.round(np.linspace(0, len(grid) - 1, max_points)).astype(int))
    return grid[idx]


def _hermitian_norm_error(args):
    params = SystemParams(**args)
    r = propagate_schrodinger(params, StateVector.basis(1), 1e-10, n_samples=0)
    return abs(r.final_state.population_total() - 1.0)


def test_a01_norm_conservation():
    """Hermitian propagation at tol=1e-10 keeps |norm^2 - 1| <= 1e-8 on a
    5x5 subsample of every figure preset, within one minute."""
    points = {}
    for name in PRESET_NAMES:
        spec = figure_preset(name)
        grids = [_subsample(axis) for axis in spec.axes]
        for combo in product(*grids):
            p = replace(
                spec.base,
                **{axis.name: float(v) for axis, v in zip(spec.axes, combo)},
            )
            key = (p.kappa, p.horizon, p.delta, p.omega12, p.omega23, p.omega13)
            points[key] = dict(
                kappa=p.kappa, horizon=p.horizon, delta=p.delta,
                omega12=p.omega12, omega23=p.omega23, omega13=p.omega13,
            )
    tasks = list(points.values())
    start = time.perf_counter()
    with get_context("fork").Pool(WORKERS) as pool:
        errors = pool.map(_hermitian_norm_error, tasks)
    elapsed = time.perf_counter() - start
    worst = max(errors)
    ok = worst <= 1e-8 and elapsed <= 60.0
    report(
        "norm-conservation",
        ok,
        f"{len(tasks)} preset points, worst |norm^2-1|={worst:.2e}, {elapsed:.1f}s",
    )


def _solver_pair_mismatch(seed):
    rng = np.random.default_rng(seed)
    kappa = rng.uniform(0.05, 0.3)
    params = SystemParams(
        kappa=kappa,
        horizon=rng.uniform(5.0, 15.0) / kappa,
        delta=rng.uniform(-3.0, 3.0),
        omega12=rng.uniform(0.0, 1.2),
        omega23=rng.uniform(0.0, 1.2),
        omega13=rng.uniform(0.0, 1.2),
        phi12=rng.uniform(0.0, 2 * math.pi),
        gamma2=rng.uniform(0.0, 0.1),
    )
    lind = propagate_lindblad(
        params, DensityMatrix4.from_state(StateVector.basis(1)), 1e-9, n_samples=0
    )
    nonh = propagate_nonhermitian(params, StateVector.basis(1), 1e-9, n_samples=0)
    return float(
        np.abs(lind.final_density.populations() - nonh.final_state.populations()).max()
    )


def test_a02_solver_cross_validation():
    """Lindblad (rates 2*Gamma) and non-Hermitian main-subspace populations
    agree to 1e-6 on 50 random draws, within two minutes."""
    start = time.perf_counter()
    with get_context("fork").Pool(WORKERS) as pool:
        mismatches = pool.map(_solver_pair_mismatch, range(50))
    elapsed = time.perf_counter() - start
    worst = max(mismatches)
    ok = worst <= 1e-6 and elapsed <= 120.0
    report(
        "solver-cross-validation",
        ok,
        f"50 draws, worst population mismatch={worst:.2e}, {elapsed:.1f}s",
    )


def test_a03_fig2a_reproduction():
    """Solid-line efficiency, decoupled flat line, and the weak-coupling
    asymmetry of the detuning sign."""
    base = dict(kappa=0.1, horizon=1000.0, omega23=1.0)
    strong = transfer_efficiency(
        SystemParams(**base, omega12=1.0, delta=4.0), 1e-8
    )
    decoupled = [
        transfer_efficiency(SystemParams(**base, omega12=0.0, delta=d), 1e-8)
        for d in (-4.0, -1.0, 0.0, 1.0, 4.0)
    ]
    weak_pos = transfer_efficiency(SystemParams(**base, omega12=0.1, delta=4.0), 1e-8)
    weak_neg = transfer_efficiency(SystemParams(**base, omega12=0.1, delta=-4.0), 1e-8)
    ok = (
        strong >= 0.99
        and max(decoupled) <= 1e-6
        and (weak_pos - weak_neg) >= 0.3
    )
    report(
        "fig2a-reproduction",
        ok,
        f"P3(omega12=1, delta=+4)={strong:.5f}, max decoupled P3={max(decoupled):.1e}, "
        f"weak-coupling split={weak_pos - weak_neg:.3f}",
    )


def test_a04_direct_crossing_formula():
    """The direct-crossing transfer formula matches the exact solver at
    large negative detuning."""
    params = SystemParams(
        kappa=0.1, horizon=1000.0, delta=-8.0, omega12=1.0, omega23=1.0, omega13=0.5
    )
    predicted = 1.0 - math.exp(-math.pi * 0.5**2 / 0.1)
    exact = transfer_efficiency(params, 1e-8)
    diff = abs(exact - predicted)
    report(
        "direct-crossing-formula",
        diff <= 0.05,
        f"exact={exact:.5f}, formula={predicted:.5f}, |diff|={diff:.4f}",
    )


def _two_level_asymptotic(omega_slope):
    """Asymptotic two-level transfer probability by exact propagation.

    A finite sweep leaves an oscillatory residue of order 1e-3 at these
    couplings (phase ~ slope*T^2/2, period 2*pi/(slope*T) in T); averaging
    the final population over one full period removes it, leaving only the
    secular ~1/(slope*T^2) tail.
    """
    omega, slope = omega_slope
    g0 = -1j * np.array([[0.0, omega], [omega, 0.0]], dtype=complex)
    g1 = -1j * np.diag([-slope / 2.0, slope / 2.0]).astype(complex)
    t0, n = 1000.0, 12
    period = 2.0 * math.pi / (slope * t0)
    acc = 0.0
    for k in range(n):
        T = t0 + k * period / n
        out = propagate_linear(g0, g1, np.array([1, 0], dtype=complex), -T, T, 1e-9)
        acc += abs(out["y"][1]) ** 2
    return acc / n


def test_a05_two_level_oracle():
    """The two-level crossing probability matches isolated exact propagation
    (asymptotic, period-averaged) to 1e-3 for both slopes."""
    kappa = 0.1
    cases = [(omega, slope) for omega in (0.1, 0.3, 0.5, 1.0)
             for slope in (kappa, 2 * kappa)]
    with get_context("fork").Pool(WORKERS) as pool:
        exact = pool.map(_two_level_asymptotic, cases)
    worst = max(
        abs(lz_probability(omega, slope) - value)
        for (omega, slope), value in zip(cases, exact)
    )
    report(
        "two-level-oracle",
        worst <= 1e-3,
        f"8 cases, worst |formula - propagation|={worst:.2e}",
    )


def test_a06_gap_invariances():
    """Minimum-gap invariance under kappa rescaling at fixed kappa*T, under
    phase triples with equal combination, and the location of the
    phase-combination minimum at pi."""
    base = dict(delta=1.2, omega12=1.0, omega23=1.0, omega13=0.4)
    g_slow = min_gap(SystemParams(kappa=0.1, horizon=1000.0, **base)).gap
    g_fast = min_gap(SystemParams(kappa=1.0, horizon=100.0, **base)).gap
    kappa_dev = abs(g_slow - g_fast)

    phases_a = dict(phi12=0.3, phi23=0.5, phi13=0.8)
    phases_b = dict(phi12=0.1, phi23=0.7, phi13=0.8)
    common = dict(kappa=0.1, horizon=1000.0, delta=0.4,
                  omega12=0.9, omega23=1.0, omega13=0.6)
    phase_dev = abs(
        min_gap(SystemParams(**common, **phases_a)).gap
        - min_gap(SystemParams(**common, **phases_b)).gap
    )

    combs = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
    gaps = [
        min_gap(
            SystemParams(kappa=0.1, horizon=1000.0, omega12=1.0, omega23=1.0,
                         omega13=1.0, phi12=float(c))
        ).gap
        for c in combs
    ]
    arg = combs[int(np.argmin(gaps))]
    step = combs[1] - combs[0]
    argmin_dev = abs(arg - math.pi)

    ok = kappa_dev <= 1e-9 and phase_dev <= 1e-12 and argmin_dev <= step + 1e-12
    report(
        "gap-invariances",
        ok,
        f"kappa rescale dev={kappa_dev:.1e}, phase dev={phase_dev:.1e}, "
        f"argmin offset from pi={argmin_dev:.3f} (step {step:.3f})",
    )


def test_a07a_dissipative_asymmetry():
    """With middle-level decay 0.025 and a direct (1,3) coupling, negative
    detuning beats positive detuning by at least 0.2."""
    base = dict(kappa=0.1, horizon=1000.0, omega12=1.0, omega23=1.0,
                omega13=0.5, gamma2=0.025)
    neg = transfer_efficiency(SystemParams(**base, delta=-3.0), 1e-8)
    pos = transfer_efficiency(SystemParams(**base, delta=3.0), 1e-8)
    split = neg - pos
    report(
        "dissipative-asymmetry",
        split >= 0.2,
        f"P3(delta=-3)={neg:.4f}, P3(delta=+3)={pos:.4f}, split={split:.3f}",
    )


def test_a07b_no_robustness_without_direct_coupling():
    """Stated bound: with the direct (1,3) coupling off, P3(delta=-3) at
    decay 0.025 should not exceed 0.1.

    The exact dynamics violate this: the coupling pair omega12*omega23
    mediates an effective (1,3) coupling of size omega12*omega23/|delta| =
    1/3 through the far-detuned middle level, which carries ~0.67 of the
    population across (cross-validated against an independent integrator).
    Kept red as stated rather than loosened.
    """
    params = SystemParams(
        kappa=0.1, horizon=1000.0, delta=-3.0, omega12=1.0, omega23=1.0,
        omega13=0.0, gamma2=0.025,
    )
    value = transfer_efficiency(params, 1e-8)
    report(
        "no-robustness-without-direct-coupling",
        value <= 0.1,
        f"P3(delta=-3, omega13=0, gamma2=0.025)={value:.4f}, bound 0.1",
    )


def test_a08_carrier_decay():
    """Decay on the initial carrier level destroys the transfer."""
    params = SystemParams(
        kappa=0.1, horizon=1000.0, delta=4.0, omega12=1.0, omega23=1.0, gamma1=0.025
    )
    value = transfer_efficiency(params, 1e-8)
    report("carrier-decay", value <= 0.01, f"P3 with gamma1=0.025: {value:.2e}")


def test_a09_zeno_revival():
    """Strong decay of the middle level dynamically decouples it and revives
    the direct-crossing transfer.

    The revival needs the residual leak through the decoupled level,
    roughly (4*omega12^2/kappa)*arctan(kappa*T/gamma2), to stay small at
    the large rate; the criterion leaves the horizon free, so kappa*T = 2.5
    is used (large enough to complete the 0.5-coupling crossing, whose LZ
    time scale is omega13/kappa = 5).
    """
    base = dict(kappa=0.1, horizon=25.0, delta=0.0, omega12=1.0, omega23=1.0,
                omega13=0.5)
    strong = transfer_efficiency(SystemParams(**base, gamma2=100.0), 1e-8)
    weak = transfer_efficiency(SystemParams(**base, gamma2=1.0), 1e-8)
    gain = strong - weak
    report(
        "zeno-revival",
        gain >= 0.1,
        f"P3(gamma=1e2)={strong:.4f}, P3(gamma=1e0)={weak:.4f}, gain={gain:.3f}",
    )


def _ica_draw(seed_and_sign):
    seed, sign = seed_and_sign
    rng = np.random.default_rng(1000 + seed)
    o12, o23, o13 = rng.uniform(0.1, 1.0, size=3)
    kappa = 0.1 * o23 * o23
    delta = sign * 8.0 * max(o12, o23, o13)
    params = SystemParams(
        kappa=kappa, horizon=100.0 * o23 / kappa, delta=delta,
        omega12=o12, omega23=o23, omega13=o13,
    )
    predicted = ica_predict(params).p3
    exact = transfer_efficiency(params, 1e-7)
    gap = min_gap(params)
    times = [e.time for e in crossing_schedule(params)]
    separation = abs(delta) / kappa
    near_crossing = min(abs(gap.t_min - t) for t in times) <= 0.25 * separation
    excluded = gap.margin < 1.0 and not near_crossing
    return abs(predicted - exact), excluded, predicted, exact


def test_a10_ica_vs_exact():
    """Composed crossing estimate within 0.05 of the exact solver on 20
    random draws at |delta| = 8*max(Omega), excluding points whose small
    minimum gap is unrelated to the scheduled crossings.

    The estimate's intrinsic error is of order xi = max(Omega)/|delta|:
    the far-detuned middle level mediates an extra effective coupling
    omega12*omega23/|delta|, which shifts the direct-crossing probability
    noticeably when omega13/omega23 falls in the sensitive window (~< 0.3)
    of the two-level formula.  The frozen sample behaves (worst ~0.01);
    resampled draws landing in that window can exceed the bound, so the
    per-draw numbers are printed for inspection.
    """
    tasks = [(i, -1 if i % 2 else 1) for i in range(20)]
    with get_context("fork").Pool(WORKERS) as pool:
        results = pool.map(_ica_draw, tasks)
    included = [r for r in results if not r[1]]
    worst = max(r[0] for r in included)
    lines = [
        f"draw {i}: |ica-exact|={r[0]:.3f} (ica={r[2]:.3f}, exact={r[3]:.3f})"
        f"{' [excluded]' if r[1] else ''}"
        for i, r in enumerate(results)
    ]
    print("\n" + "\n".join(lines))
    report(
        "ica-vs-exact",
        worst <= 0.05,
        f"{len(included)}/20 draws included, worst |ica-exact|={worst:.3f}",
    )


def test_a11_sweep_throughput():
    """A full 101x101 figure map completes within ten minutes with the
    available parallelism; the heavier slow-sweep class is also projected
    from a measured strip."""
    start = time.perf_counter()
    table = run_sweep(figure_preset("fig3b"), workers=WORKERS)
    full_elapsed = time.perf_counter() - start
    assert table.rows.shape == (101 * 101, 4)
    assert not np.any(table.rows[:, 3])

    strip = figure_preset("fig3a")
    strip.axes[0] = replace(strip.axes[0], count=2)
    start = time.perf_counter()
    run_sweep(strip, workers=WORKERS)
    strip_elapsed = time.perf_counter() - start
    projected = strip_elapsed / (2 * 101) * (101 * 101)
    ok = full_elapsed <= 600.0 and projected <= 600.0
    report(
        "sweep-throughput",
        ok,
        f"fig3b full map {full_elapsed:.0f}s with {WORKERS} workers, "
        f"fig3a projected {projected:.0f}s",
    )
