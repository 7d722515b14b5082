"""Acceptance criteria, each run at its stated tolerance.

Every criterion logs one ``CRITERION k: PASS|FAIL ...`` line, collected in
the terminal summary.  Criteria that the faithful implementation does not
meet are asserted as stated under ``xfail(strict=True)``; a companion test
pins down the measured failure mode so a silent change is still caught.
"""
from __future__ import annotations

import json
import time

import numpy as np
import pytest

from dirlip import testfns
from dirlip.approx import theorem1_pipeline
from dirlip.disc import Arc, ArcSet, BoundaryPointSet, carleson_integral, complement_arcs
from dirlip.factor import (
    DiscFunction,
    LogModulus,
    g_kernel,
    inner_outer_split,
    localized_outer_power,
    outer_from_modulus,
)
from dirlip.harness import (
    LEMMA_CHECKS,
    SectorContext,
    SweepConfig,
    default_localization,
    region_summary,
    rescale_to_unit,
    run_all,
    sector_arc,
    sweep_theorem2,
)
from dirlip.norms import aalpha_norm, dirichlet_energy_coeff, dirichlet_energy_quad

CANON = testfns.CANONICAL_ZEROS
TWO = testfns.TWO_ZERO_ZEROS


def _dump(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=1) + "\n").encode()


def _line(log, k, ok, detail):
    log(f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}")


# ---------------------------------------------------------------------------
# experiments shared with the determinism criterion


def sweep_experiment():
    cfg = SweepConfig(alpha=0.5, rho=1.5, N=4, grid_n=4096, seed=42, trials=50,
                      arc_counts=(8, 16, 32, 64))
    f = rescale_to_unit(testfns.canonical(cfg.grid_n), cfg.alpha)
    rep = sweep_theorem2(f, cfg, CANON)
    return rep, {"sweep.json": _dump(rep.to_dict()), "sweep.csv": rep.to_csv().encode()}


def lemma_experiment():
    out, files = {}, {}
    for name in ("canonical", "two_zero"):
        build, zeros = testfns.FAMILY[name]
        for n in (2 ** 12, 2 ** 13):
            cfg = SweepConfig(grid_n=n)
            f = rescale_to_unit(build(n), cfg.alpha)
            reps = run_all(f, sector_arc(zeros), cfg, default_localization(zeros), zeros,
                           LEMMA_CHECKS)
            out[name, n] = reps
            files[f"lemmas_{name}_{n}.json"] = _dump({k: r.to_dict() for k, r in reps.items()})
    return out, files


def pipeline_experiment():
    f = testfns.canonical(4096)
    eps = 0.1 * aalpha_norm(f, 0.5).aalpha
    run = theorem1_pipeline(f, alpha=0.5, M=3.0, eps=eps, N=6, schedule=range(1, 9), zeros=CANON)
    return run, {"approx.json": run.to_json().encode(), "approx.csv": run.to_csv().encode()}


def _timed(fn):
    t0 = time.perf_counter()
    res = fn()
    return res, time.perf_counter() - t0


@pytest.fixture(scope="module")
def sweep_run():
    return _timed(sweep_experiment)


@pytest.fixture(scope="module")
def lemma_run():
    return _timed(lemma_experiment)


@pytest.fixture(scope="module")
def pipeline_run():
    return _timed(pipeline_experiment)


# ---------------------------------------------------------------------------
# 1. norm oracles


def test_criterion_1_norm_oracles(acceptance_log):
    t0 = time.perf_counter()
    z5 = DiscFunction.from_coeffs(np.eye(6)[5], 256)
    e_coeff = abs(dirichlet_energy_coeff(z5).energy - 5)
    e_quad = abs(dirichlet_energy_quad(z5) - 5)
    e_norm = abs(aalpha_norm(DiscFunction.from_coeffs([0, 1], 256), 0.5).aalpha - 3)
    elapsed = time.perf_counter() - t0
    ok = e_coeff < 1e-12 and e_quad < 1e-6 and e_norm < 1e-8 and elapsed < 1.0
    _line(acceptance_log, 1, ok, f"|dD|coeff={e_coeff:.1e} |dD|quad={e_quad:.1e} "
                                 f"|d norm|={e_norm:.1e} t={elapsed:.2f}s")
    assert ok


# ---------------------------------------------------------------------------
# 2. outer reconstruction


def test_criterion_2_outer_reconstruction(acceptance_log):
    n = 1024
    theta = 2 * np.pi * np.arange(n) / n
    c = outer_from_modulus(LogModulus.from_samples(np.abs(2 + np.exp(1j * theta)))).coeffs.coeffs
    head = abs(c[0] - 2) + abs(c[1] - 1)
    tail = float(np.sum(np.abs(c[2:]) ** 2))
    defect = inner_outer_split(DiscFunction.from_function(lambda z: z * (2 + z), n)).defect
    ok = head < 1e-6 and tail < 1e-10 and defect < 1e-6
    _line(acceptance_log, 2, ok, f"head={head:.1e} tail={tail:.1e} defect={defect:.1e}")
    assert ok


# ---------------------------------------------------------------------------
# 3. kernel identities


def test_criterion_3_kernel_identities(acceptance_log):
    t0 = time.perf_counter()
    n, N = 2 ** 14, 4
    f = testfns.canonical(n, lam=30.0)
    L = LogModulus.from_samples(np.abs(f.boundary.values), 30.0)
    arcs = complement_arcs(CANON)
    rng = np.random.default_rng(42)
    z = (np.linspace(0.0, 0.9, 10)[:, None] * np.exp(2j * np.pi * np.arange(64) / 64)).ravel()
    fz, dfz = f(z), f.derivative(z)
    exact = -0.3 * ((1 - z) / 2) ** -0.4  # closed-form derivative, independent of the kernels
    closed = float(np.max(np.abs(dfz - exact) / np.abs(exact)))
    worst1 = worst2 = 0.0
    for _ in range(20):
        pick = rng.random(len(arcs)) < 0.5
        G = arcs.subset(np.flatnonzero(pick).tolist())
        Gc = arcs.subset(np.flatnonzero(~pick).tolist())
        gG, gC = g_kernel(L, G, z), g_kernel(L, Gc, z)
        worst1 = max(worst1, float(np.max(np.abs(dfz - fz * (gG + gC)) / np.abs(dfz))))
        P = localized_outer_power(L, G, N)
        lhs = P.derivative(z)
        rhs = N * P(z) * gG
        scale = np.maximum(np.abs(lhs), np.abs(rhs))
        rel = np.where(scale > 0, np.abs(lhs - rhs) / np.where(scale > 0, scale, 1), 0.0)
        worst2 = max(worst2, float(np.max(rel)))
    elapsed = time.perf_counter() - t0
    ok = worst1 < 1e-3 and worst2 < 1e-3 and closed < 1e-3 and elapsed < 60
    _line(acceptance_log, 3, ok, f"f'=f(gG+gC) rel={worst1:.1e} (f_G^N)'=N f_G^N gG rel={worst2:.1e} "
                                 f"f' vs closed form rel={closed:.1e} t={elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------------------
# 4. Carleson closed form


def test_criterion_4_carleson(acceptance_log):
    single = carleson_integral(BoundaryPointSet((0.0,))).value
    pts = 2 * np.pi * np.arange(64) / 64
    fat = carleson_integral(ArcSet(tuple(Arc(p - 0.25 / 64, 0.5 / 64) for p in pts)))
    ok = abs(single) < 1e-3 and fat.diverged
    _line(acceptance_log, 4, ok, f"C({{0}})={single:.2e} fattened diverged={fat.diverged}")
    assert ok


# ---------------------------------------------------------------------------
# 5. random-arc sweep


@pytest.mark.xfail(strict=True, reason="max column grows > 10% per doubling (ledger: sweep analysis)")
def test_criterion_5_sweep(sweep_run, acceptance_log):
    (rep, _), elapsed = sweep_run
    ok = rep.verdict and elapsed < 300
    maxima = ", ".join(f"{r.arc_count}:{r.max:.4f}" for r in rep.rows)
    growth = ", ".join(f"{g:.3f}" for g in rep.growth)
    _line(acceptance_log, 5, ok, f"max ratio={rep.max_ratio:.2f} (cap 5) growth=[{growth}] "
                                 f"max=[{maxima}] t={elapsed:.0f}s")
    assert ok


def test_criterion_5_failure_mode_reproduced(sweep_run):
    (rep, _), elapsed = sweep_run
    assert elapsed < 300
    assert rep.max_ratio <= 5.0  # the bound relative to ||f^rho|| holds
    assert rep.growth[0] > 1.1  # the first doubling breaks the 10% growth rule
    assert rep.split_points == 63  # jumps of |f_Gamma| at arc ends that are not zeros
    assert [r.arc_count for r in rep.rows] == [8, 16, 32, 64]


# ---------------------------------------------------------------------------
# 6. lemma suite


def test_criterion_6_lemma_suite(lemma_run, acceptance_log):
    (reps, _), elapsed = lemma_run
    problems, vacuous = [], set()
    for name in ("canonical", "two_zero"):
        coarse, fine = reps[name, 2 ** 12], reps[name, 2 ** 13]
        for check in LEMMA_CHECKS:
            a, b = coarse[check], fine[check]
            if not (a.passed and b.passed):
                problems.append(f"{name}/{check} failed")
            if a.node_count == 0 and b.node_count == 0:
                vacuous.add(f"{name}/{check}")
                continue
            top = max(a.empirical_constant, b.empirical_constant)
            if top > 0 and abs(a.empirical_constant - b.empirical_constant) / top >= 0.1:
                problems.append(f"{name}/{check} unstable")
    worst = max(r.empirical_constant for d in reps.values() for r in d.values())
    ok = not problems
    _line(acceptance_log, 6, ok, f"max constant={worst:.3f} (cap 100) vacuous={sorted(vacuous)} "
                                 f"t={elapsed:.0f}s {'; '.join(problems)}")
    assert ok


def test_criterion_6_middle_region_checks_on_fast_decay():
    # supplementary: the region-22 statements are empty at clamp 30 on both test
    # functions; this function populates the region and exercises them
    f = rescale_to_unit(testfns.fast_decay(4096), 0.5)
    reps = run_all(f, sector_arc(TWO), SweepConfig(), default_localization(TWO), TWO,
                   ["LEM6", "LEM7", "D22"])
    for rep in reps.values():
        assert rep.node_count > 0 and not rep.degenerate and rep.passed


# ---------------------------------------------------------------------------
# 7. approximation pipeline


@pytest.mark.xfail(strict=True, reason="pinching error floors above eps at grid scale (ledger)")
def test_criterion_7_pipeline(pipeline_run, acceptance_log):
    (run, _), elapsed = pipeline_run
    slopes = [s.decay_slope for s in run.steps]
    ok = (run.terminal_error < run.eps and all(np.isfinite(s.C_m) for s in run.steps)
          and min(slopes) >= 2.5 and elapsed < 600)
    totals = ", ".join(f"{s.err_total:.3f}" for s in run.steps)
    _line(acceptance_log, 7, ok, f"terminal={run.terminal_error:.4f} eps={run.eps:.4f} "
                                 f"totals=[{totals}] min slope={min(slopes):.2f} t={elapsed:.0f}s")
    assert ok


def test_criterion_7_failure_mode_reproduced(pipeline_run):
    (run, _), elapsed = pipeline_run
    steps = run.steps
    assert elapsed < 600
    totals = [s.err_total for s in steps]
    assert all(b < a for a, b in zip(totals, totals[1:]))  # the total error decreases
    assert all(np.isfinite(s.C_m) and s.decay_slope >= 2.5 for s in steps)
    assert all(s.vanishes_on_zeros for s in steps)
    assert all(s.err_total <= s.err_power + s.err_convex + s.err_pinch + 1e-9 for s in steps)
    # the pinching piece alone stays above the budget left after the first two
    assert not any(s.pinch_reached for s in steps[1:])
    assert steps[-1].err_pinch > run.eps - steps[-1].err_power - steps[-1].err_convex


# ---------------------------------------------------------------------------
# 8. region machinery


def test_criterion_8_regions(acceptance_log):
    details, ok = [], True
    for name, zeros in [("canonical", CANON), ("two_zero", TWO), ("fast_decay", TWO)]:
        f = rescale_to_unit(testfns.FAMILY[name][0](4096), 0.5)
        ctx = SectorContext(f, sector_arc(zeros), default_localization(zeros), SweepConfig())
        s = region_summary(ctx)
        mu_nodes = ctx.mu_points[1].size
        good = s.partition_ok and s.d23_max_ratio <= 1.1 and s.d22_max_ratio <= 1.1
        ok &= good
        details.append(f"{name}: D23 n={s.counts['D23']} max|f|/d^8={s.d23_max_ratio:.2g} "
                       f"D22(d<=1/2) n={mu_nodes} max|f(mu z)|/d^2={s.d22_max_ratio:.2g}")
    _line(acceptance_log, 8, ok, "; ".join(details))
    assert ok


# ---------------------------------------------------------------------------
# 9. determinism


def test_criterion_9_determinism(sweep_run, lemma_run, pipeline_run, acceptance_log):
    first = {**sweep_run[0][1], **lemma_run[0][1], **pipeline_run[0][1]}
    second = {**sweep_experiment()[1], **lemma_experiment()[1], **pipeline_experiment()[1]}
    differing = sorted(k for k in first if first[k] != second[k])
    ok = not differing and set(first) == set(second)
    _line(acceptance_log, 9, ok, f"{len(first)} files compared byte-for-byte; differing={differing}")
    assert ok
