"""Tail localization, convex selection, pinching factors and the approximation pipeline."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .disc import (
    TWO_PI,
    AnnularGrid,
    ArcSet,
    BoundaryGrid,
    BoundaryPointSet,
    analyze,
    circle_values,
    complement_arcs,
    distance_to_set,
    tail_arcs,
)
from .errors import DirlipError, FactorizationError, HypothesisError, PinchError
from .factor import (
    DiscFunction,
    LogModulus,
    blaschke_eval,
    BlaschkeProduct,
    inner_outer_split,
    outer_from_modulus,
    outer_power,
    product_potential,
)
from .norms import aalpha_norm, lip_radii
from .testfns import zero_set

_ANGLE_MATCH = 1e-9


# ---------------------------------------------------------------------------
# Convex selection in the Dirichlet metric


@dataclass(frozen=True)
class SimplexWeights:
    """Convex weights with the achieved Dirichlet-norm distance."""

    weights: np.ndarray
    distance: float
    iterations: int
    converged: bool

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < -1e-15) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))


def dirichlet_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """``sum (1 + k) a_k conj(b_k)``, the inner product behind ``||.||_D``."""
    m = min(a.size, b.size)
    k = np.arange(m)
    return complex(np.sum((1 + k) * a[:m] * np.conj(b[:m])))


def convex_approx(candidates, target: DiscFunction, budget: int = 500,
                  tol: float = 1e-6) -> SimplexWeights:
    """Nearest point to ``target`` in the convex hull of ``candidates``.

    Frank-Wolfe iteration with away steps and exact line search on the
    quadratic ``||sum c_i v_i - t||_D^2``; all work happens on the Gram
    matrix of the candidates.  Iteration stops when the duality gap falls
    below ``tol`` times ``||t||_D^2`` or after ``budget`` steps.
    """
    if len(candidates) == 0:
        raise DirlipError("convex_approx needs at least one candidate")
    vecs = [c.coeffs.coeffs for c in candidates]
    t = target.coeffs.coeffs
    k = len(vecs)
    G = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            G[i, j] = G[j, i] = dirichlet_inner(vecs[i], vecs[j]).real
    b = np.array([dirichlet_inner(v, t).real for v in vecs])
    tt = dirichlet_inner(t, t).real
    scale = max(tt, np.max(np.diag(G)), 1e-300)

    def objective(c):
        return float(c @ G @ c - 2.0 * b @ c + tt)

    vertex_vals = np.diag(G) - 2.0 * b + tt
    c = np.zeros(k)
    c[int(np.argmin(vertex_vals))] = 1.0
    it, converged = 0, False
    while it < budget:
        grad = 2.0 * (G @ c - b)
        s = int(np.argmin(grad))
        gap = float(grad @ c - grad[s])
        if gap <= tol * scale:
            converged = True
            break
        active = np.flatnonzero(c > 0)
        a = int(active[np.argmax(grad[active])])
        away_gain = float(grad[a] - grad @ c)
        if gap >= away_gain or c[a] >= 1.0:
            d = -c.copy()
            d[s] += 1.0
            step_max = 1.0
        else:
            d = c.copy()
            d[a] -= 1.0
            step_max = c[a] / (1.0 - c[a])
        curv = float(d @ G @ d)
        slope = float(grad @ d)
        step = step_max if curv <= 0 else min(step_max, max(0.0, -slope / (2.0 * curv)))
        c = c + step * d
        c[c < 1e-18] = 0.0
        c /= c.sum()
        it += 1
    dist = math.sqrt(max(objective(c), 0.0))
    return SimplexWeights(c, dist, it, converged)


def combine(weights, functions) -> DiscFunction:
    """``sum w_i f_i`` over the nonzero weights."""
    out = None
    for w, f in zip(weights, functions):
        if w == 0:
            continue
        term = f.scale(float(w)) if w != 1 else f
        out = term if out is None else out + term
    return out


# ---------------------------------------------------------------------------
# Pinching factors


def pinching_factor(Eprime: BoundaryPointSet, M: float, delta: float, n: int,
                    lam: float = 30.0) -> DiscFunction:
    """Outer function with boundary modulus ``min(1, (d(., E')/delta)**M)``."""
    if len(Eprime) == 0:
        raise DirlipError("pinching set must be nonempty")
    if not 0.0 < delta <= 1.0:
        raise DirlipError("delta must lie in (0, 1]")
    if M < 0:
        raise DirlipError("M must be nonnegative")
    if M == 0:
        return DiscFunction.constant(1.0, n)
    theta = TWO_PI * np.arange(n) / n
    d = distance_to_set(theta, Eprime)
    with np.errstate(divide="ignore"):
        logw = np.minimum(0.0, M * np.log(d / delta))
    L = LogModulus.from_log(logw, lam)
    if L.clamped_fraction >= 0.25:
        raise FactorizationError(
            f"pinching modulus saturates the clamp on {L.clamped_fraction:.1%} of nodes"
        )
    return outer_from_modulus(L)


def _nearest_nodes(E: BoundaryPointSet, n: int) -> np.ndarray:
    return np.unique(np.round(E.as_array() / (TWO_PI / n)).astype(int) % n)


def pinch_to_tolerance(f: DiscFunction, Eprime: BoundaryPointSet, M: float, eps: float,
                       alpha: float, max_steps: int = 60, ratio_stop: float = 1.1):
    """Largest ``delta`` (bisection in ``log delta``) with ``||F f - f|| <= eps``.

    Returns ``(F, delta, error)``.  The search interval runs from the
    finest scale sampled by :func:`lip_radii` up to 1; below that scale the
    Lipschitz seminorm no longer sees the factor.  Raises
    :class:`PinchError` with the best attempt if even the smallest scale
    misses ``eps``.
    """
    nodes = _nearest_nodes(Eprime, f.n)
    if np.any(np.abs(f.boundary.values[nodes]) >= np.exp(-f.lam / 2)):
        raise HypothesisError("f does not vanish at the pinching points")
    cache = {}

    def attempt(delta):
        if delta not in cache:
            F = pinching_factor(Eprime, M, delta, f.n, f.lam)
            err = aalpha_norm(F * f - f, alpha).aalpha
            cache[delta] = (F, err)
        return cache[delta]

    hi = 1.0
    F, err = attempt(hi)
    if err <= eps:
        return F, hi, err
    lo = float(1.0 - lip_radii(f.n)[-1])
    F_lo, err_lo = attempt(lo)
    if err_lo > eps:
        best = min(cache, key=lambda d: cache[d][1])
        raise PinchError(
            f"tolerance {eps:.4g} not reached; best error {cache[best][1]:.4g} at delta={best:.3g}",
            best_delta=best, best_error=cache[best][1],
        )
    for _ in range(max_steps):
        if hi / lo < ratio_stop:
            break
        mid = math.sqrt(lo * hi)
        if attempt(mid)[1] <= eps:
            lo = mid
        else:
            hi = mid
    F, err = attempt(lo)
    return F, lo, err


# ---------------------------------------------------------------------------
# The approximation pipeline


@dataclass
class StepRecord:
    m: int
    err_power: float
    err_convex: float
    err_pinch: float
    err_total: float
    C_m: float
    delta: float
    pinch_reached: bool
    convex_distance: float
    tail_index: int
    pinch_points: list
    decay_slope: float
    vanishes_on_zeros: bool
    weights: list


@dataclass
class ApproxRun:
    alpha: float
    rho_schedule: list
    N: int
    M: float
    eps: float
    target_norm: float
    schedule: list
    steps: list = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)

    @property
    def terminal_error(self) -> float:
        return self.steps[-1].err_total

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "err_power", "err_convex", "err_pinch", "err_total", "C_m"])
        for s in self.steps:
            w.writerow([s.m, repr(s.err_power), repr(s.err_convex), repr(s.err_pinch),
                        repr(s.err_total), repr(s.C_m)])
        return buf.getvalue()


def decay_constant(g: DiscFunction, E: BoundaryPointSet, M: float) -> float:
    """``max |g(xi)| / d(xi, E)**M`` over boundary nodes off ``E``."""
    theta = TWO_PI * np.arange(g.n) / g.n
    d = distance_to_set(theta, E)
    mask = d > 0
    return float(np.max(np.abs(g.boundary.values[mask]) / d[mask] ** M))


def decay_slope(g: DiscFunction, E: BoundaryPointSet, radius: float) -> float:
    """Least-squares slope of ``log|g|`` against ``log d`` for ``0 < d < radius``."""
    theta = TWO_PI * np.arange(g.n) / g.n
    d = distance_to_set(theta, E)
    vals = np.abs(g.boundary.values)
    mask = (d > 0) & (d < radius) & (vals > 0)
    if np.count_nonzero(mask) < 4:
        return float("nan")
    slope, _ = np.polyfit(np.log(d[mask]), np.log(vals[mask]), 1)
    return float(slope)


def theorem1_pipeline(f: DiscFunction, alpha: float = 0.5, M: float = 3.0, eps: float | None = None,
                      N: int | None = None, schedule=range(1, 9), zeros: BoundaryPointSet | None = None,
                      arcs: ArcSet | None = None, budget: int = 500, tol: float = 1e-6) -> ApproxRun:
    """Approximants ``f g_m`` of ``f`` with ``g_m = O^{1/m} k_m F_m``.

    For each ``m``: ``k_m`` is the convex combination of the localized
    powers ``f_{Gamma_p}^N`` (``p >= m``) that brings ``O^{1+1/m} k_m``
    closest to ``O^{1+1/m}`` in the Dirichlet norm, and ``F_m`` is a
    pinching factor at the zeros of ``f`` among the endpoints of the arcs
    before the last one used.  The pinching tolerance is whatever remains
    of ``eps`` after the first two errors (``eps/3`` if nothing remains).
    """
    N = int(math.ceil(M / alpha)) if N is None else int(N)
    if N < M / alpha - 1e-12:
        raise HypothesisError("N must be at least M/alpha")
    E = zero_set(f) if zeros is None else zeros
    if len(E) == 0:
        raise HypothesisError("f has no boundary zeros; the pipeline needs a nonempty E_f")
    split = inner_outer_split(f)
    if split.defect > 0.05:
        raise FactorizationError("inner part is not a finite Blaschke product")
    O = f if f.has_potential else split.outer
    L = LogModulus.from_samples(O.boundary.values, f.lam)
    arcs = complement_arcs(E) if arcs is None else arcs
    K = len(arcs)
    f_norm = aalpha_norm(f, alpha).aalpha
    eps = 0.1 * f_norm if eps is None else eps
    run = ApproxRun(alpha, [1 + 1 / m for m in schedule], N, M, eps, f_norm, list(schedule))
    e_pts = E.as_array()

    def in_zero_set(p):
        diff = np.abs(np.angle(np.exp(1j * (e_pts - p))))
        return np.any(diff < _ANGLE_MATCH)

    for m in schedule:
        rho = 1.0 + 1.0 / m
        O_m = outer_power(O, 1.0 / m)
        fO = f * O_m
        e1 = aalpha_norm(fO - f, alpha).aalpha
        target = outer_power(O, rho)
        indices = list(range(min(m, K), K + 1))
        cands = [product_potential(O, rho, L, tail_arcs(arcs, p), N) for p in indices]
        sw = convex_approx(cands, target, budget, tol)
        locals_ = [product_potential(O, 0.0, L, tail_arcs(arcs, p), N) for p in indices]
        k_m = combine(sw.weights, locals_)
        fOk = fO * k_m
        e2 = aalpha_norm(fOk - fO, alpha).aalpha
        used = [p for p, w in zip(indices, sw.weights) if w > 0]
        j_m = max(used)
        ends = [pt for arc in arcs.arcs[:j_m] for pt in arc.endpoints]
        pinch_pts = sorted({float(e_pts[np.argmin(np.abs(np.angle(np.exp(1j * (e_pts - p)))))])
                            for p in ends if in_zero_set(p)})
        budget_left = eps - e1 - e2
        target_pinch = budget_left if budget_left > 0 else eps / 3.0
        reached = True
        if pinch_pts:
            Ep = BoundaryPointSet(tuple(pinch_pts))
            try:
                F, delta, _ = pinch_to_tolerance(fOk, Ep, M, target_pinch, alpha)
            except PinchError as exc:
                reached = False
                delta = exc.best_delta
                F = pinching_factor(Ep, M, delta, f.n, f.lam)
        else:
            F, delta = DiscFunction.constant(1.0, f.n), 1.0
        g_m = O_m * k_m * F
        fg = fOk * F
        e3 = aalpha_norm(fg - fOk, alpha).aalpha
        total = aalpha_norm(fg - f, alpha).aalpha
        zero_nodes = _nearest_nodes(E, f.n)
        vanish = bool(np.all(np.abs(fg.boundary.values[zero_nodes]) < np.exp(-f.lam / 2)))
        run.steps.append(StepRecord(
            m=int(m), err_power=e1, err_convex=e2, err_pinch=e3, err_total=total,
            C_m=decay_constant(g_m, E, M), delta=float(delta), pinch_reached=reached,
            convex_distance=sw.distance, tail_index=int(j_m), pinch_points=pinch_pts,
            decay_slope=decay_slope(g_m, E, float(delta)), vanishes_on_zeros=vanish,
            weights=[float(w) for w in sw.weights],
        ))
    for key, attr in (("eta0", "err_power"), ("eta1", "err_convex"), ("eta2", "err_pinch")):
        hit = [s.m for s in run.steps if getattr(s, attr) < eps / 3.0]
        run.thresholds[key] = hit[0] if hit else None
    return run


# ---------------------------------------------------------------------------
# Standard-ideal membership


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    max_on_zero_set: float
    quotient_sup: float
    negative_energy: float
    reason: str

    def to_dict(self) -> dict:
        return asdict(self)


def ideal_membership(f: DiscFunction, E: BoundaryPointSet, U: BlaschkeProduct, tol: float = 1e-3,
                     grid: AnnularGrid | None = None) -> MembershipVerdict:
    """Whether ``f`` vanishes on ``E`` and ``f/U`` stays bounded.

    The quotient is formed from boundary samples (``|U| = 1`` on the
    circle).  If ``U`` has a zero ``f`` does not share, the quotient picks
    up negative frequencies; their relative energy above ``1e-6`` is read as
    a pole and the verdict is negative.
    """
    max_on_E = 0.0
    if len(E):
        nodes = _nearest_nodes(E, f.n)
        max_on_E = float(np.max(np.abs(f.boundary.values[nodes])))
    theta = TWO_PI * np.arange(f.n) / f.n
    u_vals = blaschke_eval(U, np.exp(1j * theta))
    q = f.quad_samples() / u_vals
    coeffs = analyze(BoundaryGrid(f.n, q))
    energy = float(np.mean(np.abs(q) ** 2))
    neg = coeffs.analyticity_defect / energy if energy > 0 else 0.0
    if neg > 1e-6:
        return MembershipVerdict(False, max_on_E, float("inf"), neg,
                                 "quotient by the inner factor has a pole in the disc")
    grid = AnnularGrid(f.n) if grid is None else grid
    sup = float(np.max(np.abs(q)))
    for r in grid.radii:
        sup = max(sup, float(np.max(np.abs(circle_values(coeffs.coeffs, r, f.n)))))
    if max_on_E >= tol:
        return MembershipVerdict(False, max_on_E, sup, neg, "f does not vanish on E")
    if sup >= 1.0 / tol:
        return MembershipVerdict(False, max_on_E, sup, neg, "quotient is not bounded")
    return MembershipVerdict(True, max_on_E, sup, neg, "member")
