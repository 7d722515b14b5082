"""Sector regions, localized energy inequalities and random-arc sweeps.

Every check works on one arc ``gamma = (a, b)`` of the complement of the
boundary zero set and the sector ``Delta_gamma`` of interior points whose
argument lies in ``gamma``.  Interior quantities are evaluated on an
:class:`AnnularGrid` through the FFT circle evaluators of the outer
potential, so ``|f|``, ``f_Gamma`` and the weight ``a_gamma`` all come from
the same trapezoid sums and the pointwise inequalities between them hold
to rounding.
"""
from __future__ import annotations

import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .disc import TWO_PI, AnnularGrid, Arc, ArcSet, BoundaryPointSet, complement_arcs, normalize_arcset
from .errors import DirlipError, FactorizationError, HypothesisError
from .factor import (
    DEFAULT_LAMBDA,
    DiscFunction,
    LogModulus,
    herglotz_derivative_on_circle,
    herglotz_direct,
    herglotz_on_circle,
    localized_potential,
    outer_power,
    poisson_on_circle,
    poisson_over_distance_direct,
    product_potential,
)
from .norms import aalpha_norm, dirichlet_energy_coeff, lip_radii

#: Relative tolerance used when comparing measured sides of an inequality.
REL_TOL = 1e-6
#: Norm slack allowed by the ``||f|| <= 1`` hypothesis check.
NORM_SLACK = 1e-9
#: The outermost annular radius is ``1 - RMAX_SCALE / min(n, RMAX_GRID)``.
RMAX_SCALE = 10.0
RMAX_GRID = 4096
#: Pointwise middle-region statements assume ``d(z) <= D_MAX``.
D_MAX = 0.5
#: Number of base angles sampled by the increment-integral check.
UNIFMAJ_ANGLES = 256


class RegionLabel(str, enum.Enum):
    D1 = "D1"
    D21 = "D21"
    D22 = "D22"
    D23 = "D23"


_LABELS = (RegionLabel.D1, RegionLabel.D21, RegionLabel.D22, RegionLabel.D23)


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class SweepConfig:
    """Parameters shared by the lemma checks and the random-arc sweep.

    ``function`` and ``arc_index`` are only read by the command line to pick
    the test function and the arc ``gamma``.
    """

    alpha: float = 0.5
    rho: float = 1.5
    N: int = 4
    M: float = 3.0
    grid_n: int = 4096
    lam: float = DEFAULT_LAMBDA
    seed: int = 42
    trials: int = 50
    arc_counts: tuple[int, ...] = (8, 16, 32, 64)
    constant_cap: float = 100.0
    sweep_cap_factor: float = 5.0
    growth_cap: float = 1.1
    n_radial: int = 256
    workers: int = 1
    function: str = "canonical"
    arc_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "arc_counts", tuple(int(k) for k in self.arc_counts))
        if not 1.0 < self.rho <= 2.0:
            raise DirlipError(f"rho must lie in (1, 2], got {self.rho}")
        if not 0.0 < self.alpha <= 0.5:
            raise DirlipError(f"alpha must lie in (0, 1/2], got {self.alpha}")
        if self.N < 1 or int(self.N) != self.N:
            raise DirlipError("N must be a positive integer")
        if self.trials < 1:
            raise DirlipError("trials must be positive")
        if any(k < 0 for k in self.arc_counts):
            raise DirlipError("arc counts must be nonnegative")
        if self.constant_cap <= 0 or self.sweep_cap_factor <= 0:
            raise DirlipError("caps must be positive")
        if self.workers < 1:
            raise DirlipError("workers must be positive")

    _KEYS = {"lambda": "lam"}

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        known = {f for f in cls.__dataclass_fields__}
        kwargs = {}
        for key, value in d.items():
            if key.startswith("_"):
                continue
            name = cls._KEYS.get(key, key)
            if name not in known:
                raise DirlipError(f"unknown configuration key {key!r}")
            kwargs[name] = value
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "SweepConfig":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        d["arc_counts"] = list(self.arc_counts)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# Pointwise machinery


def endpoint_distance(z, gamma: Arc) -> np.ndarray | float:
    """``d(z) = min(|z - e^{ia}|, |z - e^{ib}|)`` for ``gamma = (a, b)``."""
    a, b = gamma.endpoints
    z = np.asarray(z, dtype=complex)
    d = np.minimum(np.abs(z - np.exp(1j * a)), np.abs(z - np.exp(1j * b)))
    return float(d) if d.ndim == 0 else d


def _contains(outer: ArcSet | None, gamma: Arc, angles: np.ndarray) -> bool:
    """Node-level test of ``gamma`` being contained in ``outer``."""
    if outer is None:
        return True
    inside = gamma.node_weights(angles) > 0
    w = outer.node_weights(angles)
    return bool(np.all(w[inside] > 0))


def lambda_weights(gamma: Arc, Gamma: ArcSet | None, angles: np.ndarray) -> np.ndarray:
    """Node weights of ``Gamma`` when ``gamma`` is not inside it, else of its complement."""
    wG = np.ones(angles.size) if Gamma is None else Gamma.node_weights(angles)
    if _contains(Gamma, gamma, angles):
        return 1.0 - wG
    return wG


def a_gamma(z, gamma: Arc, Gamma: ArcSet | None, L: LogModulus):
    """Distance-weighted mass of ``-log|f|`` over ``Lambda_gamma`` seen from ``z``.

    ``(1/2pi) int_Lambda -log|f(e^{it})| / |e^{it} - z|^2 dt`` by the
    trapezoid rule, where ``Lambda`` is ``Gamma`` if ``gamma`` is not
    contained in ``Gamma`` and the complement of ``Gamma`` otherwise.

    Raises
    ------
    HypothesisError
        If ``log|f|`` is positive somewhere on ``Lambda`` or the total-mass
        bound ``a <= C/d^2`` fails.
    GridResolutionError
        If a point is closer to the circle than the grid resolves.
    """
    from .factor import _check_radius

    angles = L.grid.angles
    lam_w = lambda_weights(gamma, Gamma, angles)
    v = -lam_w * L.values
    if np.any(v < -1e-14):
        raise HypothesisError("log-modulus is positive on the weight set; need ||f||_inf <= 1")
    v = np.maximum(v, 0.0)
    _check_radius(z, L.n)
    a = poisson_over_distance_direct(v, z)
    a = np.maximum(a, 0.0)
    mass = float(np.mean(v))
    d = np.asarray(endpoint_distance(z, gamma))
    with np.errstate(divide="ignore"):
        bound = np.where(d > 0, mass / np.square(d), np.inf)
    if np.any(a > bound * (1.0 + REL_TOL) + 1e-300):
        raise HypothesisError("a_gamma exceeds the total-mass bound C/d^2; z is outside the sector")
    return float(a.ravel()[0]) if np.ndim(z) == 0 else a


def _log_abs(d):
    return np.abs(np.log(d))


def thresholds(d, r):
    """Lower and upper region thresholds ``8|log d|/d`` and ``8|log d|/(1-r)``."""
    d = np.asarray(d, dtype=float)
    r = np.asarray(r, dtype=float)
    lg = 8.0 * _log_abs(d)
    with np.errstate(divide="ignore", invalid="ignore"):
        return lg / d, lg / (1.0 - r)


def classify_region(z, gamma: Arc, d: float, a: float) -> RegionLabel:
    """Region label of a sector point.

    Points with ``d < 2(1 - |z|)`` are ``D1``.  Elsewhere ``a`` is compared
    with the two thresholds; ties go to ``D21`` (lower) and ``D23`` (upper).
    """
    r = abs(complex(z))
    return _LABELS[int(classify_nodes(np.array([r]), np.array([d]), np.array([a]))[0])]


def classify_nodes(r, d, a) -> np.ndarray:
    """Vectorized labels as indices into ``(D1, D21, D22, D23)``."""
    r, d, a = np.broadcast_arrays(np.asarray(r, float), np.asarray(d, float), np.asarray(a, float))
    lo, hi = thresholds(d, r)
    out = np.full(r.shape, 2, dtype=np.int8)
    out[a >= hi] = 3
    out[a <= lo] = 1
    out[d < 2.0 * (1.0 - r)] = 0
    return out


def mu_z(z, d: float, a: float) -> float:
    """Radial contraction ``1 - 8|log d|/a`` for a middle-region point.

    Raises
    ------
    DirlipError
        If ``a <= 0``, ``d`` is outside ``(0, 1/2]`` or the point is not in
        the closed-below middle region (``a`` under the lower threshold, or
        at or above the upper one).
    """
    if not a > 0:
        raise DirlipError("a must be positive")
    if not 0.0 < d <= D_MAX:
        raise DirlipError(f"d must lie in (0, {D_MAX}], got {d}")
    r = abs(complex(z))
    if d < 2.0 * (1.0 - r):
        raise DirlipError("point lies in the near-boundary region")
    lo, hi = thresholds(d, r)
    # the lower threshold itself is admitted (mu = 1 - d there); ties are
    # judged with a relative tolerance so rounding in ``a`` does not decide
    if a < lo * (1.0 - REL_TOL) or a >= hi:
        raise DirlipError(f"a = {a:g} is outside the middle region [{lo:g}, {hi:g})")
    mu = 1.0 - 8.0 * abs(np.log(d)) / a
    assert 0.0 < mu < 1.0 and 1.0 - mu <= d * (1.0 + REL_TOL)
    return float(mu)


# ---------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class InequalityReport:
    """Measured sides of one named inequality.

    ``empirical_constant`` is ``lhs / rhs``; when both vanish it is ``0.0``
    and ``degenerate`` is set.  ``details`` carries check-specific extras
    such as per-radius profiles.
    """

    name: str
    lhs: float
    rhs_components: dict
    rhs: float
    empirical_constant: float
    node_count: int
    passed: bool
    degenerate: bool = False
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _report(name, lhs, components, rhs, nodes, cap, details=None) -> InequalityReport:
    lhs, rhs = float(lhs), float(rhs)
    if rhs > 0:
        const, degenerate = lhs / rhs, False
    elif lhs <= 0:
        const, degenerate = 0.0, True
    else:
        const, degenerate = float("inf"), False
    return InequalityReport(name, lhs, {k: float(v) for k, v in components.items()}, rhs,
                            const, int(nodes), bool(const <= cap), degenerate, details or {})


# ---------------------------------------------------------------------------
# Sector context


def harness_grid(n: int, n_radial: int = 256) -> AnnularGrid:
    """Annular grid stopping at ``1 - 10/min(n, 4096)`` (same radii for all fine grids)."""
    return AnnularGrid(n, n_radial, 1.0 - RMAX_SCALE / min(n, RMAX_GRID))


def check_hypotheses(f: DiscFunction, alpha: float, gamma: Arc | None = None,
                     zeros: BoundaryPointSet | None = None) -> float:
    """Raise :class:`HypothesisError` unless ``f`` is outer with norm at most 1.

    Returns the measured ``A_alpha`` norm.
    """
    if f.potential is None:
        raise HypothesisError("the checks need an outer function with a potential")
    norm = aalpha_norm(f, alpha).aalpha
    if norm > 1.0 + NORM_SLACK:
        raise HypothesisError(f"||f|| = {norm:.6g} exceeds 1; rescale first")
    if gamma is not None and zeros is not None:
        pts = zeros.as_array()
        for e in gamma.endpoints:
            gap = np.abs(np.angle(np.exp(1j * (pts - e))))
            if pts.size == 0 or np.min(gap) > 1e-9:
                raise HypothesisError(f"arc endpoint {e:g} is not a boundary zero")
    return norm


def rescale_to_unit(f: DiscFunction, alpha: float) -> DiscFunction:
    """``f / ||f||_{A_alpha}`` when the norm exceeds 1, otherwise ``f``."""
    norm = aalpha_norm(f, alpha).aalpha
    return f.scale(1.0 / norm) if norm > 1.0 else f


class SectorContext:
    """Annular-grid samples of everything the sector checks need.

    Parameters
    ----------
    f : DiscFunction
        Outer function with ``||f||_{A_alpha} <= 1``.
    gamma : Arc
        Complement arc whose endpoints are zeros of ``f``.
    Gamma : ArcSet or None
        Localization set of ``f_Gamma`` (None is the full circle).
    cfg : SweepConfig
    """

    def __init__(self, f: DiscFunction, gamma: Arc, Gamma: ArcSet | None, cfg: SweepConfig):
        if f.potential is None:
            raise HypothesisError("the checks need an outer function with a potential")
        self.f, self.gamma, self.Gamma, self.cfg = f, gamma, Gamma, cfg
        n = f.n
        self.n = n
        self.grid = harness_grid(n, cfg.n_radial)
        self.angles = self.grid.angles
        self.u = f.potential.v
        self.phase = f.potential.phase
        self.L = LogModulus.from_log(self.u, f.lam, correct_zeros=False)
        self.sector = gamma.node_weights(self.angles)
        self.wG = np.ones(n) if Gamma is None else Gamma.node_weights(self.angles)
        self.contained = _contains(Gamma, gamma, self.angles)
        self.lam_w = lambda_weights(gamma, Gamma, self.angles)
        v = -self.lam_w * self.u
        if np.any(v < -1e-14):
            raise HypothesisError("log-modulus is positive on the weight set; need ||f||_inf <= 1")
        self.v_lambda = np.maximum(v, 0.0)

        radii = self.grid.radii
        shape = (radii.size, n)
        self.abs_f = np.empty(shape)
        self.f_vals = np.empty(shape, dtype=complex)
        self.fprime_sq = np.empty(shape)
        self.fG_prime_sq = np.empty(shape)
        self.a = np.empty(shape)
        uG = self.wG * self.u
        for i, r in enumerate(radii):
            h = herglotz_on_circle(self.u, r) + 1j * self.phase
            fv = np.exp(h)
            self.f_vals[i] = fv
            self.abs_f[i] = np.abs(fv)
            self.fprime_sq[i] = np.abs(fv * herglotz_derivative_on_circle(self.u, r)) ** 2
            hG = herglotz_on_circle(uG, r).real
            gG = herglotz_derivative_on_circle(uG, r)
            self.fG_prime_sq[i] = np.exp(2.0 * hG) * np.abs(gG) ** 2
            self.a[i] = poisson_on_circle(self.v_lambda, r) / (1.0 - r * r)
        self.z = radii[:, None] * np.exp(1j * self.angles)[None, :]
        self.d = np.asarray(endpoint_distance(self.z, gamma))
        self.in_sector = np.broadcast_to(self.sector > 0, shape)
        self.labels = np.where(self.in_sector, classify_nodes(radii[:, None], self.d, self.a), -1)
        self.w = self.grid.ring_weights[:, None] * self.sector[None, :]

    # sector integrals ---------------------------------------------------
    def integrate(self, values, label: int | None = None) -> float:
        mask = self.in_sector if label is None else self.labels == label
        return float(np.sum(np.where(mask, self.w * values, 0.0)))

    def count(self, label: int | None = None) -> int:
        return int(np.count_nonzero(self.in_sector if label is None else self.labels == label))

    @cached_property
    def energy(self) -> float:
        """``||f'||^2`` over the sector on the full (``r_max = 1``) grid."""
        full = AnnularGrid(self.n, self.cfg.n_radial)
        from .norms import dirichlet_energy_quad

        return dirichlet_energy_quad(self.f, ArcSet((self.gamma,)), full)

    @property
    def area(self) -> float:
        """Normalized area ``|gamma| / 2pi`` of the sector."""
        return self.gamma.length / TWO_PI

    @cached_property
    def mu_points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Indices, contraction factors and ``f(mu z)`` at middle-region nodes with ``d <= 1/2``."""
        idx = np.nonzero((self.labels == 2) & (self.d <= D_MAX))
        if idx[0].size == 0:
            return idx, np.empty(0), np.empty(0, dtype=complex)
        d, a = self.d[idx], self.a[idx]
        mu = 1.0 - 8.0 * _log_abs(d) / a
        if np.any(mu <= 0) or np.any(1.0 - mu > d * (1.0 + REL_TOL)):
            raise DirlipError("contraction factor violates 1 - mu <= d")
        w = mu * self.z[idx]
        vals = np.exp(herglotz_direct(self.u, w) + 1j * self.phase)
        return idx, mu, vals

    @property
    def far_middle_nodes(self) -> int:
        """Middle-region nodes with ``d > 1/2`` (outside the contraction statements)."""
        return int(np.count_nonzero((self.labels == 2) & (self.d > D_MAX)))

    @property
    def modulus_power(self) -> np.ndarray:
        return self.abs_f ** (2.0 * self.cfg.rho)


# ---------------------------------------------------------------------------
# Individual checks


def _check_local(ctx: SectorContext) -> InequalityReport:
    rho = ctx.cfg.rho
    d = np.asarray(endpoint_distance(np.exp(1j * ctx.angles), ctx.gamma))
    mod = np.abs(ctx.f.boundary.values)
    use = (ctx.sector > 0) & (d > 0)
    integrand = np.where(use, mod ** (2.0 * rho) / np.where(use, d, 1.0), 0.0)
    lhs = float(np.sum(ctx.sector * integrand) * TWO_PI / ctx.n)
    e = ctx.energy
    return _report("LOCAL", lhs, {"energy": e}, e, np.count_nonzero(use), ctx.cfg.constant_cap)


def _check_lem2(ctx: SectorContext) -> InequalityReport:
    rho, alpha = ctx.cfg.rho, ctx.cfg.alpha
    bnd = ctx.f.boundary.values[None, :]
    r = ctx.grid.radii[:, None]
    inc = np.abs(ctx.f_vals - bnd)
    # increments at rounding level (e.g. a constant f) count as zero
    inc[inc <= 64.0 * np.finfo(float).eps * np.max(np.abs(bnd))] = 0.0
    integrand = inc ** (2.0 * rho) / (1.0 - r) ** 2
    lhs = ctx.integrate(integrand)
    factor = 1.0 / (2.0 * alpha * (rho - 1.0))
    e = ctx.energy
    return _report("LEM2", lhs, {"energy": e, "factor": factor}, factor * e,
                   ctx.count(), ctx.cfg.constant_cap)


def _check_d1(ctx: SectorContext) -> InequalityReport:
    lhs = ctx.integrate(ctx.modulus_power * ctx.fG_prime_sq, 0)
    e = ctx.energy
    return _report("D1", lhs, {"energy": e}, e, ctx.count(0), ctx.cfg.constant_cap)


def _weighted_a(ctx: SectorContext, label: int) -> float:
    return ctx.integrate(ctx.modulus_power * ctx.a ** 2, label)


def _check_d21(ctx: SectorContext) -> InequalityReport:
    e = ctx.energy
    return _report("D21", _weighted_a(ctx, 1), {"energy": e}, e, ctx.count(1), ctx.cfg.constant_cap)


def _check_d23(ctx: SectorContext) -> InequalityReport:
    A = ctx.area
    return _report("D23", _weighted_a(ctx, 3), {"area": A}, A, ctx.count(3), ctx.cfg.constant_cap)


def _check_d22(ctx: SectorContext) -> InequalityReport:
    e, A = ctx.energy, ctx.area
    return _report("D22", _weighted_a(ctx, 2), {"energy": e, "area": A}, e + A,
                   ctx.count(2), ctx.cfg.constant_cap)


def _check_lem6(ctx: SectorContext) -> InequalityReport:
    idx, _, vals = ctx.mu_points
    details = {"far_nodes": ctx.far_middle_nodes, "empty_region": idx[0].size == 0}
    if idx[0].size == 0:
        return _report("LEM6", 0.0, {"unit": 1.0}, 1.0, 0, ctx.cfg.constant_cap, details)
    ratio = np.abs(vals) / ctx.d[idx] ** 2
    return _report("LEM6", float(np.max(ratio)), {"unit": 1.0}, 1.0, idx[0].size,
                   ctx.cfg.constant_cap, details)


def _inner_energy_profile(ctx: SectorContext) -> np.ndarray:
    """``int_{S_r} |f'|^2 dA`` for every harness radius (inner sector up to ``r``)."""
    ring = ctx.grid.ring_weights * np.sum(ctx.sector[None, :] * ctx.fprime_sq, axis=1)
    return np.cumsum(ring)


def _check_lem7(ctx: SectorContext) -> InequalityReport:
    rho, alpha = ctx.cfg.rho, ctx.cfg.alpha
    eps = alpha * (rho - 1.0)
    idx, _, vals = ctx.mu_points
    radii = ctx.grid.radii
    per_radius = np.zeros(radii.size)
    if idx[0].size:
        rows, cols = idx
        terms = (np.abs(ctx.f_vals[idx] - vals) ** (2.0 * rho) * ctx.a[idx] ** 2
                 * radii[rows] * ctx.sector[cols] * TWO_PI / ctx.n)
        np.add.at(per_radius, rows, terms)
    inner = _inner_energy_profile(ctx)
    bound = inner / (1.0 - radii) ** (1.0 - eps)
    active = per_radius > 0
    if np.any(active & (bound <= 0)):
        const = float("inf")
    elif np.any(active):
        const = float(np.max(per_radius[active] / bound[active]))
    else:
        const = 0.0
    worst = int(np.argmax(np.where(active, per_radius / np.where(bound > 0, bound, 1.0), -1.0)))
    e = ctx.energy
    details = {"epsilon": eps, "radii_with_nodes": int(np.count_nonzero(active)),
               "far_nodes": ctx.far_middle_nodes}
    if np.any(active):
        details["worst_radius"] = float(radii[worst])
    lhs = float(per_radius[worst]) if np.any(active) else 0.0
    rhs = float(bound[worst]) if np.any(active) else e
    rep = _report("LEM7", lhs, {"energy": e, "inner_energy": float(inner[worst])}, rhs,
                  idx[0].size, ctx.cfg.constant_cap, details)
    if np.any(active) and const != rep.empirical_constant:
        rep = InequalityReport(rep.name, rep.lhs, rep.rhs_components, rep.rhs, const,
                               rep.node_count, bool(const <= ctx.cfg.constant_cap), False, details)
    return rep


def _check_objet(ctx: SectorContext) -> InequalityReport:
    cfg = ctx.cfg
    F = product_potential(ctx.f, cfg.rho, ctx.L, ctx.Gamma, cfg.N)
    lhs = dirichlet_energy_coeff(F).energy
    # whole-disc integral of |f|^{2 rho} |f_Gamma'|^2 on the harness radii
    total = float(np.sum(ctx.grid.ring_weights[:, None] * ctx.modulus_power * ctx.fG_prime_sq))
    comps = {"rho_squared": cfg.rho ** 2, "localized_energy": total, "N_squared": float(cfg.N ** 2)}
    rhs = cfg.rho ** 2 + cfg.N ** 2 * total
    return _report("OBJET", lhs, comps, rhs, ctx.grid.radii.size * ctx.n, cfg.constant_cap)


def increment_profile(g: DiscFunction, alpha: float, n_angles: int = UNIFMAJ_ANGLES):
    """Radii and ``(1-r)^{1-alpha} max_theta int |g(e^{i(t+theta)}) - g(e^{i theta})| P_r(t) dt``.

    ``P_r(t) = 1/(1 - 2r cos t + r^2)``; the integral is a trapezoid sum on
    the boundary grid and the maximum runs over ``n_angles`` base angles.
    """
    n = g.n
    vals = g.boundary.values
    step = max(1, n // n_angles)
    base = np.arange(0, n, step)
    radii = lip_radii(n)[1:]
    t = TWO_PI * np.arange(n) / n
    kern = 1.0 / (1.0 - 2.0 * radii[:, None] * np.cos(t)[None, :] + radii[:, None] ** 2)
    diffs = np.abs(np.stack([np.roll(vals, -j) for j in base]) - vals[base][:, None])
    integrals = diffs @ kern.T * (TWO_PI / n)
    prof = (1.0 - radii) ** (1.0 - alpha) * np.max(integrals, axis=0)
    return radii, prof


def _check_unifmaj(ctx: SectorContext) -> InequalityReport:
    alpha = ctx.cfg.alpha
    radii, prof = increment_profile(ctx.f, alpha)
    g_norm = aalpha_norm(ctx.f, alpha).lip_norm
    k = int(np.argmax(prof))
    details = {"radii": radii.tolist(), "profile": (prof / g_norm).tolist()}
    return _report("UNIFMAJ", float(prof[k]), {"lip_norm": g_norm}, g_norm,
                   UNIFMAJ_ANGLES * radii.size, ctx.cfg.constant_cap, details)


def _check_simple(ctx: SectorContext) -> InequalityReport:
    far = (ctx.labels >= 1)
    lhs = float(np.sum(np.where(far, ctx.w * ctx.modulus_power * ctx.fG_prime_sq, 0.0)))
    e_sector = ctx.integrate(ctx.fprime_sq)
    a_term = float(np.sum(np.where(far, ctx.w * ctx.modulus_power * ctx.a ** 2, 0.0)))
    rhs = 2.0 * e_sector + 8.0 * a_term
    rep = _report("SIMPLE", lhs, {"energy": e_sector, "a_integral": a_term}, rhs,
                  np.count_nonzero(far), 1.0 + REL_TOL)
    return rep


REGISTRY: dict[str, Callable[[SectorContext], InequalityReport]] = {
    "LOCAL": _check_local,
    "LEM2": _check_lem2,
    "D1": _check_d1,
    "D21": _check_d21,
    "D23": _check_d23,
    "LEM6": _check_lem6,
    "LEM7": _check_lem7,
    "D22": _check_d22,
    "OBJET": _check_objet,
    "UNIFMAJ": _check_unifmaj,
    "SIMPLE": _check_simple,
}

#: Checks whose failure is part of the lemma suite (``SIMPLE`` is a consistency check).
LEMMA_CHECKS = ("LOCAL", "LEM2", "D1", "D21", "D23", "LEM6", "LEM7", "D22", "OBJET", "UNIFMAJ")


def _context(f, gamma, cfg, Gamma, zeros) -> SectorContext:
    check_hypotheses(f, cfg.alpha, gamma, zeros)
    return SectorContext(f, gamma, Gamma, cfg)


def run_inequality(name: str, f: DiscFunction, gamma: Arc, params: SweepConfig,
                   Gamma: ArcSet | None = None, zeros: BoundaryPointSet | None = None) -> InequalityReport:
    """Run one registered check on the sector over ``gamma``.

    Raises
    ------
    KeyError
        Unknown check name.
    HypothesisError
        ``f`` is not outer, its norm exceeds 1, or an endpoint of ``gamma`` is
        not in ``zeros``.
    """
    if name not in REGISTRY:
        raise KeyError(f"unknown check {name!r}; choose from {sorted(REGISTRY)}")
    return REGISTRY[name](_context(f, gamma, params, Gamma, zeros))


def run_all(f: DiscFunction, gamma: Arc, params: SweepConfig, Gamma: ArcSet | None = None,
            zeros: BoundaryPointSet | None = None, names: Sequence[str] | None = None):
    """Run several checks sharing one sector context; returns ``{name: report}``."""
    names = list(REGISTRY) if names is None else list(names)
    for nm in names:
        if nm not in REGISTRY:
            raise KeyError(f"unknown check {nm!r}")
    ctx = _context(f, gamma, params, Gamma, zeros)
    return {nm: REGISTRY[nm](ctx) for nm in names}


@dataclass(frozen=True)
class RegionSummary:
    """Partition counts and the two pointwise region bounds."""

    counts: dict
    sector_nodes: int
    partition_ok: bool
    d23_max_ratio: float
    d22_max_ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


def region_summary(ctx: SectorContext) -> RegionSummary:
    """Counts per label and ``max |f|/d^8`` (D23), ``max |f(mu z)|/d^2`` (D22)."""
    counts = {lab.value: ctx.count(i) for i, lab in enumerate(_LABELS)}
    total = ctx.count()
    d23 = ctx.labels == 3
    r23 = float(np.max(ctx.abs_f[d23] / ctx.d[d23] ** 8)) if np.any(d23) else 0.0
    idx, _, vals = ctx.mu_points
    r22 = float(np.max(np.abs(vals) / ctx.d[idx] ** 2)) if idx[0].size else 0.0
    return RegionSummary(counts, total, sum(counts.values()) == total, r23, r22)


# ---------------------------------------------------------------------------
# Arc choices


def sector_arc(zeros: BoundaryPointSet, index: int = 0) -> Arc:
    """The ``index``-th complement arc of the zero set (endpoints are zeros)."""
    arcs = complement_arcs(zeros, max_length=None)
    if not 0 <= index < len(arcs):
        raise DirlipError(f"arc index {index} out of range for {len(arcs)} complement arcs")
    return arcs[index]


def default_localization(zeros: BoundaryPointSet, index: int = 0) -> ArcSet:
    """Union of the complement arcs other than ``index``; the arc itself if it is alone."""
    arcs = complement_arcs(zeros, max_length=None)
    others = [i for i in range(len(arcs)) if i != index]
    return arcs.subset(others if others else [index])


# ---------------------------------------------------------------------------
# Random-arc sweep


@dataclass(frozen=True)
class SweepRow:
    arc_count: int
    max: float
    mean: float
    min: float


@dataclass(frozen=True)
class SweepReport:
    """Norms of ``f^rho f_Gamma^N`` over random unions of normalized arcs."""

    baseline: float
    rows: tuple
    total_arcs: int
    max_length: float
    cap: float
    growth: tuple
    max_ratio: float
    verdict: bool
    split_points: int
    config: dict

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rows"] = [asdict(r) for r in self.rows]
        d["growth"] = list(self.growth)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self) -> str:
        lines = ["arc_count,max,mean,min"]
        lines += [f"{r.arc_count},{r.max!r},{r.mean!r},{r.min!r}" for r in self.rows]
        return "\n".join(lines) + "\n"


def sweep_arcs(zeros: BoundaryPointSet, count: int) -> ArcSet:
    """Normalized complement arcs, cut finely enough to give at least ``count`` pieces."""
    if len(zeros) == 0:
        raise HypothesisError("the zero set is empty")
    base = complement_arcs(zeros, max_length=None)
    max_length = 0.5
    if count > 0:
        max_length = min(0.5, base.measure / count * (1.0 + 1e-9))
    arcs = normalize_arcset(base, max_length)
    while len(arcs) < count:
        max_length *= 0.99
        arcs = normalize_arcset(base, max_length)
    return arcs


def count_split_points(arcs: ArcSet, zeros: BoundaryPointSet, tol: float = 1e-9) -> int:
    """Number of distinct arc endpoints that are not zeros (jumps of ``|f_Gamma|``)."""
    ends = np.sort(np.mod(arcs.endpoints(), TWO_PI))
    keep = np.append(True, np.diff(ends) > tol)
    ends = ends[keep]
    if ends.size > 1 and ends[0] + TWO_PI - ends[-1] <= tol:
        ends = ends[:-1]
    gap = np.abs(np.angle(np.exp(1j * (zeros.as_array()[None, :] - ends[:, None]))))
    return int(np.count_nonzero(np.min(gap, axis=1) > tol))


def _trial_norm(f, L, arcs, k, trial, cfg) -> float:
    rng = np.random.default_rng([cfg.seed, k, trial])
    idx = np.sort(rng.choice(len(arcs), size=k, replace=False)) if k else np.array([], int)
    Gamma = arcs.subset(idx.tolist()) if k else ArcSet(())
    F = product_potential(f, cfg.rho, L, Gamma, cfg.N)
    return aalpha_norm(F, cfg.alpha).aalpha


def sweep_theorem2(f: DiscFunction, cfg: SweepConfig, zeros: BoundaryPointSet) -> SweepReport:
    """Norm statistics of ``f^rho f_Gamma^N`` for random ``Gamma`` of each listed size.

    Trial ``t`` at size ``k`` draws its subset with ``default_rng([seed, k, t])``
    so results do not depend on scheduling.  The verdict requires every norm
    to stay below ``sweep_cap_factor * ||f^rho||`` and each doubling of the
    arc count to raise the maximum by at most ``growth_cap``.
    """
    if f.potential is None:
        raise FactorizationError("the sweep needs an outer function with a potential")
    check_hypotheses(f, cfg.alpha)
    K = max(cfg.arc_counts) if cfg.arc_counts else 0
    arcs = sweep_arcs(zeros, K)
    if K > len(arcs):
        raise DirlipError(f"asked for {K} arcs but only {len(arcs)} are available")
    L = LogModulus.from_log(f.potential.v, f.lam, correct_zeros=False)
    baseline = aalpha_norm(outer_power(f, cfg.rho), cfg.alpha).aalpha
    jobs = [(k, t) for k in cfg.arc_counts for t in range(cfg.trials)]
    run = lambda job: _trial_norm(f, L, arcs, job[0], job[1], cfg)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    by_count: dict[int, list[float]] = {}
    for (k, _), val in zip(jobs, results):
        by_count.setdefault(k, []).append(val)
    rows = tuple(SweepRow(k, float(np.max(v)), float(np.mean(v)), float(np.min(v)))
                 for k, v in by_count.items())
    cap = cfg.sweep_cap_factor * baseline
    growth = []
    ok = all(r.max <= cap for r in rows)
    maxima = {r.arc_count: r.max for r in rows}
    for k in sorted(maxima):
        if 2 * k in maxima and k > 0:
            g = maxima[2 * k] / maxima[k]
            growth.append(g)
            ok = ok and g <= cfg.growth_cap
    split = count_split_points(arcs, zeros)
    return SweepReport(baseline, rows, len(arcs), float(arcs[0].length), cap, tuple(growth),
                       max(r.max for r in rows) / baseline, bool(ok), split, cfg.to_dict())
