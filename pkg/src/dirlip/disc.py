"""Boundary grids, arcs, zero sets and the sample/coefficient transforms.

Angles are radians.  A boundary function is carried by its values at the
``n`` equispaced nodes ``2*pi*j/n``; Taylor coefficients are recovered by
the FFT and interior values by evaluating the truncated power series.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DirlipError

TWO_PI = 2.0 * np.pi
_ANGLE_TOL = 1e-12

#: Nodes per Gauss-Legendre panel and default panel count for area grids.
GL_PANEL_ORDER = 16
GL_PANELS = 16


class GridError(DirlipError):
    """Raised for malformed grids, arcs or point sets."""


def _wrap(theta):
    return np.mod(theta, TWO_PI)


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class BoundaryGrid:
    """Samples of a boundary function at ``theta_j = 2*pi*j/n``."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        if not _is_pow2(self.n) or self.n < 16:
            raise GridError(f"grid size must be a power of two >= 16, got {self.n}")
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.n,):
            raise GridError(f"expected {self.n} samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise GridError("boundary samples must be finite")
        object.__setattr__(self, "values", values)

    @property
    def angles(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n) / self.n

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n


def make_grid(n: int) -> BoundaryGrid:
    """Zero-valued grid of ``n`` samples."""
    return BoundaryGrid(n, np.zeros(n, dtype=complex))


def grid_from_function(func, n: int) -> BoundaryGrid:
    """Sample ``func`` (a callable of a complex array) on the unit circle."""
    theta = TWO_PI * np.arange(n) / n
    return BoundaryGrid(n, np.asarray(func(np.exp(1j * theta)), dtype=complex))


@dataclass(frozen=True)
class BoundaryPointSet:
    """Finite set of points on the circle, stored as sorted angles in [0, 2pi)."""

    points: tuple = ()

    def __post_init__(self):
        pts = np.sort(_wrap(np.asarray(self.points, dtype=float).ravel()))
        if pts.size > 1:
            gaps = np.diff(np.append(pts, pts[0] + TWO_PI))
            if np.any(gaps < _ANGLE_TOL):
                raise GridError("points must be distinct modulo 2pi")
        object.__setattr__(self, "points", tuple(float(p) for p in pts))

    def __len__(self):
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=float)

    def to_json(self) -> str:
        return json.dumps({"points": list(self.points)})

    @classmethod
    def from_json(cls, text: str) -> "BoundaryPointSet":
        return cls(tuple(json.loads(text)["points"]))


@dataclass(frozen=True)
class Arc:
    """Open arc from ``start`` counterclockwise through ``length`` radians."""

    start: float
    length: float

    def __post_init__(self):
        if not 0.0 < self.length <= TWO_PI + _ANGLE_TOL:
            raise GridError(f"arc length must lie in (0, 2pi], got {self.length}")
        object.__setattr__(self, "start", float(_wrap(self.start)))
        object.__setattr__(self, "length", float(min(self.length, TWO_PI)))

    @classmethod
    def between(cls, a: float, b: float) -> "Arc":
        """Arc from ``a`` to ``b``; equal endpoints mean the circle minus a point."""
        length = float(_wrap(b - a))
        if length < _ANGLE_TOL:
            length = TWO_PI
        return cls(a, length)

    @property
    def end(self) -> float:
        return float(_wrap(self.start + self.length))

    @property
    def endpoints(self) -> tuple[float, float]:
        return self.start, self.end

    def node_weights(self, angles: np.ndarray) -> np.ndarray:
        """Indicator of the arc at the given angles, 1/2 at an endpoint.

        The half weight is what the trapezoid rule assigns to a node sitting
        on a jump; it makes indicators of adjacent arcs add up exactly.
        """
        rel = _wrap(np.asarray(angles) - self.start)
        w = ((rel > _ANGLE_TOL) & (rel < self.length - _ANGLE_TOL)).astype(float)
        at_start = (rel <= _ANGLE_TOL) | (rel >= TWO_PI - _ANGLE_TOL)
        at_end = np.abs(rel - self.length) <= _ANGLE_TOL
        if self.length >= TWO_PI - _ANGLE_TOL:
            # both ends sit on the same point
            w[at_start] += 1.0
        else:
            w[at_start] += 0.5
            w[at_end & ~at_start] += 0.5
        return w

    def contains(self, theta) -> np.ndarray:
        rel = _wrap(np.asarray(theta) - self.start)
        return (rel > _ANGLE_TOL) & (rel < self.length - _ANGLE_TOL)


@dataclass(frozen=True)
class ArcSet:
    """Ordered family of pairwise disjoint open arcs."""

    arcs: tuple = ()

    def __post_init__(self):
        arcs = tuple(a if isinstance(a, Arc) else Arc.between(*a) for a in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        _check_disjoint(arcs)

    def __len__(self):
        return len(self.arcs)

    def __iter__(self):
        return iter(self.arcs)

    def __getitem__(self, i):
        return self.arcs[i]

    @property
    def measure(self) -> float:
        return float(sum(a.length for a in self.arcs))

    def node_weights(self, angles: np.ndarray) -> np.ndarray:
        w = np.zeros(np.shape(angles))
        for arc in self.arcs:
            w += arc.node_weights(angles)
        return np.minimum(w, 1.0)

    def endpoints(self) -> np.ndarray:
        return np.array([p for arc in self.arcs for p in arc.endpoints], dtype=float)

    def subset(self, indices: Iterable[int]) -> "ArcSet":
        return ArcSet(tuple(self.arcs[i] for i in sorted(indices)))

    def to_json(self) -> str:
        return json.dumps({"arcs": [[a.start, a.end] for a in self.arcs]})

    @classmethod
    def from_json(cls, text: str) -> "ArcSet":
        return cls(tuple(Arc.between(a, b) for a, b in json.loads(text)["arcs"]))


def _check_disjoint(arcs: Sequence[Arc]) -> None:
    if len(arcs) < 2:
        return
    order = sorted(arcs, key=lambda a: a.start)
    nxt_starts = [a.start for a in order[1:]] + [order[0].start + TWO_PI]
    for arc, nxt in zip(order, nxt_starts):
        if arc.start + arc.length > nxt + 1e-12:
            raise GridError("arcs overlap")


#: Placeholder for "the whole circle" wherever an ArcSet is accepted.
FULL_CIRCLE = None


def arc_weights(angles: np.ndarray, arcs: ArcSet | None) -> np.ndarray:
    """Node weights of an arc union; ``None`` stands for the full circle."""
    if arcs is None:
        return np.ones(np.shape(angles))
    return arcs.node_weights(angles)


def distance_to_set(theta, E: BoundaryPointSet) -> np.ndarray | float:
    """Chordal distance ``min_p |e^{i theta} - e^{i p}|`` to a finite set."""
    if len(E) == 0:
        raise GridError("distance to an empty set is undefined")
    pts = np.exp(1j * E.as_array())
    z = np.exp(1j * np.asarray(theta, dtype=float))
    d = np.min(np.abs(z[..., None] - pts), axis=-1)
    return float(d) if np.ndim(d) == 0 else d


def distance_to_points(z, points: np.ndarray) -> np.ndarray:
    """Euclidean distance from points ``z`` (anywhere in the plane) to ``e^{i p}``."""
    pts = np.exp(1j * np.asarray(points, dtype=float))
    z = np.asarray(z, dtype=complex)
    return np.min(np.abs(z[..., None] - pts), axis=-1)


def complement_arcs(E: BoundaryPointSet, max_length: float | None = 0.5) -> ArcSet:
    """Arcs of the circle between consecutive points of ``E``.

    The arcs are split by :func:`normalize_arcset` unless ``max_length`` is
    ``None``.
    """
    if len(E) == 0:
        raise GridError("complement of an empty set is the whole circle")
    pts = E.as_array()
    nxt = np.append(pts[1:], pts[0] + TWO_PI)
    raw = ArcSet(tuple(Arc(a, b - a) for a, b in zip(pts, nxt)))
    return raw if max_length is None else normalize_arcset(raw, max_length)


def normalize_arcset(arcs: ArcSet, max_length: float = 0.5) -> ArcSet:
    """Split every arc into equal open pieces shorter than ``max_length``."""
    out = []
    for arc in arcs:
        pieces = int(np.floor(arc.length / max_length)) + 1
        step = arc.length / pieces
        out.extend(Arc(arc.start + k * step, step) for k in range(pieces))
    return ArcSet(tuple(out))


def tail_arcs(arcs: ArcSet, n: int) -> ArcSet:
    """Union of the arcs with index ``>= n``; empty once ``n`` passes the end."""
    return ArcSet(tuple(arcs.arcs[n:]))


# ---------------------------------------------------------------------------
# Carleson integral


@dataclass(frozen=True)
class CarlesonResult:
    value: float
    diverged: bool
    zero_fraction: float


def _graded_gl(length: float, levels: int, order: int):
    """Nodes/weights on (0, length] graded geometrically toward 0."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = length * 0.5 ** np.arange(levels + 1)
    edges = np.append(edges, 0.0)
    lo, hi = edges[1:], edges[:-1]
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def carleson_integral(E, refinement: int = 2 ** 12, levels: int = 40) -> CarlesonResult:
    """Integral of ``log(1/d(e^{it}, E))`` over the circle, chordal ``d``.

    ``E`` is a finite :class:`BoundaryPointSet` or an :class:`ArcSet` of closed
    arcs (a fattened set).  Each gap between consecutive points of ``E`` is
    split at its midpoint and both halves are integrated with Gauss-Legendre
    panels halving toward the singular endpoint.  If ``d`` vanishes on more
    than ``8/refinement`` of a uniform ``refinement``-node sample the integral
    is reported as divergent.
    """
    if refinement < 2 ** 12:
        raise GridError("refinement must be at least 2**12")
    if isinstance(E, ArcSet):
        if len(E) == 0:
            raise GridError("empty set")
        theta = TWO_PI * np.arange(refinement) / refinement
        inside = np.zeros(refinement, dtype=bool)
        for arc in E:
            rel = _wrap(theta - arc.start)
            inside |= rel <= arc.length
        frac = float(inside.mean())
        if frac > 8.0 / refinement:
            return CarlesonResult(float("inf"), True, frac)
        # thin set: integrate over the gaps between consecutive closed arcs
        order = sorted(E, key=lambda arc: arc.start)
        starts = np.array([arc.start + arc.length for arc in order])
        ends = np.array([arc.start for arc in order[1:]] + [order[0].start + TWO_PI])
        return _carleson_gaps(starts, ends, E.endpoints(), refinement, levels, frac)
    if len(E) == 0:
        raise GridError("Carleson integral of an empty set is undefined")
    pts = E.as_array()
    nxt = np.append(pts[1:], pts[0] + TWO_PI)
    return _carleson_gaps(pts, nxt, pts, refinement, levels, 0.0)


def _carleson_gaps(starts, ends, pts, refinement, levels, frac) -> CarlesonResult:
    order = max(4, min(64, refinement // (2 * (levels + 1) * len(starts))))
    total = 0.0
    for a, b in zip(starts, ends):
        half = 0.5 * (b - a)
        s, w = _graded_gl(half, levels, order)
        for theta in (a + s, b - s):
            d = distance_to_points(np.exp(1j * theta), pts)
            total += float(np.sum(w * -np.log(d)))
    return CarlesonResult(total, False, frac)


# ---------------------------------------------------------------------------
# Sample <-> coefficient transforms


@dataclass(frozen=True)
class TaylorCoefficients:
    """Coefficients ``a_0..a_K`` of a truncated power series."""

    coeffs: np.ndarray
    analyticity_defect: float = 0.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.size < 1:
            raise GridError("need at least one coefficient")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def tail_ratio(self) -> float:
        """``|a_K| / max|a_j|``; large values flag slow coefficient decay."""
        top = np.max(np.abs(self.coeffs))
        return float(abs(self.coeffs[-1]) / top) if top > 0 else 0.0

    def tail_flagged(self, tail_tol: float = 1e-6) -> bool:
        return self.tail_ratio() > tail_tol


def analyze(b: BoundaryGrid) -> TaylorCoefficients:
    """Keep DFT indices ``0..n/2``; report the energy at negative frequencies."""
    spec = np.fft.fft(b.values) / b.n
    half = b.n // 2
    defect = float(np.sum(np.abs(spec[half + 1:]) ** 2))
    return TaylorCoefficients(spec[: half + 1], defect)


def synthesize(c, z):
    """Evaluate ``sum a_j z^j`` (Horner) at points of the closed disc."""
    coeffs = c.coeffs if isinstance(c, TaylorCoefficients) else np.asarray(c, dtype=complex)
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1.0 + 1e-12):
        raise GridError("synthesize is only defined on the closed unit disc")
    out = np.polynomial.polynomial.polyval(z, coeffs)
    return complex(out) if out.ndim == 0 else out


def circle_values(coeffs: np.ndarray, r: float, n: int) -> np.ndarray:
    """Values of the power series on ``|z| = r`` at the ``n`` grid angles.

    Degrees ``q + m n`` share the angular factor ``e^{i q theta_j}``, so the
    series is folded into ``n`` bins with weights ``r**q (r**n)**m``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.size > n:
        pad = (-coeffs.size) % n
        blocks = np.concatenate([coeffs, np.zeros(pad, dtype=complex)]).reshape(-1, n)
        if r == 1.0:
            folded = blocks.sum(axis=0)
        else:
            folded = (r ** (n * np.arange(blocks.shape[0]))) @ blocks
    else:
        folded = coeffs
    if r != 1.0:
        folded = folded * r ** np.arange(folded.size)
    return np.fft.ifft(folded, n) * n


def derivative_coeffs(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.size == 1:
        return np.zeros(1, dtype=complex)
    return coeffs[1:] * np.arange(1, coeffs.size)


# ---------------------------------------------------------------------------
# Area quadrature


@dataclass(frozen=True)
class AnnularGrid:
    """Tensor grid: graded Gauss-Legendre radii times uniform angles.

    The radial rule is a composite Gauss-Legendre rule whose panels shrink
    geometrically toward ``r_max`` so that boundary singularities of
    ``|f'|^2`` are resolved.  ``area_weights`` carries the normalized area
    measure ``r dr dt / pi``.
    """

    n_angular: int
    n_radial: int = GL_PANELS * GL_PANEL_ORDER
    r_max: float = 1.0
    radii: np.ndarray = field(init=False, repr=False)
    radial_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        order = GL_PANEL_ORDER
        panels = max(1, self.n_radial // order)
        x, w = np.polynomial.legendre.leggauss(order)
        if self.r_max >= 1.0:
            gaps = 0.5 ** np.arange(panels)
            edges = np.append(1.0 - gaps, 1.0)
        else:
            floor = 1.0 - self.r_max
            gaps = floor ** (np.arange(panels + 1) / panels)
            edges = 1.0 - gaps
        lo, hi = edges[:-1], edges[1:]
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        object.__setattr__(self, "radii", (mid[:, None] + half[:, None] * x).ravel())
        object.__setattr__(self, "radial_weights", (half[:, None] * w).ravel())

    @property
    def angles(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_angular) / self.n_angular

    @property
    def ring_weights(self) -> np.ndarray:
        """Normalized area of each radial ring per angular node."""
        return self.radial_weights * self.radii / np.pi * (TWO_PI / self.n_angular)

    def area_weights(self) -> np.ndarray:
        return np.repeat(self.ring_weights[:, None], self.n_angular, axis=1)

    def total_area(self) -> float:
        return float(np.sum(self.ring_weights) * self.n_angular)
