"""Outer functions, localized outer factors, Blaschke products.

Every outer function here is ``exp(h)`` where ``h`` is the Herglotz
integral of real boundary data ``v`` (a masked and scaled log-modulus).
Interior values of ``h`` and of its derivative come from the trapezoid
rule on the grid, summed in closed form on circles via the FFT; boundary
values come from the conjugate function (multiplier ``-i sgn k``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .disc import (
    TWO_PI,
    ArcSet,
    BoundaryGrid,
    TaylorCoefficients,
    analyze,
    arc_weights,
    circle_values,
    derivative_coeffs,
    synthesize,
)
from .errors import FactorizationError, GridResolutionError

DEFAULT_LAMBDA = 30.0
#: Evaluation band: direct kernels are used only for |z| <= 1 - DELTA_EVAL_FACTOR/n.
DELTA_EVAL_FACTOR = 10.0
MAX_CLAMPED_FRACTION = 0.25
MAX_FACTORIZATION_DEFECT = 0.05
_CHUNK = 1 << 22


def delta_eval(n: int) -> float:
    return DELTA_EVAL_FACTOR / n


def _check_radius(z, n: int) -> None:
    rmax = float(np.max(np.abs(z))) if np.size(z) else 0.0
    if rmax > 1.0 - delta_eval(n) + 1e-15:
        raise GridResolutionError(
            f"|z| = {rmax:.6g} exceeds 1 - {DELTA_EVAL_FACTOR:g}/n for n = {n}; "
            "refine the grid or evaluate through boundary values"
        )


# ---------------------------------------------------------------------------
# Log-modulus data


@dataclass(frozen=True)
class LogModulus:
    """Clamped boundary log-modulus ``max(log|f|, -lam)`` on a grid.

    Attributes
    ----------
    grid : BoundaryGrid
        Real values (stored as complex with zero imaginary part).
    lam : float
        Clamp floor.
    clamped : ndarray of bool
        Nodes where ``log|f| < -lam`` before clamping.

    Notes
    -----
    A node sitting exactly on an isolated zero of ``f`` carries the value
    ``-inf``.  If the zero behaves like ``c log|2 sin((t - t0)/2)|`` the
    trapezoid rule is exact when the node value is ``s - c log n``, where
    ``s`` is the smooth remainder at ``t0``.  ``c`` and ``s`` are fitted from
    the two nearest neighbours on each side, which keeps Poisson and
    Herglotz integrals accurate without ever touching the clamp.
    """

    grid: BoundaryGrid
    lam: float = DEFAULT_LAMBDA
    clamped: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.lam <= 0:
            raise FactorizationError("clamp floor must be positive")
        if self.clamped is None:
            object.__setattr__(self, "clamped", np.zeros(self.grid.n, dtype=bool))

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def values(self) -> np.ndarray:
        return self.grid.values.real

    @property
    def clamped_fraction(self) -> float:
        return float(np.mean(self.clamped))

    @classmethod
    def from_samples(cls, values, lam: float = DEFAULT_LAMBDA, correct_zeros: bool = True):
        """Build from complex (or modulus) samples of ``f`` on the grid."""
        mod = np.abs(np.asarray(values, dtype=complex))
        with np.errstate(divide="ignore"):
            u = np.log(mod)
        return cls.from_log(u, lam, correct_zeros)

    @classmethod
    def from_log(cls, u, lam: float = DEFAULT_LAMBDA, correct_zeros: bool = True):
        u = np.array(u, dtype=float)
        if np.any(np.isnan(u)) or np.any(u == np.inf):
            raise FactorizationError("log-modulus must not contain NaN or +inf")
        clamped = u < -lam
        if correct_zeros and np.any(clamped):
            u = _correct_isolated_zeros(u, clamped, lam)
        u = np.maximum(u, -lam)
        return cls(BoundaryGrid(u.size, u), lam, clamped)

    def masked(self, arcs: ArcSet | None) -> np.ndarray:
        """Log-modulus times the node weights of ``arcs`` (full circle if None)."""
        return arc_weights(self.grid.angles, arcs) * self.values


def _correct_isolated_zeros(u, clamped, lam):
    n = u.size
    out = u.copy()
    ell1 = np.log(2.0 * np.sin(np.pi / n))
    ell2 = np.log(2.0 * np.sin(2.0 * np.pi / n))
    for j in np.flatnonzero(clamped):
        nb = [(j + s) % n for s in (-2, -1, 1, 2)]
        if np.any(clamped[nb]):
            continue
        u1 = 0.5 * (u[nb[1]] + u[nb[2]])
        u2 = 0.5 * (u[nb[0]] + u[nb[3]])
        c = (u2 - u1) / (ell2 - ell1)
        if c <= 0:
            continue
        s = u1 - c * ell1
        out[j] = max(-lam, s - c * np.log(n))
    return out


# ---------------------------------------------------------------------------
# Kernels on circles and at arbitrary points


def _spectrum(v):
    return np.fft.fft(np.asarray(v, dtype=float)) / len(v)


def _analytic_spectrum(v) -> np.ndarray:
    """Power-series coefficients of the Herglotz integral of the trigonometric interpolant of ``v``.

    ``h(z) = vt_0 + 2 sum_{0<k<n/2} vt_k z^k + vt_{n/2} z^{n/2}``; exact for
    band-limited data, so constants carry exactly unit kernel mass.
    """
    n = len(v)
    vt = _spectrum(v)
    c = np.zeros(n, dtype=complex)
    half = n // 2
    c[0] = vt[0]
    c[1:half] = 2.0 * vt[1:half]
    c[half] = vt[half]
    return c


def herglotz_on_circle(v, r: float) -> np.ndarray:
    """Herglotz integral of ``v`` at ``r e^{i theta_j}`` (interpolant-exact)."""
    n = len(v)
    c = _analytic_spectrum(v) * r ** np.arange(n)
    return np.fft.ifft(c) * n


def poisson_on_circle(v, r: float) -> np.ndarray:
    """Poisson integral of ``v`` at ``r e^{i theta_j}``."""
    return herglotz_on_circle(v, r).real


def herglotz_derivative_on_circle(v, r: float) -> np.ndarray:
    """z-derivative of the Herglotz integral at ``r e^{i theta_j}``."""
    n = len(v)
    kappa = np.arange(n)
    c = _analytic_spectrum(v)
    d = np.zeros(n, dtype=complex)
    d[1:] = kappa[1:] * c[1:] * r ** (kappa[1:] - 1)
    theta = TWO_PI * kappa / n
    return np.exp(-1j * theta) * np.fft.ifft(d) * n


def _direct(kernel, v, z):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = len(v)
    zeta = np.exp(1j * TWO_PI * np.arange(n) / n)
    out = np.empty(z.shape, dtype=complex)
    flat, res = z.ravel(), out.ravel()
    step = max(1, _CHUNK // n)
    for s in range(0, flat.size, step):
        zz = flat[s:s + step, None]
        res[s:s + step] = kernel(zeta, zz) @ v / n
    return res.reshape(z.shape)


def herglotz_direct(v, z):
    return _direct(lambda zeta, zz: (zeta + zz) / (zeta - zz), np.asarray(v, float), z)


def herglotz_derivative_direct(v, z):
    return _direct(lambda zeta, zz: 2.0 * zeta / (zeta - zz) ** 2, np.asarray(v, float), z)


def poisson_over_distance_direct(v, z):
    """``(1/2pi) int v(t) / |e^{it} - z|^2 dt`` by the trapezoid rule."""
    return _direct(lambda zeta, zz: 1.0 / np.abs(zeta - zz) ** 2, np.asarray(v, float), z).real


def conjugate_boundary(v) -> np.ndarray:
    """Boundary trace ``v + i v~`` of the analytic completion of ``v``."""
    n = len(v)
    vt = np.fft.fft(np.asarray(v, dtype=float))
    sig = np.zeros(n, dtype=complex)
    sig[0] = vt[0]
    sig[1:n // 2] = 2.0 * vt[1:n // 2]
    sig[n // 2] = vt[n // 2]
    return np.fft.ifft(sig)


def _scalar_or_array(out, z):
    return complex(out.ravel()[0]) if np.ndim(z) == 0 else out


# ---------------------------------------------------------------------------
# Potentials and disc functions


@dataclass(frozen=True)
class Potential:
    """Herglotz potential ``h = H[v] + i*phase`` of real boundary data ``v``.

    ``zero_nodes`` marks grid nodes where the underlying modulus vanished
    (clamped data entered ``v`` with positive weight); the boundary value of
    ``exp(h)`` is set to zero there.
    """

    v: np.ndarray
    phase: float = 0.0
    zero_nodes: np.ndarray = field(default=None, repr=False)
    lam: float = DEFAULT_LAMBDA

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if self.zero_nodes is None:
            object.__setattr__(self, "zero_nodes", np.zeros(self.v.size, dtype=bool))

    @property
    def n(self) -> int:
        return self.v.size

    def __call__(self, z):
        _check_radius(z, self.n)
        return _scalar_or_array(herglotz_direct(self.v, z) + 1j * self.phase, z)

    def derivative(self, z):
        _check_radius(z, self.n)
        return _scalar_or_array(herglotz_derivative_direct(self.v, z), z)

    def on_circle(self, r: float) -> np.ndarray:
        _check_radius(r, self.n)
        return herglotz_on_circle(self.v, r) + 1j * self.phase

    def derivative_on_circle(self, r: float) -> np.ndarray:
        _check_radius(r, self.n)
        if r == 0.0:
            return np.full(self.n, 2.0 * _spectrum(self.v)[1])
        return herglotz_derivative_on_circle(self.v, r)

    def boundary(self) -> np.ndarray:
        return conjugate_boundary(self.v) + 1j * self.phase

    def scaled(self, rho: float) -> "Potential":
        zero = self.zero_nodes if rho > 0 else np.zeros(self.n, dtype=bool)
        return Potential(rho * self.v, rho * self.phase, zero, self.lam)

    def __add__(self, other: "Potential") -> "Potential":
        return Potential(self.v + other.v, self.phase + other.phase,
                         self.zero_nodes | other.zero_nodes, min(self.lam, other.lam))


#: Relative size below which trailing Taylor coefficients are dropped.
COEFF_TRIM = 1e-17
_MAX_OVERSAMPLE = 64


def _trim(c: np.ndarray, n_min: int = 1) -> np.ndarray:
    mag = np.abs(c)
    top = mag.max() if mag.size else 0.0
    keep = np.flatnonzero(mag > COEFF_TRIM * top)
    end = max(n_min, keep[-1] + 1 if keep.size else 1)
    return c[:end]


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    size = a.size + b.size - 1
    m = 1 << (size - 1).bit_length()
    return np.fft.ifft(np.fft.fft(a, m) * np.fft.fft(b, m))[:size]


def exp_series(pot: Potential) -> tuple[np.ndarray, np.ndarray]:
    """Taylor coefficients of ``exp(h)`` and its samples at the grid nodes.

    ``h`` is the degree ``n/2`` polynomial whose boundary trace is
    :meth:`Potential.boundary`.  ``exp(h)`` is entire but its coefficients
    only die out a few multiples of ``n`` past the grid, so it is sampled on
    an ``M n`` grid, with ``M`` doubled until the top quarter of the spectrum
    is negligible.  Sampling on the base grid alone would fold that tail back
    onto the low coefficients.
    """
    n = pot.n
    vt = np.fft.fft(pot.v) / n
    half = np.zeros(n // 2 + 1, dtype=complex)
    half[0] = vt[0] + 1j * pot.phase
    half[1:n // 2] = 2.0 * vt[1:n // 2]
    half[n // 2] = vt[n // 2]
    M = 4
    while True:
        size = M * n
        padded = np.zeros(size, dtype=complex)
        padded[:half.size] = half
        fine = np.exp(np.fft.ifft(padded) * size)
        coeffs = np.fft.fft(fine) / size
        mag = np.abs(coeffs)
        if mag[3 * size // 4:].max() <= 1e-15 * mag.max() or M >= _MAX_OVERSAMPLE:
            break
        M *= 2
    return _trim(coeffs, n), fine[::M]


@dataclass(frozen=True)
class DiscFunction:
    """Analytic function carried by boundary samples and Taylor coefficients.

    Functions built from analytic data keep all ``n`` DFT bins as Taylor
    coefficients ``a_0..a_{n-1}``: an analytic boundary function has no
    negative frequencies, so the only error in bin ``k`` is aliasing from
    degrees ``k + n, k + 2n, ...`` and ``synthesize`` reproduces the samples.
    """

    boundary: BoundaryGrid
    coeffs: TaylorCoefficients
    potential: Potential | None = None
    lam: float = DEFAULT_LAMBDA

    @property
    def n(self) -> int:
        return self.boundary.n

    @property
    def has_potential(self) -> bool:
        return self.potential is not None

    # construction -------------------------------------------------------
    @classmethod
    def from_samples(cls, values, lam: float = DEFAULT_LAMBDA) -> "DiscFunction":
        """Samples of an arbitrary boundary function; negative frequencies dropped."""
        b = BoundaryGrid(len(values), values)
        return cls(b, analyze(b), None, lam)

    @classmethod
    def from_analytic_samples(cls, values, potential=None, lam=DEFAULT_LAMBDA, quad_values=None):
        """Samples known to extend analytically; all ``n`` bins are kept.

        ``quad_values`` optionally replaces ``values`` in the transform.  It
        is used at boundary zeros, where the point value 0 is a poor
        trapezoid sample of a ``|t|^beta`` cusp.
        """
        b = BoundaryGrid(len(values), values)
        src = b.values if quad_values is None else np.asarray(quad_values, dtype=complex)
        spec = np.fft.fft(src) / b.n
        return cls(b, TaylorCoefficients(spec), potential, lam)

    @classmethod
    def from_coeffs(cls, coeffs, n: int, lam: float = DEFAULT_LAMBDA) -> "DiscFunction":
        coeffs = np.asarray(coeffs, dtype=complex)
        values = circle_values(coeffs, 1.0, n)
        return cls(BoundaryGrid(n, values), TaylorCoefficients(coeffs), None, lam)

    @classmethod
    def from_function(cls, func, n: int, lam: float = DEFAULT_LAMBDA) -> "DiscFunction":
        theta = TWO_PI * np.arange(n) / n
        return cls.from_analytic_samples(func(np.exp(1j * theta)), lam=lam)

    @classmethod
    def from_potential(cls, pot: Potential) -> "DiscFunction":
        coeffs, quad = exp_series(pot)
        values = np.where(pot.zero_nodes, 0.0, quad)
        return cls(BoundaryGrid(pot.n, values), TaylorCoefficients(coeffs), pot, pot.lam)

    @classmethod
    def constant(cls, c: complex, n: int) -> "DiscFunction":
        pot = None
        if c != 0:
            pot = Potential(np.full(n, np.log(abs(c))), float(np.angle(c)))
        coeffs = np.zeros(n, dtype=complex)
        coeffs[0] = c
        return cls(BoundaryGrid(n, np.full(n, c, dtype=complex)), TaylorCoefficients(coeffs), pot)

    # evaluation ---------------------------------------------------------
    def __call__(self, z):
        return synthesize(self.coeffs, z)

    def derivative(self, z):
        return synthesize(derivative_coeffs(self.coeffs.coeffs), z)

    def on_circle(self, r: float) -> np.ndarray:
        if r >= 1.0:
            return self.boundary.values.copy()
        return circle_values(self.coeffs.coeffs, r, self.n)

    def derivative_on_circle(self, r: float) -> np.ndarray:
        return circle_values(derivative_coeffs(self.coeffs.coeffs), r, self.n)

    def quad_samples(self) -> np.ndarray:
        """Samples reproduced by the coefficients (differ from ``boundary`` only at zeros)."""
        return circle_values(self.coeffs.coeffs, 1.0, self.n)

    def consistency_error(self) -> float:
        """Max relative mismatch between coefficients and samples on strong nodes."""
        synth = circle_values(self.coeffs.coeffs, 1.0, self.n)
        mod = np.abs(self.boundary.values)
        strong = mod > np.exp(-self.lam / 2)
        if not np.any(strong):
            return 0.0
        return float(np.max(np.abs(synth - self.boundary.values)[strong]) / np.max(mod))

    # algebra ------------------------------------------------------------
    def scale(self, c: complex) -> "DiscFunction":
        pot = None
        if self.potential is not None and c != 0:
            p = self.potential
            pot = Potential(p.v + np.log(abs(c)), p.phase + float(np.angle(c)), p.zero_nodes, p.lam)
        return DiscFunction(BoundaryGrid(self.n, c * self.boundary.values),
                            TaylorCoefficients(c * self.coeffs.coeffs), pot, self.lam)

    def __mul__(self, other: "DiscFunction") -> "DiscFunction":
        if not isinstance(other, DiscFunction):
            return self.scale(other)
        _same_grid(self, other)
        if self.potential is not None and other.potential is not None:
            return DiscFunction.from_potential(self.potential + other.potential)
        coeffs = _trim(_convolve(self.coeffs.coeffs, other.coeffs.coeffs))
        return DiscFunction(BoundaryGrid(self.n, self.boundary.values * other.boundary.values),
                            TaylorCoefficients(coeffs), None, min(self.lam, other.lam))

    __rmul__ = __mul__

    def __add__(self, other: "DiscFunction") -> "DiscFunction":
        _same_grid(self, other)
        ca, cb = self.coeffs.coeffs, other.coeffs.coeffs
        size = max(ca.size, cb.size)
        c = np.zeros(size, dtype=complex)
        c[:ca.size] += ca
        c[:cb.size] += cb
        return DiscFunction(BoundaryGrid(self.n, self.boundary.values + other.boundary.values),
                            TaylorCoefficients(c), None, min(self.lam, other.lam))

    def __sub__(self, other: "DiscFunction") -> "DiscFunction":
        return self + other.scale(-1.0)

    # serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        b, c = self.boundary.values, self.coeffs.coeffs
        return {
            "n": self.n,
            "boundary_re": b.real.tolist(),
            "boundary_im": b.imag.tolist(),
            "coeffs_re": c.real.tolist(),
            "coeffs_im": c.imag.tolist(),
            "has_potential": self.has_potential,
            "lambda": self.lam,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "DiscFunction":
        n = int(d["n"])
        values = np.asarray(d["boundary_re"], float) + 1j * np.asarray(d["boundary_im"], float)
        coeffs = np.asarray(d["coeffs_re"], float) + 1j * np.asarray(d["coeffs_im"], float)
        lam = float(d.get("lambda", DEFAULT_LAMBDA))
        pot = None
        if d.get("has_potential", False):
            # the potential is determined by |f| on T and the phase of f(0)
            L = LogModulus.from_samples(values, lam)
            pot = Potential(L.values, float(np.angle(coeffs[0])) if coeffs[0] != 0 else 0.0,
                            L.clamped, lam)
        return cls(BoundaryGrid(n, values), TaylorCoefficients(coeffs), pot, lam)

    @classmethod
    def from_json(cls, text: str) -> "DiscFunction":
        return cls.from_dict(json.loads(text))


def _same_grid(a: DiscFunction, b: DiscFunction) -> None:
    if a.n != b.n:
        raise GridResolutionError(f"grid sizes differ: {a.n} vs {b.n}")


# ---------------------------------------------------------------------------
# Operations


def _check_modulus(L: LogModulus) -> None:
    if L.clamped_fraction >= MAX_CLAMPED_FRACTION:
        raise FactorizationError(
            f"{L.clamped_fraction:.1%} of the nodes are clamped at -{L.lam:g}; "
            "the modulus data is too degenerate"
        )


def localized_potential(L: LogModulus, arcs: ArcSet | None, scale: float = 1.0) -> Potential:
    """Potential of ``scale * log|f|`` restricted to ``arcs`` (None = full circle)."""
    w = arc_weights(L.grid.angles, arcs)
    zero = L.clamped & (w > 0) if scale > 0 else np.zeros(L.n, dtype=bool)
    return Potential(scale * w * L.values, 0.0, zero, L.lam)


def herglotz_potential(L: LogModulus, arcs: ArcSet | None, z):
    """Localized Herglotz integral of the log-modulus at interior points."""
    return localized_potential(L, arcs)(z)


def g_kernel(L: LogModulus, arcs: ArcSet | None, z):
    """Derivative kernel ``g_Gamma(z)``; equals ``f'/f`` for the full circle."""
    return localized_potential(L, arcs).derivative(z)


def outer_from_modulus(L: LogModulus, arcs: ArcSet | None = None) -> DiscFunction:
    """Outer function with modulus ``exp(L)`` on ``arcs`` and 1 elsewhere."""
    _check_modulus(L)
    return DiscFunction.from_potential(localized_potential(L, arcs))


def localized_outer_power(L: LogModulus, arcs: ArcSet | None, N: int) -> DiscFunction:
    """``f_Gamma ** N`` computed as ``exp(N h_Gamma)``."""
    if N < 1 or int(N) != N:
        raise ValueError("N must be a positive integer")
    _check_modulus(L)
    return DiscFunction.from_potential(localized_potential(L, arcs, float(N)))


def outer_power(f: DiscFunction, rho: float) -> DiscFunction:
    """``f ** rho`` through the potential, ``exp(rho h)``."""
    if f.potential is None:
        raise FactorizationError(
            "outer_power needs an outer function with a potential; "
            "call inner_outer_split first"
        )
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    if rho == 0:
        return DiscFunction.constant(1.0, f.n)
    if rho == 1:
        return f
    return DiscFunction.from_potential(f.potential.scaled(rho))


def product_potential(f: DiscFunction, rho: float, L: LogModulus, arcs, N: int) -> DiscFunction:
    """``f**rho * f_Gamma**N`` as a single exponential."""
    if f.potential is None:
        raise FactorizationError("first factor must be outer")
    return DiscFunction.from_potential(f.potential.scaled(rho) + localized_potential(L, arcs, N))


# ---------------------------------------------------------------------------
# Blaschke products and factorization


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product; ``zeros`` is a tuple of ``(point, multiplicity)``."""

    zeros: tuple = ()

    def __post_init__(self):
        zs = []
        for item in self.zeros:
            a, m = (item, 1) if np.isscalar(item) else item
            if abs(a) >= 1:
                raise FactorizationError(f"Blaschke zero {a} is not inside the disc")
            if int(m) != m or m < 1:
                raise FactorizationError("multiplicities must be positive integers")
            zs.append((complex(a), int(m)))
        object.__setattr__(self, "zeros", tuple(zs))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.zeros)

    def __call__(self, z):
        return blaschke_eval(self, z)

    def to_function(self, n: int) -> DiscFunction:
        return DiscFunction.from_function(self, n)


def blaschke_eval(B: BlaschkeProduct, z):
    z = np.asarray(z, dtype=complex)
    out = np.ones(z.shape, dtype=complex)
    for a, m in B.zeros:
        if a == 0:
            fac = z
        else:
            # exp(-i arg a) stays unimodular even for subnormal |a|
            fac = np.exp(-1j * np.angle(a)) * (a - z) / (1.0 - np.conj(a) * z)
        out = out * fac ** m
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Factorization:
    inner: DiscFunction
    outer: DiscFunction
    defect: float


def inner_outer_split(f: DiscFunction) -> Factorization:
    """Split ``f`` into an inner part and the outer function of ``|f|``.

    The inner part is ``f / outer`` on the unclamped boundary nodes; clamped
    nodes are filled by the nearest unclamped quotient.  The defect is the
    larger of ``max | |inner| - 1 |`` over the boundary and the relative
    negative-frequency amplitude of the inner samples; a singular inner
    factor shows up in the latter.
    """
    vals = f.boundary.values
    if not np.any(vals != 0):
        raise FactorizationError("f vanishes identically")
    L = LogModulus.from_samples(vals, f.lam)
    outer = outer_from_modulus(L)
    good = ~L.clamped & (np.abs(outer.boundary.values) > 0)
    q = np.zeros(f.n, dtype=complex)
    q[good] = vals[good] / outer.boundary.values[good]
    if not np.all(good):
        idx = np.flatnonzero(good)
        bad = np.flatnonzero(~good)
        pos = np.searchsorted(idx, bad) % idx.size
        q[bad] = q[idx[pos]] / np.abs(q[idx[pos]])
    mod_defect = float(np.max(np.abs(np.abs(q[good]) - 1.0)))
    inner_b = BoundaryGrid(f.n, q)
    coeffs = analyze(inner_b)
    energy = float(np.mean(np.abs(q) ** 2))
    ana_defect = float(np.sqrt(coeffs.analyticity_defect / energy))
    defect = max(mod_defect, ana_defect)
    if defect > MAX_FACTORIZATION_DEFECT:
        raise FactorizationError(
            f"factorization defect {defect:.3g} exceeds {MAX_FACTORIZATION_DEFECT}; "
            "f may carry a singular inner factor or the grid is too coarse"
        )
    inner = DiscFunction(inner_b, coeffs, None, f.lam)
    return Factorization(inner, outer, defect)
