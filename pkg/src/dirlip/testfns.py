"""Reference functions with boundary zeros and their closed forms."""
from __future__ import annotations

import numpy as np

from .disc import TWO_PI, BoundaryPointSet
from .factor import DEFAULT_LAMBDA, DiscFunction, LogModulus, outer_from_modulus

CANONICAL_EXPONENT = 0.6


def canonical_closed(z, p: float = CANONICAL_EXPONENT):
    """``((1 - z)/2)**p`` with the principal branch (analytic in the disc)."""
    return ((1.0 - np.asarray(z, dtype=complex)) / 2.0) ** p


def two_zero_closed(z, p: float = CANONICAL_EXPONENT):
    """``((1 - z**2)/4)**p``; zeros at 1 and -1."""
    z = np.asarray(z, dtype=complex)
    return ((1.0 - z * z) / 4.0) ** p


CANONICAL_ZEROS = BoundaryPointSet((0.0,))
TWO_ZERO_ZEROS = BoundaryPointSet((0.0, np.pi))


def _outer_from_closed(func, zeros: BoundaryPointSet, n: int, lam: float) -> DiscFunction:
    """Outer function from closed-form boundary modulus with exact zeros.

    ``exp(i pi)`` is not exactly ``-1`` in floating point, so the modulus at a
    zero node comes out near ``1e-10`` instead of 0.  The known zero nodes
    are set to 0 so the log-modulus correction sees them.
    """
    theta = TWO_PI * np.arange(n) / n
    mod = np.abs(func(np.exp(1j * theta)))
    idx = np.rint(zeros.as_array() * n / TWO_PI).astype(int) % n
    mod[idx] = 0.0
    return outer_from_modulus(LogModulus.from_samples(mod, lam))


def canonical(n: int, lam: float = DEFAULT_LAMBDA) -> DiscFunction:
    """The outer function ``((1 - z)/2)**0.6`` built from its boundary modulus."""
    return _outer_from_closed(canonical_closed, CANONICAL_ZEROS, n, lam)


def two_zero(n: int, lam: float = DEFAULT_LAMBDA) -> DiscFunction:
    """The outer function ``((1 - z**2)/4)**0.6`` with zeros at 1 and -1."""
    return _outer_from_closed(two_zero_closed, TWO_ZERO_ZEROS, n, lam)

FAMILY = {
    "canonical": (canonical, CANONICAL_ZEROS),
    "two_zero": (two_zero, TWO_ZERO_ZEROS),
}


def zero_set(f: DiscFunction, lam: float | None = None) -> BoundaryPointSet:
    """Boundary nodes where ``|f| < exp(-lam/2)`` (the numerical zero set)."""
    lam = f.lam if lam is None else lam
    theta = TWO_PI * np.arange(f.n) / f.n
    small = np.abs(f.boundary.values) < np.exp(-lam / 2)
    return BoundaryPointSet(tuple(theta[small]))


FAST_DECAY_STRENGTH = 15.0
FAST_DECAY_LAMBDA = 1000.0


def fast_decay(n: int, strength: float = FAST_DECAY_STRENGTH,
               lam: float = FAST_DECAY_LAMBDA) -> DiscFunction:
    """Outer function with ``log|f(e^{it})| = -strength / sqrt|sin t|``.

    It vanishes faster than any power at 1 and -1, which is what populates
    the middle region near the arc endpoints; the clamp floor must sit well
    below the node values (about ``-strength * sqrt(n / 2pi)``).
    """
    theta = TWO_PI * np.arange(n) / n
    s = np.abs(np.sin(theta))
    idx = np.rint(TWO_ZERO_ZEROS.as_array() * n / TWO_PI).astype(int) % n
    s[idx] = 0.0
    with np.errstate(divide="ignore"):
        u = -strength / np.sqrt(s)
    return outer_from_modulus(LogModulus.from_log(u, lam))


FAMILY["fast_decay"] = (fast_decay, TWO_ZERO_ZEROS)
