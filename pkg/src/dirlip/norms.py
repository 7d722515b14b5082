"""Sup, Lipschitz and Dirichlet norms and localized energies."""
from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .disc import TWO_PI, AnnularGrid, Arc, ArcSet, circle_values, derivative_coeffs
from .factor import DiscFunction


@dataclass(frozen=True)
class NormReport:
    sup_norm: float
    lip_seminorm: float
    lip_norm: float
    dirichlet: float
    aalpha: float
    alpha: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class DirichletEnergy:
    """``D(f) = sum k |a_k|^2`` and ``||f||_D^2 = sum (1 + k)|a_k|^2``."""

    energy: float
    norm_squared: float


def lip_radii(n: int) -> np.ndarray:
    """``0`` and ``1 - 2**-k`` for ``k = 1..k_max`` with ``2**-k_max > 20 pi / n``."""
    radii = [0.0]
    k = 1
    while 2.0 ** -k > 10.0 * TWO_PI / n:
        radii.append(1.0 - 2.0 ** -k)
        k += 1
    return np.array(radii)


def _grid_for(f: DiscFunction, grid: AnnularGrid | None) -> AnnularGrid:
    if grid is None:
        return AnnularGrid(f.n)
    if grid.n_angular != f.n:
        raise ValueError(f"annular grid has {grid.n_angular} angles, function has {f.n}")
    return grid


def sup_norm(f: DiscFunction, grid: AnnularGrid | None = None) -> float:
    """Max of ``|f|`` over the boundary samples and the annular grid."""
    grid = _grid_for(f, grid)
    best = float(np.max(np.abs(f.boundary.values)))
    c = f.coeffs.coeffs
    for r in grid.radii:
        best = max(best, float(np.max(np.abs(circle_values(c, r, f.n)))))
    return best


def lip_profile(f: DiscFunction, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Radii and ``max_theta (1 - r)**(1 - alpha) |f'(r e^{i theta})|`` per radius."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    radii = lip_radii(f.n)
    dc = derivative_coeffs(f.coeffs.coeffs)
    prof = np.array([
        (1.0 - r) ** (1.0 - alpha) * np.max(np.abs(circle_values(dc, r, f.n))) for r in radii
    ])
    return radii, prof


def lip_seminorm(f: DiscFunction, alpha: float) -> float:
    return float(np.max(lip_profile(f, alpha)[1]))


def dirichlet_energy_coeff(f: DiscFunction) -> DirichletEnergy:
    a2 = np.abs(f.coeffs.coeffs) ** 2
    k = np.arange(a2.size)
    energy = float(np.sum(k * a2))
    return DirichletEnergy(energy, energy + float(np.sum(a2)))


def region_weights(grid: AnnularGrid, region) -> np.ndarray:
    """Per-node indicator weights (shape ``n_radial x n_angular``) of a region.

    ``region`` is ``None`` (whole disc), an :class:`Arc` or :class:`ArcSet`
    (the sector over it, endpoint rays at half weight) or an explicit
    weight array.
    """
    shape = (grid.radii.size, grid.n_angular)
    if region is None:
        return np.ones(shape)
    if isinstance(region, Arc):
        region = ArcSet((region,))
    if isinstance(region, ArcSet):
        return np.broadcast_to(region.node_weights(grid.angles), shape)
    w = np.asarray(region, dtype=float)
    if w.shape != shape:
        raise ValueError(f"region weights must have shape {shape}, got {w.shape}")
    return w


def derivative_squared(f: DiscFunction, grid: AnnularGrid) -> np.ndarray:
    """``|f'|^2`` at every annular node, rows indexed by radius."""
    dc = derivative_coeffs(f.coeffs.coeffs)
    out = np.empty((grid.radii.size, grid.n_angular))
    for i, r in enumerate(grid.radii):
        out[i] = np.abs(circle_values(dc, r, f.n)) ** 2
    return out


def dirichlet_energy_quad(f: DiscFunction, region=None, grid: AnnularGrid | None = None) -> float:
    """``int_region |f'|^2 dA`` with ``dA = r dr dt / pi``."""
    grid = _grid_for(f, grid)
    w = region_weights(grid, region)
    if not np.any(w > 0):
        warnings.warn("region contains no quadrature nodes; energy set to 0", RuntimeWarning)
        return 0.0
    vals = derivative_squared(f, grid)
    return float(np.sum(grid.ring_weights[:, None] * w * vals))


def aalpha_norm(f: DiscFunction, alpha: float, grid: AnnularGrid | None = None) -> NormReport:
    sup = sup_norm(f, grid)
    lip = lip_seminorm(f, alpha)
    dirichlet = dirichlet_energy_coeff(f).energy
    lip_norm = sup + lip
    return NormReport(sup, lip, lip_norm, dirichlet, lip_norm + float(np.sqrt(dirichlet)), alpha)
