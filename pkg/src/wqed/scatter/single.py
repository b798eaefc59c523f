"""Single-photon transport: t_k^N applied in the spectral domain."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from wqed.core import EmitterArray, Grid, PulseSpec, ValidationError, mode_amplitudes


class GridLeakageError(RuntimeError):
    """Too much output mass reached the grid boundary."""


def transmission_single(k, gamma: float = 1.0):
    """Single-photon transmission t_k = (k - i Gamma/2)/(k + i Gamma/2).

    Unimodular for real k; t_0 = -1 (pi phase shift on resonance).
    """
    if gamma <= 0:
        raise ValidationError("gamma > 0 violated")
    k = np.asarray(k, dtype=float)
    return (k - 0.5j * gamma) / (k + 0.5j * gamma)


def transmission_single_lossy(k, gamma: float, gamma0: float):
    """t_k with loss, via k -> k + i Gamma_0/2: the denominator width becomes
    Gamma_tot/2 and |t| < 1 off the unitarity circle."""
    k = np.asarray(k, dtype=float)
    return (k - 0.5j * (gamma - gamma0)) / (k + 0.5j * (gamma + gamma0))


@dataclass
class WaveFn1:
    """Single-photon amplitude on a grid."""

    grid: Grid
    psi: np.ndarray
    meta: dict = field(default_factory=dict)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dx)

    def power(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def centroid(self) -> float:
        p = self.power()
        return float(np.sum(self.grid.x * p) / np.sum(p))


def boundary_mass_fraction(psi: np.ndarray, edge_cells: int = 4) -> float:
    p = np.abs(psi) ** 2
    total = p.sum()
    if total == 0:
        return 0.0
    edge = p[:edge_cells].sum() + p[-edge_cells:].sum()
    return float(edge / total)


def scatter_one(pulse, array: EmitterArray, grid: Grid,
                leak_tol: float = 1e-6) -> WaveFn1:
    """Propagate a single-photon pulse past N emitters.

    psi_out = inv FT [ t_k^N  FT(psi_in) ]; with gamma_0 > 0 the lossy t_k
    is used and the output norm drops below one.
    """
    if isinstance(pulse, PulseSpec):
        psi_in = mode_amplitudes(pulse, grid)
    else:
        psi_in = np.asarray(pulse, dtype=complex)
        nrm = np.sqrt(np.sum(np.abs(psi_in) ** 2) * grid.dx)
        psi_in = psi_in / nrm
    if array.gamma_0 > 0:
        t = transmission_single_lossy(grid.k, array.gamma_r, array.gamma_0)
    else:
        t = transmission_single(grid.k, array.gamma_r)
    psi_out = grid.inv(t ** array.n_emitters * grid.fwd(psi_in))
    leak = boundary_mass_fraction(psi_out)
    if leak > leak_tol:
        raise GridLeakageError(
            f"{leak:.2e} of the output mass sits at the grid boundary (tol {leak_tol:g})")
    meta = {"n_emitters": array.n_emitters, "norm2": float(np.sum(np.abs(psi_out) ** 2) * grid.dx)}
    return WaveFn1(grid=grid, psi=psi_out, meta=meta)
