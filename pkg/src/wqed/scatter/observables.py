"""Observables of truncated coherent (and Fock) output states.

For a coherent input truncated at three photons the power and the
normally ordered correlation functions are evaluated with the
consistent-order expansion

    P(x)        = a2 |p1|^2 + a4 [m2 - |p1|^2] + a6 [m3/2 - m2 + |p1|^2/2]
    G2(x1,x2)   = a4 |p2|^2 + a6 [int dy |p3|^2 - |p2|^2]
    G3(x)       = a6 |p3(x,x,x)|^2

with a2n = |alpha|^{2n}, m2(x) = int |p2(x,y)|^2 dy and
m3(x) = iint |p3(x,y,z)|^2 dy dz.  This expansion conserves the photon
flux and the second factorial moment of the untruncated coherent state
exactly.  Window statistics use the truncated state itself with exact
Poisson sector weights and binomial inside/outside assignments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from wqed.core import Grid, ValidationError
from wqed.scatter.single import WaveFn1
from wqed.scatter.twophoton import WaveFn2
from wqed.scatter.threephoton import WaveFn3


@dataclass
class CoherentOutput:
    """Poisson-weighted few-photon output: e^{-|a|^2/2} sum_n a^n/sqrt(n!) |out_n>."""

    alpha: float
    wf1: WaveFn1
    wf2: Optional[WaveFn2] = None
    wf3: Optional[WaveFn3] = None
    meta: dict = field(default_factory=dict)

    @property
    def mean_n(self) -> float:
        return self.alpha ** 2

    def truncation_residual(self) -> float:
        """Neglected Poisson weight beyond the highest stored component."""
        nmax = 1 + (self.wf2 is not None) + (self.wf3 is not None)
        nbar = self.mean_n
        kept = sum(np.exp(-nbar) * nbar ** n / _fact(n) for n in range(nmax + 1))
        return float(1.0 - kept)


def _fact(n: int) -> float:
    out = 1.0
    for i in range(2, n + 1):
        out *= i
    return out


def coherent_output(alpha: float, wf1: WaveFn1, wf2: Optional[WaveFn2] = None,
                    wf3: Optional[WaveFn3] = None,
                    truncation_tol: float = 1e-2) -> CoherentOutput:
    """Bundle per-photon-number outputs into a truncated coherent state.

    The four-photon Poisson weight e^{-|a|^2}|a|^8/4! is reported and a
    warning is embedded in the metadata when it exceeds truncation_tol.
    """
    out = CoherentOutput(alpha=alpha, wf1=wf1, wf2=wf2, wf3=wf3)
    w4 = np.exp(-alpha ** 2) * alpha ** 8 / 24.0
    out.meta["four_photon_weight"] = float(w4)
    if w4 > truncation_tol:
        out.meta["warning"] = (
            f"four-photon weight {w4:.3e} exceeds truncation tolerance {truncation_tol:g}")
    return out


@dataclass
class ObservableSet:
    """Power and equal-position correlation functions on a common grid."""

    x: np.ndarray
    P: np.ndarray
    G2: np.ndarray
    G3: np.ndarray
    G2_map: Optional[np.ndarray] = None
    window: Optional[dict] = None
    meta: dict = field(default_factory=dict)

    def validate_positive(self, eps_scale: float = 1e-10):
        for name in ("P", "G2", "G3"):
            arr = getattr(self, name)
            floor = -eps_scale * max(arr.max(), 1e-300)
            if arr.min() < floor:
                raise ValidationError(f"{name} has entries below -eps_numeric")


def _interp(xt: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    return np.interp(xt, xs, ys, left=0.0, right=0.0)


def observables(state: CoherentOutput, grid: Optional[Grid] = None,
                g2_map: bool = False) -> ObservableSet:
    """Consistent-order observables of a truncated coherent output."""
    wf1, wf2, wf3 = state.wf1, state.wf2, state.wf3
    out_grid = grid or wf1.grid
    x = out_grid.x
    a2 = state.alpha ** 2
    p1sq = _interp(x, wf1.grid.x, np.abs(wf1.psi) ** 2)
    P = a2 * p1sq
    G2 = np.zeros_like(P)
    G3 = np.zeros_like(P)
    G2m = None
    meta = {"alpha": state.alpha}

    if wf2 is not None:
        m2 = _interp(x, wf2.grid.x,
                     np.sum(np.abs(wf2.psi) ** 2, axis=1) * wf2.grid.dx)
        p2diag = _interp(x, wf2.grid.x, np.abs(np.diagonal(wf2.psi)) ** 2)
        P = P + a2 ** 2 * (m2 - p1sq)
        G2 = a2 ** 2 * p2diag
    if wf3 is not None:
        m3 = _interp(x, wf3.grid.x,
                     np.sum(np.abs(wf3.psi) ** 2, axis=(1, 2)) * wf3.grid.dx ** 2)
        g2of3 = _interp(x, wf3.grid.x, wf3.g2_equal() / 6.0)
        g3diag = _interp(x, wf3.grid.x, wf3.g3_equal() / 6.0)
        m2_on = m2 if wf2 is not None else np.zeros_like(P)
        p2d_on = p2diag if wf2 is not None else np.zeros_like(P)
        P = P + a2 ** 3 * (0.5 * m3 - m2_on + 0.5 * p1sq)
        G2 = G2 + a2 ** 3 * (g2of3 - p2d_on)
        G3 = a2 ** 3 * g3diag

    if g2_map and wf2 is not None:
        G2m = a2 ** 2 * np.abs(wf2.psi) ** 2
        if wf3 is not None and wf3.grid.n_points == wf2.grid.n_points:
            marg = np.sum(np.abs(wf3.psi) ** 2, axis=2) * wf3.grid.dx
            G2m = G2m + a2 ** 3 * (marg - np.abs(wf2.psi) ** 2)

    obs = ObservableSet(x=x, P=P, G2=G2, G3=G3, G2_map=G2m, meta=meta)
    dx = out_grid.dx
    meta["photon_flux"] = float(np.sum(P) * dx)
    meta["second_factorial_moment"] = float(np.sum(G2) * dx) if wf2 is None else None
    if wf2 is not None:
        # reduction consistency: integral of the two-point G2 equals <N(N-1)>
        g2_int = a2 ** 2 * wf2.norm2(kink_corrected=False)
        if wf3 is not None:
            g2_int += a2 ** 3 * (wf3.norm2(kink_corrected=False)
                                 - wf2.norm2(kink_corrected=False))
        meta["second_factorial_moment"] = float(g2_int)
        meta["reduction_residual"] = float(abs(g2_int - a2 ** 2))
    # numerical negativity clip within eps tolerance
    for arr in (obs.P, obs.G2, obs.G3):
        tiny = 1e-10 * max(arr.max(), 0.0)
        np.clip(arr, -tiny, None, out=arr)
    return obs


def fock_observables(wf, g2_map: bool = False) -> ObservableSet:
    """Observables of a pure n-photon output state (n = 1, 2 or 3)."""
    if isinstance(wf, WaveFn1):
        P = np.abs(wf.psi) ** 2
        z = np.zeros_like(P)
        return ObservableSet(x=wf.grid.x, P=P, G2=z, G3=z.copy())
    if isinstance(wf, WaveFn2):
        P = wf.power()
        G2 = 2.0 * np.abs(np.diagonal(wf.psi)) ** 2
        G2m = 2.0 * np.abs(wf.psi) ** 2 if g2_map else None
        return ObservableSet(x=wf.grid.x, P=P, G2=G2, G3=np.zeros_like(P),
                             G2_map=G2m)
    if isinstance(wf, WaveFn3):
        return ObservableSet(x=wf.grid.x, P=wf.power(), G2=wf.g2_equal(),
                             G3=wf.g3_equal())
    raise ValidationError("fock_observables expects WaveFn1/2/3")


# ---------------------------------------------------------------------------
# Windowed photon-number statistics
# ---------------------------------------------------------------------------

def _window_weights(grid: Grid, x0: float, width: float) -> np.ndarray:
    """Indicator of [x0-w/2, x0+w/2] with half weights on boundary nodes."""
    lo, hi = x0 - width / 2.0, x0 + width / 2.0
    if lo < grid.x_min or hi > grid.x_max:
        raise ValidationError("window outside grid")
    x = grid.x
    w = ((x > lo) & (x < hi)).astype(float)
    for edge in (lo, hi):
        j = int(np.argmin(np.abs(x - edge)))
        if abs(x[j] - edge) < 1e-9 * grid.dx:
            w[j] = 0.5
    return w


def window_statistics(state, x0: float, width: float) -> dict:
    """P(m photons in [x0 - w/2, x0 + w/2]) for m = 0..3.

    For a CoherentOutput the sector probabilities combine exact Poisson
    weights with binomial inside/outside splits of |psi_n|^2; for a bare
    WaveFnK the input is treated as that Fock sector alone.
    """
    if isinstance(state, (WaveFn1, WaveFn2, WaveFn3)):
        weights = {1: None, 2: None, 3: None}
        if isinstance(state, WaveFn1):
            comps, pn = {1: state}, {1: 1.0}
        elif isinstance(state, WaveFn2):
            comps, pn = {2: state}, {2: 1.0}
        else:
            comps, pn = {3: state}, {3: 1.0}
        vac = 0.0
    else:
        comps = {1: state.wf1}
        if state.wf2 is not None:
            comps[2] = state.wf2
        if state.wf3 is not None:
            comps[3] = state.wf3
        nbar = state.mean_n
        pn = {n: float(np.exp(-nbar) * nbar ** n / _fact(n)) for n in comps}
        vac = float(np.exp(-nbar))

    P = np.zeros(4)
    P[0] += vac
    for n, wf in comps.items():
        grid = wf.grid
        w = _window_weights(grid, x0, width)
        dx = grid.dx
        if n == 1:
            inside = float(np.sum(w * np.abs(wf.psi) ** 2) * dx)
            total = wf.norm2()
            probs = {1: inside, 0: total - inside}
        elif n == 2:
            A = np.abs(wf.psi) ** 2
            ww = float(w @ A @ w) * dx ** 2
            wt = float(np.sum((w[:, None]) * A)) * dx ** 2
            total = float(np.sum(A)) * dx ** 2
            probs = {2: ww, 1: 2 * (wt - ww), 0: total - 2 * wt + ww}
        else:
            A = np.abs(wf.psi) ** 2
            sw = np.einsum("ijk,i,j,k->", A, w, w, w) * dx ** 3
            sww = np.einsum("ijk,i,j->", A, w, w) * dx ** 3
            swx = np.einsum("ijk,i->", A, w) * dx ** 3
            total = float(np.sum(A)) * dx ** 3
            probs = {3: sw, 2: 3 * (sww - sw),
                     1: 3 * (swx - 2 * sww + sw),
                     0: total - 3 * swx + 3 * sww - sw}
        for m, val in probs.items():
            P[m] += pn[n] * val

    return {"P0": float(P[0]), "P1": float(P[1]), "P2": float(P[2]),
            "P3": float(P[3]), "x0": x0, "width": width,
            "completeness": float(P.sum())}
