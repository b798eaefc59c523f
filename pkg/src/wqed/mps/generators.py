"""MPO generators of the driven cascaded (semi-)chiral master equation.

Everything is built in the gauge where the right-propagating phases are
absorbed into the spin operators: the drive and the Gamma_R cascade
terms are phase free, the Gamma_L terms carry e^{2 i k0 (x_l - x_j)} and
with Gamma_L = 0 the generators are manifestly independent of the
emitter positions.  In this gauge the transmitted-field operator is
a_out(t) = E_in(t) + i sqrt(Gamma_R) sum_j sigma^-_j.

The effective Hamiltonian (bond <= 4):

    H_eff = sum_j [ -i (Gamma_tot/2) n_j + sqrt(G_R) (E sigma^+_j + E* sigma^-_j) ]
            - i G_R sum_{l>j} sigma^+_l sigma^-_j
            - i G_L sum_{l>j} e^{2 i k0 (x_l - x_j)} sigma^+_j sigma^-_l

For quantum trajectories the non-Hermitian drift of the displaced
output-photon channel C_R = E + i sqrt(G_R) S adds sqrt(G_R) E* S to the
drive slot (the c-number -i|E|^2/2 is tracked analytically by the
integrator), which reproduces the same master equation on average.

The Liouvillian acts on site-local (ket, bra) pairs (physical dimension
4, vec|s><s'| -> |s>|s'>): A rho B becomes kron(A_j, B_j^T) per site.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from wqed.core import EmitterArray, ValidationError
from wqed.mps.tensors import MpoOperator

SM = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |g><e|
SP = SM.T.conj()
NUM = SP @ SM
I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)


def sK(A: np.ndarray) -> np.ndarray:
    """Superoperator of A rho (ket side)."""
    return np.kron(A, I2)


def sB(B: np.ndarray) -> np.ndarray:
    """Superoperator of rho B (bra side)."""
    return np.kron(I2, B.T)


@dataclass
class Generators:
    """Generator bundle for one EmitterArray (+ drive envelope)."""

    array: EmitterArray
    drive: Callable[[float], complex]
    k0_phases: np.ndarray = field(init=False)

    def __post_init__(self):
        # doubled gauge phases on the Gamma_L terms
        self.k0_phases = 2.0 * self.array.positions()

    # -- H_eff (spin chain, d = 2) -----------------------------------------

    def heff_mpo(self, t: float, displaced: bool = False) -> MpoOperator:
        arr = self.array
        N = arr.n_emitters
        E = self.drive(t)
        gr, gl = arr.gamma_r, arr.gamma_l
        gtot = arr.gamma_tot
        sgr = np.sqrt(gr)
        states = ["done", "R"] + (["L"] if gl > 0 else []) + ["start"]
        idx = {s: i for i, s in enumerate(states)}
        chi = len(states)
        tensors = []
        for j in range(N):
            W = np.zeros((chi, chi, 2, 2), dtype=complex)
            W[idx["done"], idx["done"]] = I2
            W[idx["start"], idx["start"]] = I2
            h = -0.5j * gtot * NUM + sgr * (E * SP + np.conj(E) * SM)
            if displaced:
                h = h + sgr * np.conj(E) * SM
            W[idx["start"], idx["done"]] = h
            # R cascade: open sigma^- at j, close -i G_R sigma^+ at l > j
            W[idx["start"], idx["R"]] = SM
            W[idx["R"], idx["R"]] = I2
            W[idx["R"], idx["done"]] = -1j * gr * SP
            if gl > 0:
                ph = self.k0_phases[j]
                W[idx["start"], idx["L"]] = np.exp(-1j * ph) * SP
                W[idx["L"], idx["L"]] = I2
                W[idx["L"], idx["done"]] = -1j * gl * np.exp(1j * ph) * SM
            tensors.append(W)
        tensors[0] = tensors[0][idx["start"]:idx["start"] + 1]
        tensors[-1] = tensors[-1][:, idx["done"]:idx["done"] + 1]
        return MpoOperator(tensors)

    # -- Liouvillian (vectorized rho, d = 4) --------------------------------

    def liouville_mpo(self, t: float) -> MpoOperator:
        arr = self.array
        N = arr.n_emitters
        E = self.drive(t)
        gr, gl, g0 = arr.gamma_r, arr.gamma_l, arr.gamma_0
        gtot = arr.gamma_tot
        sgr = np.sqrt(gr)
        states = ["done", "kR", "bR", "rA", "rB"]
        if gl > 0:
            states += ["kL", "bL", "rAL", "rBL"]
        states += ["start"]
        idx = {s: i for i, s in enumerate(states)}
        chi = len(states)
        tensors = []
        for j in range(N):
            W = np.zeros((chi, chi, 4, 4), dtype=complex)
            W[idx["done"], idx["done"]] = I4
            W[idx["start"], idx["start"]] = I4
            h = -0.5j * gtot * NUM + sgr * (E * SP + np.conj(E) * SM)
            local = -1j * sK(h) + 1j * sB(h.conj().T) \
                + (gr + gl + g0) * np.kron(SM, SM)   # sigma- rho sigma+
            W[idx["start"], idx["done"]] = local
            # ket-side R cascade: -i G_R sigma+_l sigma-_j rho
            W[idx["start"], idx["kR"]] = sK(SM)
            W[idx["kR"], idx["kR"]] = I4
            W[idx["kR"], idx["done"]] = -1j * gr * sK(SP)
            # bra side: +i rho H_eff^dag -> -G_R rho sigma+_j sigma-_l
            W[idx["start"], idx["bR"]] = sB(SP)
            W[idx["bR"], idx["bR"]] = I4
            W[idx["bR"], idx["done"]] = -gr * sB(SM)
            # recycle: G_R sigma-_j rho sigma+_l + h.c.
            W[idx["start"], idx["rA"]] = sK(SM)
            W[idx["rA"], idx["rA"]] = I4
            W[idx["rA"], idx["done"]] = gr * sB(SP)
            W[idx["start"], idx["rB"]] = sB(SP)
            W[idx["rB"], idx["rB"]] = I4
            W[idx["rB"], idx["done"]] = gr * sK(SM)
            if gl > 0:
                ph = self.k0_phases[j]
                em, ep = np.exp(-1j * ph), np.exp(1j * ph)
                W[idx["start"], idx["kL"]] = em * sK(SP)
                W[idx["kL"], idx["kL"]] = I4
                W[idx["kL"], idx["done"]] = -1j * gl * ep * sK(SM)
                W[idx["start"], idx["bL"]] = ep * sB(SM)
                W[idx["bL"], idx["bL"]] = I4
                W[idx["bL"], idx["done"]] = -gl * em * sB(SP)
                W[idx["start"], idx["rAL"]] = ep * sK(SM)
                W[idx["rAL"], idx["rAL"]] = I4
                W[idx["rAL"], idx["done"]] = gl * em * sB(SP)
                W[idx["start"], idx["rBL"]] = em * sB(SP)
                W[idx["rBL"], idx["rBL"]] = I4
                W[idx["rBL"], idx["done"]] = gl * ep * sK(SM)
            tensors.append(W)
        tensors[0] = tensors[0][idx["start"]:idx["start"] + 1]
        tensors[-1] = tensors[-1][:, idx["done"]:idx["done"] + 1]
        return MpoOperator(tensors)

    # -- collective lowering coefficients -----------------------------------

    def collective_coeffs(self, channel: str) -> np.ndarray:
        """c_j of the collective operator sum_j c_j sigma^-_j (gauged)."""
        N = self.array.n_emitters
        if channel == "R":
            return np.ones(N, dtype=complex)
        if channel == "L":
            return np.exp(1j * self.k0_phases).astype(complex)
        raise ValidationError("channel in {'R', 'L'} violated")

    def lowering_mpo(self, coeffs: np.ndarray, scalar: complex = 0.0,
                     phys: int = 2) -> MpoOperator:
        """MPO of scalar*Identity + sum_j c_j sigma^-_j (on ket side if d=4)."""
        N = self.array.n_emitters
        low = SM if phys == 2 else sK(SM)
        ident = I2 if phys == 2 else I4
        dim = low.shape[0]
        tensors = []
        for j in range(N):
            W = np.zeros((2, 2, dim, dim), dtype=complex)
            W[0, 0] = ident
            W[1, 1] = ident
            W[1, 0] = coeffs[j] * low
            if j == N - 1 and scalar != 0.0:
                W[1, 0] = W[1, 0] + scalar * ident
            tensors.append(W)
        tensors[0] = tensors[0][1:2]
        tensors[-1] = tensors[-1][:, 0:1]
        return MpoOperator(tensors)


def dense_hamiltonian(gen: Generators, t: float, displaced: bool = False) -> np.ndarray:
    """Direct dense H_eff for small N (independent of the MPO assembly)."""
    arr = gen.array
    N = arr.n_emitters
    E = gen.drive(t)
    dim = 2 ** N

    def op(site, m):
        out = np.array([[1.0]], dtype=complex)
        for j in range(N):
            out = np.kron(out, m if j == site else I2)
        return out

    H = np.zeros((dim, dim), dtype=complex)
    for j in range(N):
        h = -0.5j * arr.gamma_tot * NUM + np.sqrt(arr.gamma_r) * (E * SP + np.conj(E) * SM)
        if displaced:
            h = h + np.sqrt(arr.gamma_r) * np.conj(E) * SM
        H += op(j, h)
    for l in range(N):
        for j in range(l):
            H += -1j * arr.gamma_r * (op(l, SP) @ op(j, SM))
            if arr.gamma_l > 0:
                ph = np.exp(2j * (arr.positions()[l] - arr.positions()[j]))
                H += -1j * arr.gamma_l * ph * (op(j, SP) @ op(l, SM))
    return H
