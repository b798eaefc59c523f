"""Matrix-product state/operator primitives.

An MpsState holds rank-3 tensors A[j] of shape (D_{j-1}, d_j, D_j) with
edge bonds D_0 = D_N = 1 (physical dimension 2 for spins, 4 for the
vectorized density matrix).  An MpoOperator holds rank-4 tensors
W[j] of shape (chi_{j-1}, chi_j, d_out, d_in).

Compression keeps the smallest rank whose relative discarded squared
singular-value weight stays below `tol`, capped at `d_max`, and reports
the maximum discarded weight (the truncation-error figure used by the
bond-dimension scans).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import qr as _qr, svd as _svd

from wqed.core import ValidationError


def _svd_safe(m: np.ndarray):
    try:
        return _svd(m, full_matrices=False, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        return _svd(m, full_matrices=False, lapack_driver="gesvd")


def _truncate(s: np.ndarray, tol: float, d_max: int):
    """Rank keeping relative discarded weight sum(s_cut^2)/sum(s^2) <= tol."""
    total = float(np.sum(s ** 2))
    if total == 0.0:
        return 1, 0.0
    csum = np.cumsum(s[::-1] ** 2)[::-1]          # csum[k] = weight of s[k:]
    keep = 1
    while keep < min(d_max, s.size) and csum[keep] > tol * total:
        keep += 1
    if keep < s.size:
        discarded = float(csum[keep] / total)
    else:
        discarded = 0.0
    return keep, discarded


@dataclass
class MpsState:
    tensors: List[np.ndarray]
    meta: dict = field(default_factory=dict)

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> List[int]:
        return [t.shape[2] for t in self.tensors[:-1]]

    @property
    def max_bond(self) -> int:
        return max([1] + self.bond_dims)

    def copy(self) -> "MpsState":
        return MpsState([t.copy() for t in self.tensors])

    def to_dense(self) -> np.ndarray:
        if self.n_sites > 14:
            raise ValidationError("to_dense limited to small chains")
        v = self.tensors[0][0]                    # (d, D)
        for t in self.tensors[1:]:
            v = np.tensordot(v, t, axes=([v.ndim - 1], [0]))
        return v.reshape(-1)

    def norm(self) -> float:
        return float(np.sqrt(abs(inner(self, self))))

    def scale(self, c: complex) -> "MpsState":
        out = self.copy()
        out.tensors[0] = out.tensors[0] * c
        return out


def product_state(vectors: Sequence[np.ndarray]) -> MpsState:
    return MpsState([np.asarray(v, dtype=complex).reshape(1, -1, 1) for v in vectors])


def inner(a: MpsState, b: MpsState) -> complex:
    """<a|b>."""
    E = np.ones((1, 1), dtype=complex)
    for ta, tb in zip(a.tensors, b.tensors):
        # E[Da, Db] -> contract with conj(ta)[Da,d,Da'], tb[Db,d,Db']
        T = np.tensordot(E, tb, axes=(1, 0))      # (Da, d, Db')
        E = np.tensordot(ta.conj(), T, axes=([0, 1], [0, 1]))  # (Da', Db')
    return complex(E[0, 0])


def right_canonicalize(mps: MpsState, tol: float = 0.0,
                       d_max: int = 10 ** 9) -> float:
    """Sweep right-to-left with truncated SVDs; returns max discarded weight.

    Leaves the state right-canonical with the norm carried on site 0.
    """
    worst = 0.0
    A = mps.tensors
    for j in range(len(A) - 1, 0, -1):
        Dl, d, Dr = A[j].shape
        u, s, vh = _svd_safe(A[j].reshape(Dl, d * Dr))
        keep, disc = _truncate(s, tol, d_max)
        worst = max(worst, disc)
        A[j] = vh[:keep].reshape(keep, d, Dr)
        us = u[:, :keep] * s[:keep]
        A[j - 1] = np.tensordot(A[j - 1], us, axes=(2, 0))
    return worst


def left_canonicalize(mps: MpsState) -> None:
    """QR sweep left-to-right (no truncation), norm carried on the last site."""
    A = mps.tensors
    for j in range(len(A) - 1):
        Dl, d, Dr = A[j].shape
        q, r = _qr(A[j].reshape(Dl * d, Dr), mode="economic")
        A[j] = q.reshape(Dl, d, q.shape[1])
        A[j + 1] = np.tensordot(r, A[j + 1], axes=(1, 0))


def compress(mps: MpsState, tol: float, d_max: int) -> float:
    """Two-sweep compression; returns the max relative discarded weight."""
    left_canonicalize(mps)
    return right_canonicalize(mps, tol, d_max)


def add_mps(states: Sequence[MpsState], coeffs: Sequence[complex],
            tol: float, d_max: int) -> tuple:
    """sum_i c_i |states_i>, compressed; returns (MpsState, discarded)."""
    n = states[0].n_sites
    tensors = []
    for j in range(n):
        blocks = [st.tensors[j] for st in states]
        if j == 0:
            blocks = [c * b for c, b in zip(coeffs, blocks)]
            t = np.concatenate(blocks, axis=2)
        elif j == n - 1:
            t = np.concatenate(blocks, axis=0)
        else:
            Dl = sum(b.shape[0] for b in blocks)
            Dr = sum(b.shape[2] for b in blocks)
            d = blocks[0].shape[1]
            t = np.zeros((Dl, d, Dr), dtype=complex)
            il = ir = 0
            for b in blocks:
                t[il:il + b.shape[0], :, ir:ir + b.shape[2]] = b
                il += b.shape[0]
                ir += b.shape[2]
        tensors.append(t)
    out = MpsState(tensors)
    disc = compress(out, tol, d_max)
    return out, disc


@dataclass
class MpoOperator:
    tensors: List[np.ndarray]     # (chi_l, chi_r, d_out, d_in)
    meta: dict = field(default_factory=dict)

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    def to_dense(self) -> np.ndarray:
        if self.n_sites > 8:
            raise ValidationError("to_dense limited to small chains")
        # contract the bond chain, keeping (out..., in...) axes
        T = self.tensors[0]                       # (1, chi, d, d)
        mat = T
        for W in self.tensors[1:]:
            mat = np.tensordot(mat, W, axes=([1], [0]))
            # (..., d,d, chi, d', d') -> move chi to axis 1
            mat = np.moveaxis(mat, -3, 1)
        assert mat.shape[0] == 1 and mat.shape[1] == 1
        mat = mat[0, 0]
        # axes now (d_out1, d_in1, d_out2, d_in2, ...)
        n = self.n_sites
        d = self.tensors[0].shape[2]
        outs = tuple(range(0, 2 * n, 2))
        ins = tuple(range(1, 2 * n, 2))
        mat = np.transpose(mat, outs + ins)
        return mat.reshape(d ** n, d ** n)

    def dagger(self) -> "MpoOperator":
        return MpoOperator([np.conj(np.swapaxes(W, 2, 3)) for W in self.tensors])


def apply_mpo(mpo: MpoOperator, mps: MpsState, tol: float, d_max: int) -> tuple:
    """Zip-up application W|psi> with on-the-fly truncation.

    Forward pass truncates at tol/10 while zipping, then a right-to-left
    sweep enforces (tol, d_max); returns (MpsState, max discarded weight).
    """
    n = mps.n_sites
    out: List[Optional[np.ndarray]] = [None] * n
    C = np.ones((1, 1, 1), dtype=complex)         # (r, chi, D)
    worst = 0.0
    for j in range(n):
        A = mps.tensors[j]                        # (D, d, D2)
        W = mpo.tensors[j]                        # (chi, chi2, dout, din)
        r, chi, D = C.shape
        d, D2 = A.shape[1], A.shape[2]
        chi2, dout = W.shape[1], W.shape[2]
        CA = (C.reshape(r * chi, D) @ A.reshape(D, d * D2)).reshape(r, chi, d, D2)
        CA = CA.transpose(0, 3, 1, 2).reshape(r * D2, chi * d)
        Wm = W.transpose(0, 3, 1, 2).reshape(chi * d, chi2 * dout)
        T = (CA @ Wm).reshape(r, D2, chi2, dout)
        T = T.transpose(0, 3, 2, 1).reshape(r * dout, chi2 * D2)
        if j == n - 1:
            out[j] = T.reshape(r, dout, 1)
            continue
        u, s, vh = _svd_safe(T)
        keep, disc = _truncate(s, tol / 10.0, d_max)
        worst = max(worst, disc)
        out[j] = u[:, :keep].reshape(r, dout, keep)
        C = (s[:keep, None] * vh[:keep]).reshape(keep, chi2, D2)
    res = MpsState(out)
    worst = max(worst, right_canonicalize(res, tol, d_max))
    return res, worst


def expectation_mpo(mpo: MpoOperator, mps: MpsState) -> complex:
    """<psi|O|psi> by a single transfer sweep."""
    E = np.ones((1, 1, 1), dtype=complex)         # (Dbra, chi, Dket)
    for A, W in zip(mps.tensors, mpo.tensors):
        T = np.tensordot(E, A, axes=(2, 0))               # (Db, chi, d_in->, Dk')
        T = np.tensordot(W, T, axes=([0, 3], [1, 2]))     # (chi2, dout, Db, Dk')
        E = np.tensordot(A.conj(), T, axes=([0, 1], [2, 1]))  # (Db', chi2, Dk')
    return complex(E[0, 0, 0])
