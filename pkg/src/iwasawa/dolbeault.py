"""Left-invariant part of the Dolbeault complex of the holomorphic tangent bundle.

For an integrable J with (1,0)-forms alpha^1..alpha^3 and dual (1,0)-vectors
Z_1..Z_3, the space of invariant (0,q)-forms with values in T^{1,0} has basis
conj(alpha)^I (x) Z_m.  On sections, (dbar Z)(conj W) = [conj W, Z]^{1,0};
on scalar forms dbar is the (0,q+1)-part of d, and

    dbar(phi (x) Z) = dbar(phi) (x) Z + (-1)^q phi ^ dbar(Z).

Row and column indices enumerate (I, m) with I increasing multi-indices in
lexicographic order and m = 0, 1, 2 fastest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .acstruct import check_acs, is_integrable, p10_basis
from .cealgebra import lie_bracket

RANK_RTOL = 1e-8
MULTI = {q: list(itertools.combinations(range(3), q)) for q in range(4)}
DIMS = [3 * len(MULTI[q]) for q in range(4)]  # [3, 9, 9, 3]


def _frame(J, basis=None):
    """(A, Z, Zb): (1,0)-forms as rows, dual (1,0)- and (0,1)-vectors as columns."""
    A = p10_basis(J) if basis is None else np.asarray(basis, dtype=complex)
    M = np.vstack([A, A.conj()])
    Minv = np.linalg.inv(M)
    return A, Minv[:, :3], Minv[:, 3:]


def _wedge_index(i: int, I: tuple) -> tuple[int, tuple]:
    """conj(alpha)^i ^ conj(alpha)^I = sign * conj(alpha)^K."""
    if i in I:
        return 0, ()
    K = tuple(sorted((i,) + I))
    sign = (-1) ** sum(1 for j in I if j < i)
    return sign, K


def dbar_matrices(J, basis=None, check: bool = True):
    """(M0, M1, M2), the matrices of dbar on Omega^{0,q}(T) for q = 0, 1, 2.

    ``basis`` optionally replaces p10_basis(J) by another basis of
    (1,0)-forms.  ``check=False`` skips the integrability precondition, which
    is only useful for negative controls.
    """
    J = check_acs(J)
    if check and not is_integrable(J):
        raise ValueError("J is not integrable")
    A, Z, Zb = _frame(J, basis)
    Ab = A.conj()

    # N[k, j, m] = alpha^m([conj Z_k, Z_j]): coefficient of conj(alpha)^k (x) Z_m in dbar Z_j
    N = np.einsum("ms,kjs->kjm", A, lie_bracket(Zb.T[:, None, :], Z.T[None, :, :]))
    # scalar part: dbar conj(alpha)^k = sum_{i<j} F[k, (i,j)] conj(alpha)^{ij}
    brb = lie_bracket(Zb.T[:, None, :], Zb.T[None, :, :])  # [conj Z_i, conj Z_j]
    F = -np.einsum("ks,ijs->kij", Ab, brb)

    def dbar_scalar(I):
        """dbar conj(alpha)^I as {K: coeff}."""
        out = {}
        for pos, k in enumerate(I):
            for i, j in MULTI[2]:
                c = F[k, i, j]
                if c == 0:
                    continue
                # conj(alpha)^{I[:pos]} ^ conj(alpha)^{ij} ^ conj(alpha)^{I[pos+1:]}
                seq = I[:pos] + (i, j) + I[pos + 1:]
                if len(set(seq)) < len(seq):
                    continue
                inv = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
                K = tuple(sorted(seq))
                out[K] = out.get(K, 0) + (-1) ** pos * (-1) ** inv * c
        return out

    mats = []
    for q in range(3):
        rows = {K: r for r, K in enumerate(MULTI[q + 1])}
        Mq = np.zeros((DIMS[q + 1], DIMS[q]), dtype=complex)
        for c_idx, I in enumerate(MULTI[q]):
            for m in range(3):
                col = 3 * c_idx + m
                for K, c in dbar_scalar(I).items():
                    Mq[3 * rows[K] + m, col] += c
                for k in range(3):
                    # (-1)^q conj(alpha)^I ^ conj(alpha)^k = conj(alpha)^k ^ conj(alpha)^I
                    sign, K = _wedge_index(k, I)
                    if sign == 0:
                        continue
                    for n in range(3):
                        Mq[3 * rows[K] + n, col] += sign * N[k, m, n]
        mats.append(Mq)
    return tuple(mats)


def numerical_rank(M, rtol: float = RANK_RTOL) -> tuple[int, np.ndarray]:
    """Rank with threshold rtol * max(sigma_max, 1), plus the singular values.

    The unit floor keeps a matrix whose entries are all rounding noise at rank 0.
    """
    s = np.linalg.svd(M, compute_uv=False)
    scale = max(s[0] if s.size else 0.0, 1.0)
    return int(np.sum(s > rtol * scale)), s


def is_rational(values, max_denominator: int = 1000, tol: float = 1e-12) -> bool:
    """True if every real and imaginary part is a fraction with small denominator."""
    for v in np.ravel(np.asarray(values, dtype=complex)):
        for x in (v.real, v.imag):
            if abs(float(Fraction(x).limit_denominator(max_denominator)) - x) > tol:
                return False
    return True


@dataclass
class DolbeaultReport:
    dims: list
    rank0: int
    rank1: int
    rank2: int
    ker1: int
    h1: int
    singular_values: dict = field(default_factory=dict)
    square_residuals: list = field(default_factory=list)
    rational: bool = False

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "rank0": self.rank0,
            "rank1": self.rank1,
            "rank2": self.rank2,
            "ker1": self.ker1,
            "h1": self.h1,
            "singular_values": {k: [float(x) for x in v] for k, v in self.singular_values.items()},
            "square_residuals": [float(x) for x in self.square_residuals],
            "rational": self.rational,
        }


def dolbeault_report(J, rtol: float = RANK_RTOL, basis=None) -> DolbeaultReport:
    J = check_acs(J)
    M0, M1, M2 = dbar_matrices(J, basis)
    r0, s0 = numerical_rank(M0, rtol)
    r1, s1 = numerical_rank(M1, rtol)
    r2, s2 = numerical_rank(M2, rtol)
    ker1 = DIMS[1] - r1
    return DolbeaultReport(
        dims=list(DIMS),
        rank0=r0,
        rank1=r1,
        rank2=r2,
        ker1=ker1,
        h1=ker1 - r0,
        singular_values={"M0": s0, "M1": s1, "M2": s2},
        square_residuals=[float(np.abs(M1 @ M0).max()), float(np.abs(M2 @ M1).max())],
        rational=is_rational(J),
    )
