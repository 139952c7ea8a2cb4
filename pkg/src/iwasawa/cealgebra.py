"""Exterior algebra of the real 6-dimensional Iwasawa Lie algebra.

Forms are stored sparsely as ``{multi_index: coefficient}`` with strictly
increasing 1-based multi-indices, so ``(1, 3)`` is ``e^1 ^ e^3``.  The
differential is generated by

    de^i = 0 (i <= 4),   de^5 = e^13 + e^42,   de^6 = e^14 + e^23

and extended as a graded derivation.  Brackets are *derived* from it with the
convention

    d alpha(X, Y) = -alpha([X, Y]),   (alpha ^ beta)(X, Y) = alpha(X) beta(Y) - alpha(Y) beta(X).

Coefficients may be any numbers; integer inputs stay integers, which gives an
exact path for identities such as ``d(d(x)) == 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

DIM = 6

# index -> list of (i, j) pairs; de^k = sum e^i ^ e^j (pairs need not be sorted)
STRUCTURE_EQUATIONS = {
    5: [(1, 3), (4, 2)],
    6: [(1, 4), (2, 3)],
}


def _canonical(indices: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """Sort a multi-index, returning (sign, sorted) or (0, ()) on repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    inversions = sum(1 for a, b in itertools.combinations(idx, 2) if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(idx))


@dataclass(frozen=True)
class KForm:
    """A homogeneous exterior form of degree ``degree``."""

    degree: int
    coeffs: Mapping[tuple[int, ...], complex] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.degree <= DIM:
            raise ValueError(f"degree {self.degree} out of range")
        clean = {}
        for idx, c in self.coeffs.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != self.degree:
                raise ValueError(f"index {idx} does not have length {self.degree}")
            if any(not 1 <= i <= DIM for i in idx):
                raise ValueError(f"index {idx} outside 1..{DIM}")
            sign, key = _canonical(idx)
            if sign == 0 or c == 0:
                continue
            clean[key] = clean.get(key, 0) + sign * c
        object.__setattr__(self, "coeffs", {k: v for k, v in sorted(clean.items()) if v != 0})

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, degree: int) -> "KForm":
        return cls(degree, {})

    @classmethod
    def basis(cls, *indices: int, coeff=1) -> "KForm":
        """``KForm.basis(1, 2)`` is e^12; unsorted indices pick up a sign."""
        return cls(len(indices), {tuple(indices): coeff})

    @classmethod
    def from_vector(cls, vec) -> "KForm":
        """The 1-form sum vec[i-1] e^i."""
        vec = np.asarray(vec)
        if vec.shape != (DIM,):
            raise ValueError("a 1-form needs 6 coefficients")
        return cls(1, {(i + 1,): _scalar(vec[i]) for i in range(DIM)})

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "KForm") -> "KForm":
        if not isinstance(other, KForm):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return KForm(self.degree, out)

    def __neg__(self) -> "KForm":
        return KForm(self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __mul__(self, scalar) -> "KForm":
        if isinstance(scalar, KForm):
            return NotImplemented
        return KForm(self.degree, {k: scalar * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __xor__(self, other: "KForm") -> "KForm":
        return wedge(self, other)

    def conj(self) -> "KForm":
        return KForm(self.degree, {k: _conj(v) for k, v in self.coeffs.items()})

    # -- inspection -------------------------------------------------------

    def coefficient(self, *indices: int):
        sign, key = _canonical(indices)
        if sign == 0:
            return 0
        return sign * self.coeffs.get(key, 0)

    def top_coefficient(self):
        """Coefficient of e^{12...6} (degree-6 forms only)."""
        if self.degree != DIM:
            raise ValueError("top_coefficient needs a 6-form")
        return self.coeffs.get(tuple(range(1, DIM + 1)), 0)

    def norm(self) -> float:
        return float(max((abs(v) for v in self.coeffs.values()), default=0.0))

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.norm() <= tol

    def allclose(self, other: "KForm", tol: float = 1e-12) -> bool:
        return (self - other).is_zero(tol)

    def evaluate(self, *vectors) -> complex:
        """Value on ``degree`` vectors, determinant convention."""
        if len(vectors) != self.degree:
            raise ValueError(f"need {self.degree} vectors")
        if self.degree == 0:
            return self.coeffs.get((), 0)
        V = np.array(vectors, dtype=complex)  # rows are the vectors
        total = 0j
        for idx, c in self.coeffs.items():
            cols = [i - 1 for i in idx]
            total += c * np.linalg.det(V[:, cols].T)
        return total

    def to_dict(self) -> dict:
        terms = []
        for idx, c in self.coeffs.items():
            c = complex(c)
            terms.append({"idx": list(idx), "re": c.real, "im": c.imag})
        return {"degree": self.degree, "terms": terms}

    @classmethod
    def from_dict(cls, data: Mapping) -> "KForm":
        degree = int(data["degree"])
        coeffs: dict = {}
        for t in data.get("terms", []):
            key = tuple(t["idx"])
            coeffs[key] = coeffs.get(key, 0) + complex(t.get("re", 0.0), t.get("im", 0.0))
        return cls(degree, coeffs)


def _scalar(x):
    x = complex(x)
    return x.real if x.imag == 0 else x


def _conj(v):
    return v.conjugate() if hasattr(v, "conjugate") else np.conj(v)


def e(i: int) -> KForm:
    """The basis 1-form e^i."""
    return KForm.basis(i)


def wedge(alpha: KForm, beta: KForm) -> KForm:
    """Exterior product; raises ValueError if the degrees exceed 6."""
    if alpha.degree + beta.degree > DIM:
        raise ValueError(f"degree {alpha.degree} + {beta.degree} exceeds {DIM}")
    out: dict = {}
    for I, a in alpha.coeffs.items():
        for K, b in beta.coeffs.items():
            sign, key = _canonical(I + K)
            if sign:
                out[key] = out.get(key, 0) + sign * a * b
    return KForm(alpha.degree + beta.degree, out)


def wedge_all(*forms: KForm) -> KForm:
    result = KForm(0, {(): 1})
    for f in forms:
        result = wedge(result, f)
    return result


@lru_cache(maxsize=None)
def _d_generator(i: int) -> KForm:
    pairs = STRUCTURE_EQUATIONS.get(i, [])
    out = KForm.zero(2)
    for a, b in pairs:
        out = out + KForm.basis(a, b)
    return out


def ce_differential(alpha: KForm) -> KForm:
    """Chevalley-Eilenberg differential, extended by the graded Leibniz rule."""
    if alpha.degree == DIM:
        return KForm.zero(DIM)
    out = KForm.zero(alpha.degree + 1)
    for idx, c in alpha.coeffs.items():
        for pos, i in enumerate(idx):
            di = _d_generator(i)
            if not di.coeffs:
                continue
            left = KForm(pos, {idx[:pos]: 1})
            right = KForm(len(idx) - pos - 1, {idx[pos + 1:]: 1})
            term = wedge(wedge(left, di), right)
            out = out + term * (c if pos % 2 == 0 else -c)
    return out


d = ce_differential


@lru_cache(maxsize=None)
def _structure_constants_int() -> tuple:
    C = [[[0] * DIM for _ in range(DIM)] for _ in range(DIM)]
    for k in range(1, DIM + 1):
        dk = _d_generator(k)
        for i in range(1, DIM + 1):
            for j in range(1, DIM + 1):
                C[k - 1][i - 1][j - 1] = -dk.coefficient(i, j)
    return tuple(tuple(tuple(r) for r in m) for m in C)


def structure_constants(exact: bool = False):
    """c[k, i, j] with [E_i, E_j] = sum_k c[k, i, j] E_k (0-based array).

    With ``exact=True`` a nested tuple of Python ints is returned.
    """
    C = _structure_constants_int()
    if exact:
        return C
    return np.array(C, dtype=float)


STRUCTURE_CONSTANTS = structure_constants()


def lie_bracket(X, Y) -> np.ndarray:
    """Bracket of two vectors given in the basis E_1..E_6."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    return np.einsum("kij,...i,...j->...k", STRUCTURE_CONSTANTS, X, Y)


def basis_vector(i: int) -> np.ndarray:
    """E_i as a length-6 array (1-based index)."""
    v = np.zeros(DIM)
    v[i - 1] = 1.0
    return v


# omega^1 = e^1 + i e^2, omega^2 = e^3 + i e^4, omega^3 = e^5 + i e^6
def omega(k: int) -> KForm:
    return KForm(1, {(2 * k - 1,): 1, (2 * k,): 1j})


def omega_bar(k: int) -> KForm:
    return KForm(1, {(2 * k - 1,): 1, (2 * k,): -1j})


def one_form_array(alpha: KForm) -> np.ndarray:
    """Coefficient row vector of a 1-form."""
    if alpha.degree != 1:
        raise ValueError("not a 1-form")
    out = np.zeros(DIM, dtype=complex)
    for (i,), c in alpha.coeffs.items():
        out[i - 1] = c
    return out


def jacobi_residual() -> int:
    """Max |cyclic sum| of [[E_i,E_j],E_k] over all basis triples."""
    C = structure_constants(exact=True)
    worst = 0
    for i, j, k in itertools.product(range(DIM), repeat=3):
        total = [0] * DIM
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            # [[E_a, E_b], E_c] = sum_m C[m][a][b] [E_m, E_c]
            for m in range(DIM):
                if C[m][a][b]:
                    for n in range(DIM):
                        total[n] += C[m][a][b] * C[n][m][c]
        worst = max(worst, max(abs(t) for t in total))
    return worst
