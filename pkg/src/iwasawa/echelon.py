"""Echelon coordinates anchored at J0 and at J1.

Plus chart (anchor J0)::

    alpha1 = w1 + a w1b + b w2b
    alpha2 = w2 + c w1b + d w2b
    alpha3 = w3 + x w1b + y w2b + u w3b,      u = -ad + bc

Minus chart (anchor J1, for which w1 ^ w2b ^ w3b is a (3,0)-form)::

    beta1 = w1  + a w1b + b w2
    beta2 = w2b + c w1b + d w2
    beta3 = w3b + x w1b + y w2 + v w3,        d = -av

where ``w`` stands for omega and ``b`` for complex conjugation.  The derived
coefficients ``u`` and ``d`` are always recomputed, never read from input.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, fields

import numpy as np

from .acstruct import (
    DegenerateBasis,
    acs_from_forms,
    is_integrable,
    orientation_total,
    p10_basis,
    p10_forms,
)
from .cealgebra import omega, omega_bar, wedge_all

PIVOT_TOL = 1e-10
WARN_BAND = 1e-6

# omega/omega-bar coordinates -> e coordinates: columns (w1, w2, w3, w1b, w2b, w3b)
_W_TO_E = np.zeros((6, 6), dtype=complex)
for _k in range(3):
    _W_TO_E[_k, 2 * _k] = 1
    _W_TO_E[_k, 2 * _k + 1] = 1j
    _W_TO_E[3 + _k, 2 * _k] = 1
    _W_TO_E[3 + _k, 2 * _k + 1] = -1j
_E_TO_W = np.linalg.inv(_W_TO_E)

W1, W2, W3, W1B, W2B, W3B = range(6)
PLUS_PIVOTS = (W1, W2, W3)
MINUS_PIVOTS = (W1, W2B, W3B)


class InfinityClass(ValueError):
    """The structure lies outside the finite chart of the requested anchor."""

    def __init__(self, message, coefficient=0.0):
        super().__init__(message)
        self.coefficient = coefficient


class EchelonDegenerate(ValueError):
    """Echelon coordinates that do not define an almost complex structure."""


def to_e_basis(w_rows) -> np.ndarray:
    """Rows in (w1, w2, w3, w1b, w2b, w3b) coordinates -> rows in e coordinates."""
    return np.asarray(w_rows, dtype=complex) @ _W_TO_E


def to_w_basis(e_rows) -> np.ndarray:
    return np.asarray(e_rows, dtype=complex) @ _E_TO_W


def _c(z) -> complex:
    return complex(z)


@dataclass(frozen=True)
class EchelonPlus:
    a: complex = 0j
    b: complex = 0j
    c: complex = 0j
    d: complex = 0j
    x: complex = 0j
    y: complex = 0j

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _c(getattr(self, f.name)))

    @property
    def u(self) -> complex:
        return -self.a * self.d + self.b * self.c

    @property
    def X(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def forms_w(self) -> np.ndarray:
        F = np.zeros((3, 6), dtype=complex)
        F[0, [W1, W1B, W2B]] = 1, self.a, self.b
        F[1, [W2, W1B, W2B]] = 1, self.c, self.d
        F[2, [W3, W1B, W2B, W3B]] = 1, self.x, self.y, self.u
        return F

    def forms(self) -> np.ndarray:
        """(1,0)-forms as rows in the e-basis."""
        return to_e_basis(self.forms_w())

    def scaled(self, t: float) -> "EchelonPlus":
        return EchelonPlus(*(t * v for v in astuple_(self)))

    def to_dict(self) -> dict:
        return {k: [v.real, v.imag] for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, data) -> "EchelonPlus":
        coords = cls(**{k: _parse_complex(data.get(k, 0)) for k in ("a", "b", "c", "d", "x", "y")})
        if "u" in data and abs(_parse_complex(data["u"]) - coords.u) > 1e-12:
            raise ValueError("supplied u disagrees with -ad + bc")
        return coords


@dataclass(frozen=True)
class EchelonMinus:
    a: complex = 0j
    b: complex = 0j
    c: complex = 0j
    x: complex = 0j
    y: complex = 0j
    v: complex = 0j

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _c(getattr(self, f.name)))

    @property
    def d(self) -> complex:
        return -self.a * self.v

    @property
    def X(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def forms_w(self) -> np.ndarray:
        F = np.zeros((3, 6), dtype=complex)
        F[0, [W1, W1B, W2]] = 1, self.a, self.b
        F[1, [W2B, W1B, W2]] = 1, self.c, self.d
        F[2, [W3B, W1B, W2, W3]] = 1, self.x, self.y, self.v
        return F

    def forms(self) -> np.ndarray:
        return to_e_basis(self.forms_w())

    def scaled(self, t: float) -> "EchelonMinus":
        return EchelonMinus(*(t * v for v in astuple_(self)))

    def to_dict(self) -> dict:
        out = {k: [v.real, v.imag] for k, v in asdict(self).items()}
        out["d"] = [self.d.real, self.d.imag]
        return out

    @classmethod
    def from_dict(cls, data) -> "EchelonMinus":
        coords = cls(**{k: _parse_complex(data.get(k, 0)) for k in ("a", "b", "c", "x", "y", "v")})
        if "d" in data and abs(_parse_complex(data["d"]) - coords.d) > 1e-12:
            raise ValueError("supplied d disagrees with -a v")
        return coords


def astuple_(coords) -> tuple:
    return tuple(getattr(coords, f.name) for f in fields(coords))


def _parse_complex(z) -> complex:
    if isinstance(z, (list, tuple)):
        re, im = z
        return complex(re, im)
    return complex(z)


# -- nondegeneracy ---------------------------------------------------------

def plus_nondegeneracy(coords: EchelonPlus) -> float:
    """(1 - lambda)(1 - mu)(1 - lambda mu) for the eigenvalues of X conj(X)."""
    from .spectra import spectrum

    s = spectrum(coords.X)
    return float(np.real((1 - s.lam) * (1 - s.mu) * (1 - s.lam * s.mu)))


def J_from_echelon_plus(coords: EchelonPlus, tol: float = 1e-9) -> np.ndarray:
    if abs(plus_nondegeneracy(coords)) <= tol:
        raise EchelonDegenerate("(1-lambda)(1-mu)(1-lambda mu) vanishes: forms are dependent")
    try:
        return acs_from_forms(coords.forms())
    except DegenerateBasis as exc:
        raise EchelonDegenerate(str(exc)) from exc


def J_from_echelon_minus(coords: EchelonMinus) -> np.ndarray:
    try:
        return acs_from_forms(coords.forms())
    except DegenerateBasis as exc:
        raise EchelonDegenerate(str(exc)) from exc


# -- reduction -------------------------------------------------------------

def _normalized_w_basis(J) -> np.ndarray:
    B = to_w_basis(p10_basis(J))
    return B / np.linalg.norm(B, axis=1, keepdims=True)


def pivot_coefficient(J, pivots) -> complex:
    """Determinant of the pivot block of a unit (1,0)-basis.

    Proportional to alpha^123 ^ conj(reference)^123 with a J-independent
    factor; zero exactly on the infinite class.
    """
    B = _normalized_w_basis(J)
    return complex(np.linalg.det(B[:, list(pivots)]))


def _reduce(J, pivots, label: str) -> np.ndarray:
    B = _normalized_w_basis(J)
    P = B[:, list(pivots)]
    det = complex(np.linalg.det(P))
    if abs(det) <= PIVOT_TOL:
        raise InfinityClass(f"pivot block is singular: J lies in the infinite class of {label}", det)
    if abs(det) <= WARN_BAND:
        warnings.warn(f"pivot determinant {abs(det):.2e} is close to the {label} threshold",
                      RuntimeWarning, stacklevel=3)
    return np.linalg.solve(P, B)


def _require(J):
    if not is_integrable(J):
        raise ValueError("J is not integrable")
    if orientation_total(J) != 1:
        raise ValueError("J is not positively oriented")


def echelon_plus_from_J(J, check: bool = True) -> EchelonPlus:
    if check:
        _require(J)
    R = _reduce(J, PLUS_PIVOTS, "J0")
    coords = EchelonPlus(a=R[0, W1B], b=R[0, W2B], c=R[1, W1B], d=R[1, W2B], x=R[2, W1B], y=R[2, W2B])
    resid = max(abs(R[0, W3B]), abs(R[1, W3B]), abs(R[2, W3B] - coords.u))
    if resid > 1e-8:
        raise ValueError(f"reduced basis is not of echelon shape (residual {resid:.2e})")
    return coords


def echelon_minus_from_J(J, check: bool = True) -> EchelonMinus:
    if check:
        _require(J)
    R = _reduce(J, MINUS_PIVOTS, "J1")
    coords = EchelonMinus(a=R[0, W1B], b=R[0, W2], c=R[1, W1B], x=R[2, W1B], y=R[2, W2], v=R[2, W3])
    resid = max(abs(R[0, W3]), abs(R[1, W3]), abs(R[1, W2] - coords.d))
    if resid > 1e-8:
        raise ValueError(f"reduced basis is not of echelon shape (residual {resid:.2e})")
    return coords


def finiteness_wedge(J, anchor: str = "J0") -> complex:
    """Top coefficient of alpha^123 ^ conj(ref) for a unit (1,0)-basis alpha.

    ``ref`` is omega^123 for anchor "J0" and omega^1 ^ omega2b ^ omega3b for "J1".
    """
    if anchor == "J0":
        ref = [omega(1), omega(2), omega(3)]
    elif anchor == "J1":
        ref = [omega(1), omega_bar(2), omega_bar(3)]
    else:
        raise ValueError(f"unknown anchor {anchor!r}")
    alpha = p10_forms(J)
    return complex(wedge_all(*alpha, *[f.conj() for f in ref]).top_coefficient())


def in_C0_finite(J) -> bool:
    return abs(finiteness_wedge(J, "J0")) > PIVOT_TOL


def in_C1_finite(J) -> bool:
    return abs(finiteness_wedge(J, "J1")) > PIVOT_TOL


# -- sampling --------------------------------------------------------------

def _cnormal(rng, scale, size=None):
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


def random_echelon_plus(rng: np.random.Generator, scale: float = 0.5, fiber_scale: float = 1.0) -> EchelonPlus:
    a, b, c, d = _cnormal(rng, scale, 4)
    x, y = _cnormal(rng, fiber_scale, 2)
    return EchelonPlus(a, b, c, d, x, y)


def random_echelon_minus(rng: np.random.Generator, scale: float = 0.5, fiber_scale: float = 1.0) -> EchelonMinus:
    a, b, c, v = _cnormal(rng, scale, 4)
    x, y = _cnormal(rng, fiber_scale, 2)
    return EchelonMinus(a, b, c, x, y, v)
