"""Retraction of negatively oriented structures on D onto their orthogonal sphere.

Structures on D are 4x4 matrices acting on E_1..E_4.  A negatively oriented
``Q`` with ``Q @ Q == -1`` has a polar decomposition ``Q = S P``; the
orthogonal factor ``P`` again squares to -1 and ``Q -> P`` retracts onto the
anti-self-dual sphere.  ``Q1`` is the base of J1.

SU(2)_- acts on D by right multiplication of quaternions under
E_1, E_2, E_3, E_4 <-> 1, i, j, k, extended by the identity on E_5, E_6.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .acstruct import (
    J1,
    InvalidACS,
    acs_from_forms,
    check_acs,
    is_integrable,
    orientation_D,
    orientation_total,
    p10_basis,
    restrict_to_D,
)
from .cealgebra import KForm, omega, omega_bar, wedge_all
from .echelon import EchelonMinus, J_from_echelon_minus, echelon_minus_from_J
from .metricgeo import fundamental_form_D, sd_split

Q1 = J1[:4, :4].copy()
POLAR_TOL = 1e-10


def _sym_fn(S, fn):
    w, V = np.linalg.eigh(S)
    return (V * fn(w)) @ V.T


@dataclass(frozen=True)
class PolarSplit:
    S: np.ndarray
    P: np.ndarray

    @property
    def sigma(self) -> np.ndarray:
        """Symmetric log of S."""
        return _sym_fn(self.S, np.log)

    def residuals(self, Q) -> dict:
        sigma = self.sigma
        Pinv = self.P.T
        return {
            "product": float(np.abs(self.S @ self.P - Q).max()),
            "P_squared": float(np.abs(self.P @ self.P + np.eye(4)).max()),
            "P_orthogonal": float(np.abs(self.P.T @ self.P - np.eye(4)).max()),
            "sigma_anticommutes": float(np.abs(sigma + Pinv @ sigma @ self.P).max()),
            "S_conjugate": float(np.abs(self.S - Pinv @ np.linalg.inv(self.S) @ self.P).max()),
        }

    def to_dict(self) -> dict:
        return {"S": self.S.tolist(), "P": self.P.tolist()}

    @classmethod
    def from_dict(cls, data) -> "PolarSplit":
        S = np.array(data["S"], dtype=float)
        P = np.array(data["P"], dtype=float)
        if S.shape != (4, 4) or P.shape != (4, 4):
            raise ValueError("S and P must be 4x4")
        return cls(S, P)


def polar_retract(Q) -> PolarSplit:
    """Q = S P with S = (Q Q^T)^(1/2); Q must be a negatively oriented structure on D.

    Both factors come from the SVD Q = U diag(s) V^T (S = U diag(s) U^T,
    P = U V^T), which keeps P orthogonal to rounding even when Q is badly
    conditioned.
    """
    Q = check_acs(Q)
    if Q.shape != (4, 4):
        raise InvalidACS("expected a 4x4 structure on D")
    if orientation_D(Q) != -1:
        raise InvalidACS("Q is not negatively oriented on D")
    U, sv, Vt = np.linalg.svd(Q)
    S = (U * sv) @ U.T
    return PolarSplit((S + S.T) / 2, U @ Vt)


def retract(Q) -> np.ndarray:
    return polar_retract(Q).P


def homotopy_path(Q, t: float) -> np.ndarray:
    """e^{t sigma} P, joining P (t=0) to Q (t=1) inside the negative structures."""
    split = polar_retract(Q)
    return _sym_fn(split.sigma, lambda w: np.exp(t * w)) @ split.P


def random_fiber_point(rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """e^sigma Q1 for a random symmetric sigma anticommuting with Q1."""
    s = rng.standard_normal((4, 4))
    s = scale * (s + s.T) / 2
    sigma = (s + Q1 @ s @ Q1) / 2  # sigma = -Q1^-1 sigma Q1
    return _sym_fn(sigma, np.exp) @ Q1


# -- fibre over Q1 ---------------------------------------------------------

def fiber_contract(coords: EchelonMinus, t: float) -> np.ndarray:
    """The structure with every minus coordinate scaled by t (so d becomes -t^2 a v)."""
    return J_from_echelon_minus(coords.scaled(t))


def in_fiber(Jhat, tol: float = 1e-8) -> bool:
    try:
        return bool(np.abs(retract(Jhat) - Q1).max() <= tol)
    except InvalidACS:
        return False


def fiber_b_equals_c_check(J, tol: float = 1e-9) -> bool:
    """b = c and the eigenvalues of Y conj(Y), Y = (a b; b d), lie in [0, 1)."""
    if not is_integrable(J) or orientation_total(J) != 1:
        raise ValueError("J is not a positively oriented complex structure")
    Jhat = restrict_to_D(J)
    if orientation_D(Jhat) != -1:
        raise ValueError("J is not in the negative component")
    if not in_fiber(Jhat):
        raise ValueError("the base structure is not in the fibre over Q1")
    c = echelon_minus_from_J(J)
    Y = np.array([[c.a, c.b], [c.b, c.d]])
    lam = np.linalg.eigvalsh(Y @ Y.conj())
    return bool(abs(c.b - c.c) <= tol and np.all(lam >= -tol) and np.all(lam < 1))


def integrable_completion(Jhat, x: complex = 0, y: complex = 0) -> np.ndarray:
    """An integrable J on the full algebra restricting to Jhat.

    With (1,0)-forms phi^1, phi^2 of Jhat, take alpha^3 = p w^3 + q w3b +
    x conj(phi^1) + y conj(phi^2).  Its differential is p w^12 + q w1b^2b,
    whose (0,2)-part vanishes iff p A + q B = 0, with A, B the (0,2)
    coefficients of w^12 and w1b^2b.  The total orientation is whatever
    this forces; nothing about the echelon charts is used.
    """
    Jhat = check_acs(Jhat)
    phi = [KForm.from_vector(np.r_[r, 0, 0]) for r in p10_basis(Jhat)]
    A = complex(wedge_all(omega(1), omega(2), *phi).coefficient(1, 2, 3, 4))
    B = complex(wedge_all(omega_bar(1), omega_bar(2), *phi).coefficient(1, 2, 3, 4))
    p, q = B, -A
    rows = np.zeros((3, 6), dtype=complex)
    for k, f in enumerate(phi):
        rows[k] = [f.coefficient(i) for i in range(1, 7)]
    rows[2, 4:] = [p + q, 1j * (p - q)]
    rows[2] += x * rows[0].conj() + y * rows[1].conj()
    return acs_from_forms(rows)


# -- SU(2)_- ---------------------------------------------------------------

def quaternion_right_matrix(q) -> np.ndarray:
    """Matrix of x -> x q on H = span(1, i, j, k)."""
    a, b, c, d = np.asarray(q, dtype=float)
    return np.array([
        [a, -b, -c, -d],
        [b, a, d, -c],
        [c, -d, a, b],
        [d, c, -b, a],
    ])


def quaternion_left_matrix(q) -> np.ndarray:
    """Matrix of x -> q x; acts trivially on the anti-self-dual forms instead."""
    a, b, c, d = np.asarray(q, dtype=float)
    return np.array([
        [a, -b, -c, -d],
        [b, a, -d, c],
        [c, d, a, -b],
        [d, -c, b, a],
    ])


# chosen by checking which multiplication fixes e12+e34, e13+e42, e14+e23
SU2_MINUS_SIDE = "right"


def su2_minus_matrix(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if abs(np.linalg.norm(q) - 1) > 1e-12:
        raise ValueError("q must be a unit quaternion")
    M = np.eye(6)
    M[:4, :4] = quaternion_right_matrix(q)
    return M


def su2_minus_action(q, J) -> np.ndarray:
    M = su2_minus_matrix(q)
    return M @ np.asarray(J, dtype=float) @ M.T


def sphere_rotation(q) -> np.ndarray:
    """The rotation by which q acts on anti-self-dual coordinates.

    For q = cos(theta) + sin(theta) u it is the rotation by -2 theta about u.
    """
    a, b, c, d = np.asarray(q, dtype=float)
    v = np.array([b, c, d])
    K = np.array([[0, -d, c], [d, 0, -b], [-c, b, 0]])
    # Rot(u, -2 theta) written in the components of q
    return (a * a - v @ v) * np.eye(3) + 2 * np.outer(v, v) - 2 * a * K


def quaternion_to_pole(n) -> np.ndarray:
    """A unit q whose action sends the sphere point n to (1, 0, 0), the point of J1."""
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    e1 = np.array([1.0, 0.0, 0.0])
    axis = np.cross(n, e1)
    s = np.linalg.norm(axis)
    if s < 1e-12:
        if n[0] > 0:
            return np.array([1.0, 0.0, 0.0, 0.0])
        return np.array([0.0, 0.0, 1.0, 0.0])  # half turn about the second axis
    angle = np.arctan2(s, n @ e1)
    # Rot(axis, angle) = rho(cos(angle/2) - sin(angle/2) axis)
    return np.r_[np.cos(angle / 2), -np.sin(angle / 2) * axis / s]


def sphere_point_of(P) -> np.ndarray:
    _, minus = sd_split(fundamental_form_D(P))
    return minus


# -- contraction of the negative component onto Z --------------------------

@dataclass(frozen=True)
class ContractionPath:
    """J(s) = M^T fibre_contract(coords, 1 - s) M with M = R(q) + I."""

    q: np.ndarray
    coords: EchelonMinus

    def at(self, s: float) -> np.ndarray:
        M = su2_minus_matrix(self.q)
        return M.T @ fiber_contract(self.coords, 1 - s) @ M

    def endpoint(self) -> np.ndarray:
        return self.at(1.0)


def contraction_path(J) -> ContractionPath:
    """Path from J in the negative component to an element of Z.

    Conjugating by SU(2)_- moves the retracted base r(Jhat) to Q1, which puts
    J in the fibre over Q1, where the minus coordinates are scaled to zero.
    """
    Jhat = restrict_to_D(J)
    P = retract(Jhat)
    q = quaternion_to_pole(sphere_point_of(P))
    J_moved = su2_minus_action(q, J)
    return ContractionPath(q, echelon_minus_from_J(J_moved))


def trace_rows(path_fn, steps: int = 100):
    """(t, 36 entries of J(t)) for t on a uniform grid of steps + 1 points."""
    rows = []
    for t in np.linspace(0.0, 1.0, steps + 1):
        rows.append([float(t), *np.asarray(path_fn(t)).ravel().tolist()])
    return rows
