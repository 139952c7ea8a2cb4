"""Almost complex structures on the Iwasawa algebra.

An almost complex structure is a real 6x6 matrix ``J`` acting on column
vectors in the basis E_1..E_6 with ``J @ J == -I``.  A complex 1-form ``alpha``
(a row vector) is of type (1,0) iff ``alpha(JX) = i alpha(X)``, i.e.
``alpha @ J == 1j * alpha``.  With this convention ``J0 E_1 = E_2``.
"""

from __future__ import annotations

import numpy as np

from .cealgebra import (
    DIM,
    STRUCTURE_CONSTANTS,
    KForm,
    ce_differential,
    omega,
    omega_bar,
    one_form_array,
    wedge,
    wedge_all,
)

ACS_TOL = 1e-10
INTEGRABILITY_TOL = 1e-9
R2 = np.array([[0.0, -1.0], [1.0, 0.0]])


class InvalidACS(ValueError):
    """Matrix is not an almost complex structure, or a form basis is degenerate."""


class DegenerateBasis(InvalidACS):
    pass


def check_acs(J, tol: float = ACS_TOL) -> np.ndarray:
    J = np.asarray(J, dtype=float)
    n = J.shape[0]
    if J.shape != (n, n) or n % 2:
        raise InvalidACS(f"expected an even square matrix, got shape {J.shape}")
    err = np.abs(J @ J + np.eye(n)).max()
    # entries of J^2 scale like |J|^2 for ill-conditioned structures
    if err > tol * max(1.0, np.abs(J).max() ** 2):
        raise InvalidACS(f"J^2 + 1 has entry of size {err:.3g}")
    return J


def acs_from_forms(rows) -> np.ndarray:
    """The unique J whose (1,0)-forms are spanned by ``rows`` (complex, n/2 x n)."""
    A = np.atleast_2d(np.asarray(rows, dtype=complex))
    m, n = A.shape
    if n != 2 * m:
        raise InvalidACS("need n/2 forms on an n-dimensional space")
    M = np.vstack([A, A.conj()])
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= 1e-10 * s[0]:
        raise DegenerateBasis("forms and their conjugates are linearly dependent")
    D = np.diag(np.r_[np.full(m, 1j), np.full(m, -1j)])
    J = np.linalg.solve(M, D @ M)
    return np.real_if_close(J, tol=1e6).real


def p10_basis(J) -> np.ndarray:
    """Rows spanning the (1,0)-forms of J (orthonormal in C^n)."""
    J = check_acs(J)
    n = J.shape[0]
    # alpha J = i alpha  <=>  (J^T - i) alpha^T = 0
    _, s, vh = np.linalg.svd(J.T - 1j * np.eye(n))
    null = vh[s.size - np.sum(s <= 1e-8):].conj()
    if null.shape[0] != n // 2:
        raise InvalidACS(f"+i eigenspace has dimension {null.shape[0]}, expected {n // 2}")
    return null


def p10_forms(J) -> list[KForm]:
    return [KForm.from_vector(r) for r in p10_basis(J)]


J0 = acs_from_forms([one_form_array(omega(k)) for k in (1, 2, 3)])
J1 = acs_from_forms([one_form_array(f) for f in (omega(1), omega_bar(2), omega_bar(3))])


# -- Nijenhuis tensor ------------------------------------------------------

def nijenhuis_tensor(J) -> np.ndarray:
    """N[..., k, i, j] = N(E_i, E_j)^k; accepts a stack of matrices."""
    J = np.asarray(J, dtype=float)
    C = STRUCTURE_CONSTANTS
    JJ = np.einsum("kab,...ai,...bj->...kij", C, J, J)
    JX_Y = np.einsum("kab,...ai->...kib", C, J)
    X_JY = np.einsum("kab,...bj->...kaj", C, J)
    return JJ - C - np.einsum("...mk,...kij->...mij", J, JX_Y + X_JY)


def nijenhuis(J, X, Y) -> np.ndarray:
    """N(X,Y) = [JX,JY] - [X,Y] - J[JX,Y] - J[X,JY]."""
    return np.einsum("kij,i,j->k", nijenhuis_tensor(J), np.asarray(X), np.asarray(Y))


def nijenhuis_norm(J) -> np.ndarray:
    N = nijenhuis_tensor(J)
    return np.abs(N).max(axis=(-3, -2, -1))


def integrability_defect_forms(J) -> float:
    """max |d alpha ^ alpha^123| over a unit basis of (1,0)-forms.

    Vanishes iff no d alpha has a (0,2) component.
    """
    forms = p10_forms(J)
    top = wedge_all(*forms)
    return max(wedge(ce_differential(a), top).norm() for a in forms)


def _scaled_tol(J, tol: float) -> float:
    # N is quadratic in J, so rounding in N grows like |J|^2
    return tol * max(1.0, float(np.abs(J).max())) ** 2


def is_integrable(J, tol: float = INTEGRABILITY_TOL, method: str = "nijenhuis") -> bool:
    """``method`` is "nijenhuis", "forms", or "both" (which must agree).

    The Nijenhuis tolerance is scaled by max(1, max|J|)^2; the form test uses
    a unit basis and needs no scaling.
    """
    J = check_acs(J)
    if method == "nijenhuis":
        return bool(nijenhuis_norm(J) <= _scaled_tol(J, tol))
    if method == "forms":
        return integrability_defect_forms(J) <= tol
    if method == "both":
        a = bool(nijenhuis_norm(J) <= _scaled_tol(J, tol))
        b = integrability_defect_forms(J) <= tol
        if a != b:
            raise RuntimeError("Nijenhuis and (0,2)-component tests disagree")
        return a
    raise ValueError(f"unknown method {method!r}")


# -- orientation -----------------------------------------------------------

def top_form_coefficient(rows) -> complex:
    """k with alpha^{1..m} ^ conj(alpha)^{1..m} = k e^{1..2m}."""
    forms = [KForm.from_vector(np.pad(r, (0, DIM - len(r)))) for r in rows]
    w = wedge_all(*forms, *[f.conj() for f in forms])
    return complex(w.coefficient(*range(1, 2 * len(forms) + 1)))


def orientation_total(J) -> int:
    """+1 if J induces the orientation of J0, else -1."""
    k = top_form_coefficient(p10_basis(J))
    if abs(k) <= 1e-12:
        raise DegenerateBasis("alpha^123 ^ conj(alpha^123) vanishes")
    return 1 if k.imag < 0 else -1


def d_invariant(J, tol: float = ACS_TOL) -> bool:
    """True iff span(e^1..e^4) is preserved by the transpose action of J."""
    J = np.asarray(J, dtype=float)
    return bool(np.abs(J[:4, 4:]).max() <= tol)


def restrict_to_D(J) -> np.ndarray:
    """Matrix of the induced structure on the base, in the basis E_1..E_4."""
    J = check_acs(J)
    if not d_invariant(J):
        raise InvalidACS("span(e^1..e^4) is not J-invariant")
    return J[:4, :4].copy()


def orientation_D(Jhat) -> int:
    """Sign of c in phi^12 ^ conj(phi^12) = c e^1234; +1 means positive on D."""
    Jhat = check_acs(Jhat)
    if Jhat.shape != (4, 4):
        raise InvalidACS("expected a 4x4 matrix")
    c = top_form_coefficient(p10_basis(Jhat))
    if abs(c) <= 1e-12:
        raise DegenerateBasis("phi^12 ^ conj(phi^12) vanishes")
    return 1 if c.real > 0 else -1


def embed_D(Jhat, fiber) -> np.ndarray:
    """Block-diagonal 6x6 matrix diag(Jhat, fiber)."""
    J = np.zeros((DIM, DIM))
    J[:4, :4] = Jhat
    J[4:, 4:] = fiber
    return J


# -- sampling --------------------------------------------------------------

def random_invertible(rng: np.random.Generator, n: int = DIM, min_det: float = 1e-3) -> np.ndarray:
    while True:
        M = rng.uniform(-1.0, 1.0, size=(n, n))
        if abs(np.linalg.det(M)) >= min_det:
            return M


def random_acs(rng: np.random.Generator, base=None) -> np.ndarray:
    """M^-1 base M for a random invertible M; hits both orientations."""
    base = J0 if base is None else base
    M = random_invertible(rng, base.shape[0])
    return np.linalg.solve(M, base @ M)


def acs_to_dict(J) -> dict:
    return {"J": np.asarray(J, dtype=float).tolist()}


def acs_from_dict(data) -> np.ndarray:
    J = np.array(data["J"], dtype=float)
    if J.shape != (DIM, DIM):
        raise InvalidACS(f"expected 6x6, got {J.shape}")
    return check_acs(J)
