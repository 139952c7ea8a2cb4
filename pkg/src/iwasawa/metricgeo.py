"""Metric geometry: self-dual splitting on D, fundamental forms, the sphere Z.

The metric makes e^1..e^6 orthonormal.  A 2-form on D is stored as six real
coefficients over (e12, e13, e14, e23, e24, e34).  The self-dual and
anti-self-dual bases are

    e12 +- e34,   e13 +- e42,   e14 +- e23.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .acstruct import (
    J0,
    R2,
    acs_from_forms,
    check_acs,
    INTEGRABILITY_TOL,
    embed_D,
    is_integrable,
    nijenhuis_norm,
    orientation_total,
    restrict_to_D,
)
from .cealgebra import KForm, omega, omega_bar, wedge, wedge_all

PAIRS_D = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class SphereCoord:
    A: float
    B: float
    C: float

    def __post_init__(self):
        r = np.sqrt(self.A ** 2 + self.B ** 2 + self.C ** 2)
        if abs(r - 1) > 1e-12:
            raise ValueError(f"not a unit vector (norm {r:.15g})")

    @classmethod
    def normalized(cls, v) -> "SphereCoord":
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        return cls(*map(float, v))

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C])

    def to_dict(self) -> dict:
        return {"A": self.A, "B": self.B, "C": self.C}

    @classmethod
    def from_dict(cls, data) -> "SphereCoord":
        return cls(float(data["A"]), float(data["B"]), float(data["C"]))


# -- 2-forms on D ----------------------------------------------------------

def form2d_to_matrix(w) -> np.ndarray:
    """Antisymmetric W with W[i, j] = coefficient of e^{i+1, j+1}."""
    W = np.zeros((4, 4))
    for c, (i, j) in zip(np.asarray(w, dtype=float), PAIRS_D):
        W[i - 1, j - 1] = c
        W[j - 1, i - 1] = -c
    return W


def matrix_to_form2d(W) -> np.ndarray:
    W = np.asarray(W)
    return np.array([W[i - 1, j - 1] for i, j in PAIRS_D])


def form2d_from_kform(w: KForm) -> np.ndarray:
    if w.degree != 2:
        raise ValueError("expected a 2-form")
    out = np.array([w.coefficient(i, j) for i, j in PAIRS_D], dtype=complex)
    if any(max(k) > 4 for k in w.coeffs):
        raise ValueError("form is not in the span of e^1..e^4")
    return np.real_if_close(out)


def sd_split(w) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of w in the self-dual and anti-self-dual bases."""
    w12, w13, w14, w23, w24, w34 = np.asarray(w)
    plus = np.array([w12 + w34, w13 - w24, w14 + w23]) / 2
    minus = np.array([w12 - w34, w13 + w24, w14 - w23]) / 2
    return plus, minus


def sd_join(plus, minus) -> np.ndarray:
    p1, p2, p3 = plus
    m1, m2, m3 = minus
    return np.array([p1 + m1, p2 + m2, p3 + m3, p3 - m3, -p2 + m2, p1 - m1])


# -- orthogonality and fundamental forms -----------------------------------

def is_orthogonal(J, tol: float = ORTHO_TOL) -> bool:
    J = np.asarray(J, dtype=float)
    return bool(np.abs(J.T @ J - np.eye(J.shape[0])).max() <= tol)


def fundamental_form(J) -> KForm:
    """gamma(E_i, E_j) = g(J E_i, E_j) = J[j, i]."""
    J = check_acs(J)
    if not is_orthogonal(J):
        raise ValueError("J is not g-orthogonal")
    n = J.shape[0]
    return KForm(2, {(i + 1, j + 1): float(J[j, i]) for i in range(n) for j in range(i + 1, n)})


def fundamental_form_D(Jhat) -> np.ndarray:
    """Form2D of an orthogonal structure on D."""
    Jhat = np.asarray(Jhat, dtype=float)
    if not is_orthogonal(Jhat):
        raise ValueError("structure on D is not orthogonal")
    return matrix_to_form2d(Jhat.T)


def jhat_from_form2d(w) -> np.ndarray:
    """Inverse of :func:`fundamental_form_D` (J = W^T)."""
    return form2d_to_matrix(w).T


# -- hemisphere chart ------------------------------------------------------

def hemisphere_coords(b: complex) -> SphereCoord:
    b = complex(b)
    s = 1 + abs(b) ** 2
    A = (1 - abs(b) ** 2) / s
    B = (1j * (b.conjugate() - b)).real / s
    C = -(b + b.conjugate()).real / s
    return SphereCoord.normalized([A, B, C])


def hemisphere_inverse(n: SphereCoord) -> complex:
    """Stereographic inverse of :func:`hemisphere_coords` (undefined at A = -1)."""
    if n.A <= -1 + 1e-15:
        raise ValueError("the point A = -1 has no finite b")
    return complex(-n.C, n.B) / (1 + n.A)


def orthogonal_plus_coords(b: complex, x: complex = 0, y: complex = 0):
    """Echelon coordinates with a = d = 0 and c = -b."""
    from .echelon import EchelonPlus

    return EchelonPlus(a=0, b=b, c=-b, d=0, x=x, y=y)


def base_structure_plus(b: complex) -> np.ndarray:
    """Orthogonal structure on D with (1,0)-forms w1 + b w2b and -b w1b + w2."""
    rows = np.array([[1, 1j, b, -1j * b], [-b, 1j * b, 1, 1j]], dtype=complex)
    return acs_from_forms(rows)


# -- the sphere Z ----------------------------------------------------------

def z_sphere_element(n) -> np.ndarray:
    """Orthogonal structure whose base fundamental form is n in the anti-self-dual basis.

    The sign on span(E5, E6) is chosen so the total orientation is positive.
    """
    if isinstance(n, SphereCoord):
        n = n.as_array()
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    Jhat = jhat_from_form2d(sd_join(np.zeros(3), n))
    J = embed_D(Jhat, R2)
    if orientation_total(J) < 0:
        J = embed_D(Jhat, -R2)
    return J


def z_sphere_b_chart(b: complex) -> np.ndarray:
    """Element of Z whose base has (1,0)-forms w1 + b w2 and w2b - b w1b."""
    rows = np.array([[1, 1j, b, 1j * b], [-b, 1j * b, 1, -1j]], dtype=complex)
    Jhat = acs_from_forms(rows)
    _, minus = sd_split(fundamental_form_D(Jhat))
    return z_sphere_element(minus)


def sphere_point(J) -> np.ndarray:
    """Anti-self-dual part of the base fundamental form (unit for Z elements)."""
    _, minus = sd_split(fundamental_form_D(restrict_to_D(J)))
    return minus


def is_abelian(J, tol: float = 1e-10) -> bool:
    """[JX, JY] = [X, Y] on all basis pairs."""
    from .cealgebra import STRUCTURE_CONSTANTS as C

    J = np.asarray(J, dtype=float)
    JJ = np.einsum("kab,ai,bj->kij", C, J, J)
    return bool(np.abs(JJ - C).max() <= tol)


# -- equator obstruction ---------------------------------------------------

def _base_forms(b):
    a1 = omega(1) + omega_bar(2) * b
    a2 = omega_bar(1) * (-b) + omega(2)
    return a1, a2


def lift_wedge(b: complex, x: complex = 0, y: complex = 0) -> complex:
    """Top coefficient of a^12 ^ conj(a^12) ^ a3 ^ conj(a3), a3 = w3 + x w1 + y w2 - b^2 w3b."""
    a1, a2 = _base_forms(b)
    a3 = omega(3) + omega(1) * x + omega(2) * y + omega_bar(3) * (-(b * b))
    w = wedge_all(a1, a2, a1.conj(), a2.conj(), a3, a3.conj())
    return complex(w.top_coefficient())


def equator_obstruction_check(b: complex = 1j, tol: float = 1e-12) -> bool:
    """True iff the lift wedge vanishes identically in (x, y).

    The x, y terms only contribute forms in D, and a^12 ^ conj(a^12) already
    spans the top degree of D, so it suffices that (i) that 4-form kills every
    one-form of D and (ii) the wedge vanishes at x = y = 0.
    """
    a1, a2 = _base_forms(b)
    base = wedge_all(a1, a2, a1.conj(), a2.conj())
    kills_D = all(wedge(base, f).is_zero(tol) for f in (omega(1), omega(2), omega_bar(1), omega_bar(2)))
    return kills_D and abs(lift_wedge(b)) <= tol


def plus_lift(b: complex, x: complex = 0, y: complex = 0) -> np.ndarray:
    """Full structure for an interior point of the hemisphere (|b| != 1)."""
    from .echelon import J_from_echelon_plus

    return J_from_echelon_plus(orthogonal_plus_coords(b, x, y))


# -- orthogonal integrable structures --------------------------------------

def haar_orthogonal(rng: np.random.Generator, n: int = 6, size: int | None = None) -> np.ndarray:
    shape = (n, n) if size is None else (size, n, n)
    Z = rng.standard_normal(shape)
    Q, R = np.linalg.qr(Z)
    sign = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
    return Q * sign[..., None, :]


def random_orthogonal_acs(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """O J0 O^T for Haar-random O in O(6); both orientations occur."""
    O = haar_orthogonal(rng, 6, size)
    return O @ J0 @ np.swapaxes(O, -1, -2)


def haar_special_orthogonal(rng: np.random.Generator, size: int) -> np.ndarray:
    """Haar-random elements of SO(6); conjugating J0 by them keeps its orientation."""
    O = haar_orthogonal(rng, 6, size)
    flip = np.linalg.det(O) < 0
    O[flip, :, 0] *= -1
    return O


def match_orthogonal(J, tol: float = 1e-8) -> str | None:
    """"J0", "Z", or None if J is near neither.

    For Z the sphere point is read off the anti-self-dual part of the base
    fundamental form, so nothing about J is assumed beyond being close.
    """
    J = np.asarray(J, dtype=float)
    if np.abs(J - J0).max() <= tol:
        return "J0"
    try:
        _, n = sd_split(fundamental_form_D(J[:4, :4]))
    except ValueError:
        return None
    if np.linalg.norm(n) < 0.5:
        return None
    if np.abs(J - z_sphere_element(n)).max() <= tol:
        return "Z"
    return None


def is_integrable_orthogonal(J) -> bool:
    return is_orthogonal(J) and is_integrable(J) and orientation_total(J) > 0


# -- Gauss-Newton search for orthogonal integrable structures --------------

def _bracket_blocks():
    from .cealgebra import STRUCTURE_CONSTANTS

    return STRUCTURE_CONSTANTS[4:, :4, :4]  # brackets live in span(E5, E6) and only see D


_B = _bracket_blocks()
_BP = np.concatenate([_B, np.zeros((2, 4, 2))], axis=-1)  # B_k composed with projection to D


def _t_terms(M):
    """T[..., k, i, j] = [M E_i, E_j]^k + [E_i, M E_j]^k for k in (5, 6)."""
    S = np.swapaxes(M[..., None, :4, :], -1, -2) @ _BP
    return S - np.swapaxes(S, -1, -2)


def _fiber_part(J, T):
    """-sum_k J[m, k] T_k, the part of N coming from J applied to brackets."""
    return -np.einsum("...mk,...kij->...mij", J[..., :, 4:], T, optimize=True)


def nijenhuis_fast(J) -> np.ndarray:
    """Batched Nijenhuis tensor N[..., m, i, j] using the sparsity of the brackets."""
    N = _fiber_part(J, _t_terms(J))
    Jd = J[..., None, :4, :]
    N[..., 4:, :, :] += np.swapaxes(Jd, -1, -2) @ _B @ Jd
    N[..., 4:, :4, :4] -= _B
    return N


def _nijenhuis_derivative(J, H, B=None):
    """Directional derivative of N at J along H (H stacked on axis -3)."""
    Jh = J[..., None, :, :]
    dN = _fiber_part(H, _t_terms(Jh)) + _fiber_part(Jh, _t_terms(H))
    sym = np.swapaxes(H[..., None, :4, :], -1, -2) @ _B @ Jh[..., None, :4, :]
    dN[..., 4:, :, :] += sym - np.swapaxes(sym, -1, -2)  # B is antisymmetric
    return dN


_IU = np.triu_indices(6, 1)


def _flat(N):
    return N[..., _IU[0], _IU[1]].reshape(N.shape[:-3] + (-1,))


def _anticommuting_generators() -> np.ndarray:
    """Orthonormal basis of antisymmetric K with K J0 = -J0 K (six of them)."""
    E = np.zeros((15, 6, 6))
    for h, (a, b) in enumerate(zip(*_IU)):
        E[h, a, b], E[h, b, a] = 1.0, -1.0
    K = 0.5 * (E + J0 @ E @ J0)
    _, s, vh = np.linalg.svd(K.reshape(15, 36))
    return vh[: int(np.sum(s > 1e-9))].reshape(-1, 6, 6)


_K0 = _anticommuting_generators()
_H0 = _K0 @ J0 - J0 @ _K0


def _reorthogonalize(O, steps: int = 2):
    I = np.eye(O.shape[-1], dtype=O.dtype)
    for _ in range(steps):
        O = O @ (3 * I - np.swapaxes(O, -1, -2) @ O) / 2
    return O


def _jacobian(O, J, B):
    H = O[:, None] @ _H0 @ np.swapaxes(O, -1, -2)[:, None]
    return np.swapaxes(_flat(_nijenhuis_derivative(J, H, B)), -1, -2)


def _residual(J):
    return np.abs(_flat(nijenhuis_fast(J))).max(axis=-1)


def project_to_integrable(O, iters: int = 40, polish: int = 8, tol: float = 1e-10):
    """Search for an integrable structure O' J0 O'^T near O J0 O^T.

    Steps conjugate by Cayley transforms of generators anticommuting with the
    current structure, so every iterate is an orthogonal almost complex
    structure with the orientation of the start.  A damped Gauss-Newton phase
    runs in double precision.  Near a root the residual is quadratic in the
    directions mixing span(E1..E4) with span(E5, E6), so a damped step stalls
    there; the polish phase takes undamped pseudo-inverse steps, doubled along
    those directions, with the residual evaluated in extended precision.
    Returns (J, residual) for a stack of orthogonal matrices.
    """
    O = np.array(O, dtype=float)
    B = _B
    J = O @ J0 @ np.swapaxes(O, -1, -2)
    lam = np.full(len(O), 1e-3)
    res = _residual(J)
    for _ in range(iters):
        idx = np.flatnonzero(res > tol)
        if not idx.size:
            break
        Oa, Ja = O[idx], J[idx]
        A = _jacobian(Oa, Ja, B)
        AtA = np.swapaxes(A, -1, -2) @ A
        g = np.einsum("nrh,nr->nh", A, _flat(nijenhuis_fast(Ja)))
        damp = lam[idx, None, None] * (1 + np.trace(AtA, axis1=1, axis2=2))[:, None, None]
        delta = -np.linalg.solve(AtA + damp * np.eye(AtA.shape[-1]), g[..., None])[..., 0]
        Onew = np.linalg.solve(np.eye(6) - np.einsum("nh,hij->nij", delta, _K0) / 2,
                               np.eye(6) + np.einsum("nh,hij->nij", delta, _K0) / 2)
        Onew = Oa @ Onew  # right action on O is a left action on J
        Jnew = Onew @ J0 @ np.swapaxes(Onew, -1, -2)
        rnew = _residual(Jnew)
        ok = rnew < res[idx]
        O[idx[ok]], J[idx[ok]], res[idx[ok]] = Onew[ok], Jnew[ok], rnew[ok]
        lam[idx[ok]] = np.maximum(lam[idx[ok]] / 10, 1e-15)
        lam[idx[~ok]] *= 10

    near = np.flatnonzero(res <= 1e-6)
    if polish and near.size:
        Ox = _reorthogonalize(O[near].astype(np.longdouble), steps=1)
        J0x = J0.astype(np.longdouble)
        Jx = Ox @ J0x @ np.swapaxes(Ox, -1, -2)
        rx = _residual(Jx)
        scale = np.ones(len(near))
        for _ in range(polish):
            A = _jacobian(Ox.astype(float), Jx.astype(float), B)
            r = _flat(nijenhuis_fast(Jx)).astype(float)
            U, sv, Vh = np.linalg.svd(A, full_matrices=False)
            # Newton only halves the error along directions where N is quadratic,
            # so the step is doubled there (tiny singular values)
            keep = sv > 1e-13 * sv[:, :1]
            w = np.where(keep, 1 / np.where(keep, sv, 1), 0) * np.where(sv < 1e-3 * sv[:, :1], 2, 1)
            coef = np.einsum("nrh,nr->nh", U, r) * w
            delta = -np.einsum("nh,nhk->nk", coef, Vh) * scale[:, None]
            step = np.einsum("nh,hij->nij", delta, _K0)
            cay = np.linalg.solve(np.eye(6) - step / 2, np.eye(6) + step / 2)
            Onew = _reorthogonalize(Ox @ cay.astype(np.longdouble), steps=1)
            Jnew = Onew @ J0x @ np.swapaxes(Onew, -1, -2)
            rnew = _residual(Jnew)
            ok = rnew < rx
            Ox[ok], Jx[ok], rx[ok] = Onew[ok], Jnew[ok], rnew[ok]
            scale = np.where(ok, 1.0, scale / 2)
        J[near] = Jx.astype(float)
        res[near] = rx.astype(float)
    return J, res


def pfaffian6(A) -> np.ndarray:
    """Pfaffian of a stack of antisymmetric 6x6 matrices."""
    A = np.asarray(A)

    def pf4(M, idx):
        a, b, c, d = idx
        return M[..., a, b] * M[..., c, d] - M[..., a, c] * M[..., b, d] + M[..., a, d] * M[..., b, c]

    out = 0
    for j in range(1, 6):
        rest = [k for k in range(1, 6) if k != j]
        out = out + (-1) ** (j + 1) * A[..., 0, j] * pf4(A, rest)
    return out


def orientation_orthogonal(J) -> np.ndarray:
    """orientation_total for a stack of orthogonal J, via the sign of Pf(gamma).

    gamma^3 = 6 Pf(gamma) e^123456, and J0 fixes which sign is positive.
    """
    gamma = np.swapaxes(np.asarray(J), -1, -2)
    return np.sign(pfaffian6(gamma) * pfaffian6(J0.T)).astype(int)


def z_sphere_elements(n) -> np.ndarray:
    """Stacked version of :func:`z_sphere_element` for an (m, 3) array of points."""
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    m1, m2, m3 = np.moveaxis(n, -1, 0)
    W = np.zeros(n.shape[:-1] + (4, 4))
    # sd_join with zero self-dual part, then J = W^T
    for val, (i, j) in zip((m1, m2, m3, -m3, m2, -m1), PAIRS_D):
        W[..., i - 1, j - 1] = val
        W[..., j - 1, i - 1] = -val
    J = np.zeros(n.shape[:-1] + (6, 6))
    J[..., :4, :4] = np.swapaxes(W, -1, -2)
    J[..., 4:, 4:] = R2
    flip = orientation_orthogonal(J) < 0
    J[flip, 4:, 4:] = -R2
    return J


def distances_to_family(J) -> tuple[np.ndarray, np.ndarray]:
    """Max-entry distances of a stack of J to J0 and to the matching Z element."""
    J = np.asarray(J, dtype=float)
    d0 = np.abs(J - J0).max(axis=(-2, -1))
    W = np.swapaxes(J[..., :4, :4], -1, -2)
    w = np.stack([W[..., i - 1, j - 1] for i, j in PAIRS_D], axis=-1)
    _, minus = sd_split(np.moveaxis(w, -1, 0))
    n = np.moveaxis(minus, 0, -1)
    dz = np.full(d0.shape, np.inf)
    ok = np.linalg.norm(n, axis=-1) >= 0.5
    dz[ok] = np.abs(J[ok] - z_sphere_elements(n[ok])).max(axis=(-2, -1))
    return d0, dz


@dataclass
class OrthogonalSurvey:
    accepted: int
    attempted: int
    counts: dict
    max_distance: float


def survey_orthogonal(rng: np.random.Generator, n_accept: int, batch: int = 20000,
                      tol: float = 1e-8) -> OrthogonalSurvey:
    """Search from Haar-random starts O J0 O^T, O in SO(6), and sort the results.

    A result is accepted only if it passes the generic checks (orthogonal,
    positive orientation, Nijenhuis tensor below the integrability tolerance);
    each accepted J is then labelled "J0", "Z", or "other" by distance ``tol``.
    """
    counts = {"J0": 0, "Z": 0, "other": 0}
    accepted = attempted = 0
    worst = 0.0
    while accepted < n_accept:
        O = haar_special_orthogonal(rng, batch)
        attempted += batch
        J, _ = project_to_integrable(O)
        orth = np.abs(np.swapaxes(J, -1, -2) @ J - np.eye(6)).max(axis=(-2, -1)) <= ORTHO_TOL
        keep = orth & (orientation_orthogonal(J) > 0) & (nijenhuis_norm(J) <= INTEGRABILITY_TOL)
        J = J[keep][: n_accept - accepted]
        accepted += len(J)
        d0, dz = distances_to_family(J)
        counts["J0"] += int(np.sum(d0 <= tol))
        counts["Z"] += int(np.sum((d0 > tol) & (dz <= tol)))
        counts["other"] += int(np.sum((d0 > tol) & (dz > tol)))
        matched = np.minimum(d0, dz)
        matched = matched[matched <= tol]
        if matched.size:
            worst = max(worst, float(matched.max()))
    return OrthogonalSurvey(accepted, attempted, counts, worst)
