"""Eigenvalue analysis of X conj(X) for the 2x2 matrix X = [[a, b], [c, d]].

The characteristic polynomial is x^2 - gamma x + delta with

    gamma = |a|^2 + |d|^2 + 2 Re(b conj(c)),   delta = |ad - bc|^2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .acstruct import is_integrable, orientation_D, orientation_total, restrict_to_D

CONJUGATE_PAIR = "ConjugatePair"
REAL_TRIANGLE = "RealTriangle"
NEGATIVE_DIAGONAL = "NegativeDiagonal"
SHADED = "Shaded"
BOUNDARY = "Boundary"
REGIONS = (CONJUGATE_PAIR, REAL_TRIANGLE, NEGATIVE_DIAGONAL, SHADED, BOUNDARY)

CPLUS, CMINUS, MINUS_CPLUS, MINUS_CMINUS = "Cplus", "Cminus", "MinusCplus", "MinusCminus"

REAL_TOL = 1e-9
BOUNDARY_TOL = 1e-9


class NotApplicable(ValueError):
    pass


def char_coefficients(a, b, c, d):
    """(gamma, delta) for arrays of entries."""
    a, b, c, d = (np.asarray(z, dtype=complex) for z in (a, b, c, d))
    gamma = np.abs(a) ** 2 + np.abs(d) ** 2 + 2 * np.real(b * np.conj(c))
    delta = np.abs(a * d - b * c) ** 2
    return gamma, delta


def roots(a, b, c, d):
    """(gamma, delta, lam, mu) vectorised over arrays of entries.

    The discriminant is formed from the entries of X conj(X) as
    (M11 - M22)^2 + 4 M12 M21, which is exact in the common symmetric
    cases where gamma^2 - 4 delta would cancel catastrophically.
    """
    a, b, c, d = (np.asarray(z, dtype=complex) for z in (a, b, c, d))
    gamma, delta = char_coefficients(a, b, c, d)
    m11 = a * np.conj(a) + b * np.conj(c)
    m22 = c * np.conj(b) + d * np.conj(d)
    m12 = a * np.conj(b) + b * np.conj(d)
    m21 = c * np.conj(a) + d * np.conj(c)
    disc = np.real((m11 - m22) ** 2 + 4 * m12 * m21)
    sq = np.sqrt(disc.astype(complex))
    # larger-magnitude root first, the other from the product (avoids cancellation)
    sgn = np.where(gamma >= 0, 1.0, -1.0)
    big = (gamma + sgn * sq) / 2
    small = np.zeros_like(big)
    with np.errstate(over="ignore", invalid="ignore"):
        # |small| <= |big|, so a subnormal big means both roots are zero
        np.divide(delta, big, out=small, where=np.abs(big) > 1e-300)
    return gamma, delta, big, small


def is_real_root(z) -> np.ndarray:
    z = np.asarray(z)
    return np.abs(z.imag) <= REAL_TOL * np.maximum(1.0, np.abs(z))


def region_of(lam, mu) -> np.ndarray:
    """Figure-1 region tag for root pairs (vectorised)."""
    lam = np.asarray(lam, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    real = is_real_root(lam) & is_real_root(mu)
    prod = np.real(lam * mu)
    c1 = np.real((1 - lam) * (1 - mu))
    out = np.full(lam.shape, BOUNDARY, dtype=object)
    edge = (np.abs(prod - 1) <= BOUNDARY_TOL) | (np.abs(c1) <= BOUNDARY_TOL)
    conj_pair = ~real & (np.abs(lam) < 1)
    lr, mr = lam.real, mu.real
    triangle = real & (prod >= -BOUNDARY_TOL) & (prod < 1) & (c1 > 0) & (lr >= -REAL_TOL) & (mr >= -REAL_TOL)
    negdiag = real & (lr <= 0) & (mr <= 0) & (np.abs(lam - mu) <= REAL_TOL * np.maximum(1.0, np.abs(lam)))
    shaded = real & (prod > 1) & (c1 < 0)
    out[shaded] = SHADED
    out[negdiag & ~triangle] = NEGATIVE_DIAGONAL
    out[triangle] = REAL_TRIANGLE
    out[conj_pair] = CONJUGATE_PAIR
    out[edge] = BOUNDARY
    return out


def _canonical_order(lam: complex, mu: complex) -> tuple[complex, complex]:
    return tuple(sorted((complex(lam), complex(mu)), key=lambda z: (round(z.real, 12), round(z.imag, 12))))


@dataclass(frozen=True)
class SpectrumClass:
    gamma: float
    delta: float
    lam: complex
    mu: complex
    region: str
    orient_D: int
    orient_total: int

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "delta": self.delta,
            "lambda": [self.lam.real, self.lam.imag],
            "mu": [self.mu.real, self.mu.imag],
            "region": self.region,
            "orient_D": self.orient_D,
            "orient_total": self.orient_total,
        }


def _sign(x: float, tol: float = BOUNDARY_TOL) -> int:
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


def spectrum(X) -> SpectrumClass:
    """Characteristic data of X conj(X).

    ``orient_D`` and ``orient_total`` are the signs of (1-lam)(1-mu) and
    (1-lam)(1-mu)(1-lam mu), i.e. the orientations of the plus-chart structure
    built on X (0 on a boundary).
    """
    X = np.asarray(X, dtype=complex)
    gamma, delta, lam, mu = roots(X[0, 0], X[0, 1], X[1, 0], X[1, 1])
    lam, mu = complex(lam), complex(mu)
    if is_real_root(lam) and is_real_root(mu):
        lam, mu = complex(lam.real), complex(mu.real)
    region = str(region_of(lam, mu))
    lam, mu = _canonical_order(lam, mu)
    c1 = float(np.real((1 - lam) * (1 - mu)))
    c3 = c1 * float(np.real(1 - lam * mu))
    return SpectrumClass(float(gamma), float(delta), lam, mu, region, _sign(c1), _sign(c3))


def lemma_coin_check(X) -> bool:
    """False only for a counterexample: real, non-positive, distinct roots."""
    s = spectrum(X)
    return bool(lemma_coin_mask(np.array([s.lam]), np.array([s.mu]))[0])


def lemma_coin_mask(lam, mu) -> np.ndarray:
    lam = np.asarray(lam)
    mu = np.asarray(mu)
    real = is_real_root(lam) & is_real_root(mu)
    nonpos = (lam.real <= REAL_TOL) & (mu.real <= REAL_TOL)
    distinct = np.abs(lam - mu) > REAL_TOL * np.maximum(1.0, np.abs(lam))
    return ~(real & nonpos & distinct)


# -- components ------------------------------------------------------------

def classify(J, cross_check: bool = True) -> str:
    """Component of an integrable J from its total and base orientations."""
    if not is_integrable(J):
        raise ValueError("J is not integrable")
    total = orientation_total(J)
    base = orientation_D(restrict_to_D(J))
    if total > 0:
        tag = CPLUS if base > 0 else CMINUS
    else:
        # -C_pm = {-J : J in C_pm}; negation keeps the base orientation
        tag = MINUS_CPLUS if base > 0 else MINUS_CMINUS
    if cross_check and total > 0:
        _cross_check(J, tag)
    return tag


def _cross_check(J, tag: str) -> None:
    from .echelon import InfinityClass, echelon_plus_from_J

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            coords = echelon_plus_from_J(J, check=False)
    except InfinityClass:
        return
    s = spectrum(coords.X)
    prod = (s.lam * s.mu).real
    ok = (0 <= prod + BOUNDARY_TOL and prod < 1) if tag == CPLUS else prod > 1
    if not ok:
        raise RuntimeError(f"{tag} structure has lambda*mu = {prod:.6g}")


# -- the star-shaped set U -------------------------------------------------

def in_U(X) -> bool:
    s = spectrum(X)
    if not (is_real_root(s.lam) and is_real_root(s.mu)):
        return bool(abs(s.lam) < 1)
    prod = (s.lam * s.mu).real
    return bool(((1 - s.lam) * (1 - s.mu)).real > 0 and 0 <= prod + 1e-15 and prod < 1)


def in_U_margin(X) -> float:
    """min of (1-lam)(1-mu) and 1 - lam mu; positive inside U."""
    s = spectrum(X)
    return float(min(((1 - s.lam) * (1 - s.mu)).real, 1 - (s.lam * s.mu).real))


def star_shaped_check(X, steps: int = 100) -> bool:
    X = np.asarray(X, dtype=complex)
    if not in_U(X):
        raise ValueError("X is not in U")
    return all(in_U((k / steps) * X) for k in range(steps + 1))


# -- orbit dimension -------------------------------------------------------

def orbit_map_matrix(coords) -> np.ndarray:
    """Real 4x4 matrix of (p, q) -> (u conj(p) - a p - c q, u conj(q) - b p - d q)."""
    a, b, c, d, u = coords.a, coords.b, coords.c, coords.d, coords.u
    cols = []
    for p, q in ((1, 0), (1j, 0), (0, 1), (0, 1j)):
        p, q = complex(p), complex(q)
        r1 = u * np.conj(p) - a * p - c * q
        r2 = u * np.conj(q) - b * p - d * q
        cols.append([r1.real, r1.imag, r2.real, r2.imag])
    return np.array(cols).T


def orbit_dimension(coords) -> int:
    """Complex dimension of the right-translation orbit, via real rank / 2."""
    s = np.linalg.svd(orbit_map_matrix(coords), compute_uv=False)
    if s[0] <= 1e-12:
        return 0
    r = int(np.sum(s > 1e-9 * s[0]))
    return r // 2


def orbit_dimension_cases(coords, tol: float = 1e-12) -> int:
    """Case analysis: 0 if X = 0, 1 if u = 0 and X != 0, else 2."""
    if np.abs(coords.X).max() <= tol:
        return 0
    if abs(coords.u) <= tol:
        return 1
    return 2


# -- consimilarity ---------------------------------------------------------

def consimilar(X, g) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if abs(np.linalg.det(g)) <= 1e-12 * max(1.0, np.abs(g).max() ** 2):
        raise np.linalg.LinAlgError("g is singular")
    return np.linalg.solve(g, X @ g.conj())


def charpoly(M) -> np.ndarray:
    """Coefficients (1, -trace, det) of a 2x2 characteristic polynomial."""
    M = np.asarray(M, dtype=complex)
    return np.array([1.0, -np.trace(M), np.linalg.det(M)])


def consimilarity_canonical_form(X, tol: float = 1e-8):
    """(D, g) with D = diag(sqrt(lam), sqrt(mu)) and g^-1 D conj(g) = X.

    Needs X conj(X) diagonalizable with positive eigenvalues.  Rows r of g are
    left eigenvectors of X conj(X) fixed by the antilinear involution
    r -> conj(r X) / sqrt(lam).
    """
    X = np.asarray(X, dtype=complex)
    M = X @ X.conj()
    if np.abs(M).max() <= 1e-12:
        raise NotApplicable("X conj(X) vanishes")
    s = spectrum(X)
    for z in (s.lam, s.mu):
        if not is_real_root(z) or z.real <= 1e-12:
            raise NotApplicable(f"eigenvalue {z:.6g} is not real and positive")
    repeated = abs(s.lam - s.mu) <= 1e-8 * abs(s.lam)
    if repeated and np.abs(M - s.lam.real * np.eye(2)).max() > 1e-8 * s.lam.real:
        raise NotApplicable("X conj(X) is not diagonalizable")
    eigen = [s.lam.real] if repeated else [s.lam.real, s.mu.real]
    rows, diag = [], []
    for lam in eigen:
        if repeated:
            space = np.eye(2, dtype=complex)
        else:
            _, _, vh = np.linalg.svd(M.T - lam * np.eye(2))
            space = vh[-1:].conj()
        root = np.sqrt(lam)
        want = 2 if repeated else 1
        found = []
        for w in space:
            for cand in (w, 1j * w):
                r = cand + np.conj(cand @ X) / root
                if np.linalg.norm(r) < 1e-6:
                    continue
                r = r / np.linalg.norm(r)
                if found and abs(np.linalg.det(np.vstack([found[0], r]))) < 1e-6:
                    continue
                found.append(r)
            if len(found) >= want:
                break
        rows.extend(found[:want])
        diag.extend([root] * want)
    g = np.array(rows)
    D = np.diag(diag).astype(complex)
    if g.shape != (2, 2):
        raise NotApplicable("could not assemble g")
    resid = np.abs(np.linalg.solve(g, D @ g.conj()) - X).max()
    if resid > tol * max(1.0, np.abs(X).max()):
        raise NotApplicable(f"residual {resid:.2e} exceeds tolerance")
    return D, g


# -- wedge identities ------------------------------------------------------

def eig_wedges(coords) -> tuple[complex, complex]:
    """Coefficients of alpha^12 ^ conj(alpha^12) on e^1234 and of alpha^123 ^ conj(alpha^123) on e^1..6.

    Computed by the exterior-algebra engine from the plus-chart forms.
    """
    from .cealgebra import KForm, wedge_all

    al = [KForm.from_vector(r) for r in coords.forms()]
    bar = [a.conj() for a in al]
    k4 = wedge_all(al[0], al[1], bar[0], bar[1]).coefficient(1, 2, 3, 4)
    k6 = wedge_all(*al, *bar).top_coefficient()
    return complex(k4), complex(k6)


def eig_predictions(coords) -> tuple[complex, complex]:
    """4(1-lam)(1-mu) and -8i(1-lam)(1-mu)(1-lam mu)."""
    s = spectrum(coords.X)
    c1 = (1 - s.lam) * (1 - s.mu)
    return 4 * c1, -8j * c1 * (1 - s.lam * s.mu)


def eig_identity_error(coords) -> float:
    """Largest relative error of the two wedge identities."""
    errs = []
    for got, want in zip(eig_wedges(coords), eig_predictions(coords)):
        errs.append(abs(got - want) / max(abs(want), 1e-300))
    return max(errs)
