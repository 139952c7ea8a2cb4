"""Registry of property suites run by ``iwasawa verify``.

Each suite draws from its own generator, spawned from the run seed by
registry position, so results do not depend on scheduling.  A suite reports
its worst residual (or failure count) against a tolerance.
"""

from __future__ import annotations

import itertools
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import acstruct, cealgebra, dolbeault, echelon, metricgeo, retract, spectra


@dataclass
class SuiteResult:
    name: str
    module: str
    anchor: str
    passed: bool
    worst: float
    tol: float
    detail: str = ""

    @property
    def margin(self) -> float:
        return self.tol - self.worst

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "module": self.module,
            "anchor": self.anchor,
            "passed": self.passed,
            "worst": self.worst,
            "tol": self.tol,
            "margin": self.margin,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class Suite:
    name: str
    module: str
    anchor: str
    tol: float  # default tolerance; 0 means a failure count that must be zero
    fn: Callable
    tunable: bool = True  # whether --tol replaces the default


REGISTRY: list[Suite] = []


def suite(name, module, anchor, tol=0.0, tunable=True):
    def deco(fn):
        REGISTRY.append(Suite(name, module, anchor, tol, fn, tunable))
        return fn
    return deco


# -- samplers --------------------------------------------------------------

MAX_ENTRY = 100.0  # redraw badly conditioned samples


def sample_plus(rng, n, scales=(0.3, 0.7, 1.5)):
    """Positively oriented structures from the plus chart, reaching both components.

    Samples with an entry of J above MAX_ENTRY are redrawn: near the chart
    boundary J -> coords loses digits in proportion to the condition of J.
    """
    out = []
    while len(out) < n:
        c = echelon.random_echelon_plus(rng, scale=scales[len(out) % len(scales)])
        try:
            J = echelon.J_from_echelon_plus(c)
        except echelon.EchelonDegenerate:
            continue
        if np.abs(J).max() <= MAX_ENTRY and acstruct.orientation_total(J) == 1:
            out.append((c, J))
    return out


def sample_minus(rng, n, scale=0.5):
    out = []
    while len(out) < n:
        c = echelon.random_echelon_minus(rng, scale=scale)
        try:
            J = echelon.J_from_echelon_minus(c)
        except echelon.EchelonDegenerate:
            continue
        if np.abs(J).max() <= MAX_ENTRY and acstruct.orientation_total(J) == 1:
            out.append((c, J))
    return out


def _cnormal(rng, size, scale=1.0):
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


# -- cealgebra -------------------------------------------------------------

@suite("structure-equations", "cealgebra", "structure equations and d(d(x)) = 0")
def _structure_equations(rng, n, tol):
    d, KF = cealgebra.ce_differential, cealgebra.KForm
    want = {5: KF.basis(1, 3) + KF.basis(4, 2), 6: KF.basis(1, 4) + KF.basis(2, 3)}
    bad = 0
    for i in range(1, 7):
        bad += d(cealgebra.e(i)) != want.get(i, KF.zero(2))
    for k in range(1, 6):
        for idx in itertools.combinations(range(1, 7), k):
            bad += not d(d(KF.basis(*idx))).is_zero()
    return bad, f"{bad} failing basis forms"


@suite("jacobi", "cealgebra", "derived brackets satisfy the Jacobi identity")
def _jacobi(rng, n, tol):
    r = cealgebra.jacobi_residual()
    return r, f"max cyclic sum {r}"


# -- acstruct --------------------------------------------------------------

@suite("integrability-tests-agree", "acstruct", "Nijenhuis condition versus (0,2)-part of d alpha")
def _integrability_agree(rng, n, tol):
    bad = 0
    for k in range(n):
        J = acstruct.random_acs(rng, acstruct.J0 if k % 2 else acstruct.J1)
        try:
            acstruct.is_integrable(J, method="both")
        except RuntimeError:
            bad += 1
    for _, J in sample_plus(rng, max(1, n // 4)):
        bad += not acstruct.is_integrable(J, method="both")
    return bad, f"{bad} disagreements or false negatives"


# -- echelon ---------------------------------------------------------------

def round_trip_error(coords, J) -> float:
    """Coordinate error and J error relative to max(1, max|J|) of J -> coords -> J."""
    if isinstance(coords, echelon.EchelonPlus):
        back_c = echelon.echelon_plus_from_J(J)
        back = echelon.J_from_echelon_plus(back_c)
    else:
        back_c = echelon.echelon_minus_from_J(J)
        back = echelon.J_from_echelon_minus(back_c)
    dc = max(abs(x - y) for x, y in zip(echelon.astuple_(back_c), echelon.astuple_(coords)))
    return max(dc, np.abs(back - J).max() / max(1.0, np.abs(J).max()))


@suite("echelon-round-trip", "echelon", "plus and minus normal forms round trip", tol=1e-10)
def _round_trip(rng, n, tol):
    worst = 0.0
    for c, J in sample_plus(rng, n // 2) + sample_minus(rng, n // 2):
        worst = max(worst, round_trip_error(c, J))
    return worst, "max relative reconstruction error"


# -- spectra ---------------------------------------------------------------

@suite("eig-wedge-identities", "spectra", "wedge identities in terms of the eigenvalues of X conj(X)", tol=1e-9)
def _eig(rng, n, tol):
    worst = 0.0
    for c, _ in sample_plus(rng, n):
        worst = max(worst, spectra.eig_identity_error(c))
    return worst, "max relative error"


@suite("eigenvalue-coincidence", "spectra", "real non-positive eigenvalues coincide")
def _coin(rng, n, tol):
    m = 100 * n
    a, b, c, d = (_cnormal(rng, m) for _ in range(4))
    _, _, lam, mu = spectra.roots(a, b, c, d)
    bad = int(np.sum(~spectra.lemma_coin_mask(lam, mu)))
    return bad, f"{bad} counterexamples among {m}"


@suite("orbit-dimension", "spectra", "orbit dimension is 0, 1 or 2 by X and u")
def _orbit(rng, n, tol):
    bad = 0
    cases = [echelon.EchelonPlus(), echelon.EchelonPlus(a=0.3, b=0.2, c=0.6, d=0.4),
             echelon.EchelonPlus(a=0.5, d=0.5)]
    for _ in range(n):
        a, b, c = _cnormal(rng, 3, 0.5)
        kind = rng.integers(3)
        d = (b * c / a) if kind == 0 else _cnormal(rng, 1, 0.5)[0]  # u = 0 for kind 0
        cases.append(echelon.EchelonPlus(a, b, c, d))
    for co in cases:
        bad += spectra.orbit_dimension(co) != spectra.orbit_dimension_cases(co)
    return bad, f"{bad} mismatches over {len(cases)}"


@suite("star-shaped", "spectra", "tX stays in U for t in [0, 1]")
def _star(rng, n, tol):
    bad = tried = 0
    while tried < n:
        X = _cnormal(rng, (2, 2), 0.5)
        if not spectra.in_U(X):
            continue
        tried += 1
        bad += not spectra.star_shaped_check(X)
    return bad, f"{bad} failures"


@suite("component-conditions", "spectra", "0 <= lambda mu < 1 on C+, lambda mu > 1 on C-")
def _components(rng, n, tol):
    bad = 0
    counts = {spectra.CPLUS: 0, spectra.CMINUS: 0}
    for c, J in sample_plus(rng, n):
        tag = spectra.classify(J, cross_check=False)
        s = spectra.spectrum(c.X)
        prod = (s.lam * s.mu).real
        counts[tag] += 1
        bad += not ((-1e-9 <= prod < 1) if tag == spectra.CPLUS else prod > 1)
    return bad, f"{bad} violations; C+ {counts[spectra.CPLUS]}, C- {counts[spectra.CMINUS]}"


# -- metricgeo -------------------------------------------------------------

@suite("self-dual-splitting", "metricgeo", "self-dual and anti-self-dual splitting of 2-forms", tol=1e-12)
def _sd(rng, n, tol):
    worst = 0.0
    for _ in range(n):
        w = rng.standard_normal(6)
        p, m = metricgeo.sd_split(w)
        worst = max(worst, np.abs(metricgeo.sd_join(p, m) - w).max(),
                    abs(np.sum(w ** 2) - 2 * (p @ p + m @ m)))
    return worst, "reassembly and norm error"


@suite("hemisphere", "metricgeo", "hemisphere coordinates and the equator obstruction", tol=1e-12)
def _hemi(rng, n, tol):
    worst, bad = 0.0, 0
    for b in _cnormal(rng, n):
        s = metricgeo.hemisphere_coords(b)
        worst = max(worst, abs(s.A ** 2 + s.B ** 2 + s.C ** 2 - 1))
        bad += (s.A > 0) != (abs(b) < 1)
    bad += not metricgeo.equator_obstruction_check(1j)
    return (worst if bad == 0 else np.inf), f"sphere error {worst:.2e}, {bad} sign failures"


@suite("z-sphere", "metricgeo", "sphere Z: orthogonal abelian complex structures in C-", tol=1e-10)
def _z(rng, n, tol):
    worst, bad = 0.0, 0
    for v in rng.standard_normal((n, 3)):
        J = metricgeo.z_sphere_element(v)
        worst = max(worst, float(acstruct.nijenhuis_norm(J)))
        bad += not (metricgeo.is_orthogonal(J) and metricgeo.is_abelian(J)
                    and spectra.classify(J) == spectra.CMINUS)
    return (worst if bad == 0 else np.inf), f"max Nijenhuis {worst:.2e}, {bad} other failures"


@suite("orthogonal-structures", "metricgeo", "orthogonal structures are J0 or lie in Z", tol=1e-8)
def _ags(rng, n, tol):
    res = metricgeo.survey_orthogonal(rng, n, batch=max(n, 50), tol=tol)
    worst = res.max_distance if res.counts["other"] == 0 else np.inf
    return worst, f"J0 {res.counts['J0']}, Z {res.counts['Z']}, other {res.counts['other']}"


# -- retract ---------------------------------------------------------------

def _random_negative_base(rng):
    """X^-1 Q1 X for a random X of positive determinant."""
    while True:
        X = rng.standard_normal((4, 4))
        if np.linalg.det(X) > 0.05:
            return np.linalg.solve(X, retract.Q1 @ X)


@suite("polar-retraction", "retract", "polar factor squares to -1 and fixes the orthogonal sphere", tol=1e-10)
def _polar(rng, n, tol):
    worst = 0.0
    for _ in range(n):
        Q = _random_negative_base(rng)
        sp = retract.polar_retract(Q)
        r = sp.residuals(Q)
        worst = max(worst, r["P_squared"], r["P_orthogonal"], r["product"] / max(1, np.abs(Q).max()))
        worst = max(worst, np.abs(retract.retract(sp.P) - sp.P).max())
    return worst, "max of P^2 + 1, P^T P - 1, S P - Q, r(P) - P"


@suite("retraction-homotopy", "retract", "e^{t sigma} P squares to -1 along the path", tol=1e-9)
def _homotopy(rng, n, tol):
    worst = 0.0
    for _ in range(max(1, n // 10)):
        Q = _random_negative_base(rng)
        for t in np.linspace(0, 1, 101):
            H = retract.homotopy_path(Q, t)
            worst = max(worst, np.abs(H @ H + np.eye(4)).max() / max(1.0, np.abs(H).max() ** 2))
    return worst, "max scaled |H^2 + 1|"


@suite("fibre-over-Q1", "retract", "fibre over Q1: b = c and finite minus coordinates")
def _fibre(rng, n, tol):
    bad = used = 0
    for _ in range(n):
        Jhat = retract.random_fiber_point(rng, scale=0.8)
        x, y = _cnormal(rng, 2)
        J = retract.integrable_completion(Jhat, x, y)
        if acstruct.orientation_total(J) != 1:
            continue
        used += 1
        try:
            bad += not retract.fiber_b_equals_c_check(J)
        except echelon.InfinityClass:
            bad += 1
    return bad, f"{bad} failures among {used} fibre points in C-"


@suite("su2-minus", "retract", "SU(2)_- acts by automorphisms, trivially on self-dual forms", tol=1e-10)
def _su2(rng, n, tol):
    worst = 0.0
    C = cealgebra.STRUCTURE_CONSTANTS
    plus = [metricgeo.form2d_to_matrix(metricgeo.sd_join(e, np.zeros(3))) for e in np.eye(3)]
    for _ in range(n):
        q = rng.standard_normal(4)
        q /= np.linalg.norm(q)
        M = retract.su2_minus_matrix(q)
        # [M E_i, M E_j] = M [E_i, E_j]
        lhs = np.einsum("kab,ai,bj->kij", C, M, M)
        rhs = np.einsum("mk,kij->mij", M, C)
        worst = max(worst, np.abs(lhs - rhs).max())
        R = M[:4, :4]
        worst = max(worst, max(np.abs(R @ W @ R.T - W).max() for W in plus))
    return worst, "bracket and self-dual residuals"


@suite("contraction-to-Z", "retract", "negative component contracts onto Z through C-")
def _contract(rng, n, tol):
    bad = used = 0
    for c, J in sample_minus(rng, max(1, n // 5)):
        used += 1
        path = retract.contraction_path(J)
        ok = np.abs(path.at(0) - J).max() < 1e-9
        ok &= metricgeo.match_orthogonal(path.endpoint()) == "Z"
        ok &= all(spectra.classify(path.at(s), cross_check=False) == spectra.CMINUS
                  for s in np.linspace(0, 1, 21))
        bad += not ok
    return bad, f"{bad} failures among {used} paths"


# -- dolbeault -------------------------------------------------------------

@suite("dolbeault-counts", "dolbeault", "kernel dimension 6 and image dimension equal to orbit dimension")
def _dol(rng, n, tol):
    bad = 0
    for c, J in sample_plus(rng, max(1, n // 2)):
        r = dolbeault.dolbeault_report(J)
        bad += r.ker1 != 6 or r.rank0 != spectra.orbit_dimension(c) or max(r.square_residuals) > 1e-9
    for c, J in sample_minus(rng, max(1, n // 2)):
        r = dolbeault.dolbeault_report(J)
        bad += r.ker1 != 6 or r.rank0 not in (0, 1, 2) or max(r.square_residuals) > 1e-9
    r0 = dolbeault.dolbeault_report(acstruct.J0)
    bad += (r0.rank0, r0.h1) != (0, 6)
    return bad, f"{bad} failures"


@suite("dolbeault-negative-control", "dolbeault", "dbar squared is nonzero without integrability")
def _dol_neg(rng, n, tol):
    bad = 0
    for _ in range(max(1, n // 10)):
        J = acstruct.random_acs(rng)
        if acstruct.is_integrable(J):
            continue
        M0, M1, _ = dolbeault.dbar_matrices(J, check=False)
        bad += np.abs(M1 @ M0).max() <= 1e-3
    return bad, f"{bad} non-integrable structures with dbar^2 = 0"


SUITE_NAMES = [s.name for s in REGISTRY]


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("IWASAWA_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(s: Suite, seed_seq, samples: int, tol: float | None) -> SuiteResult:
    rng = np.random.default_rng(seed_seq)
    use_tol = tol if (tol is not None and s.tunable and s.tol > 0) else s.tol
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        worst, detail = s.fn(rng, samples, use_tol)
    worst = float(worst)
    return SuiteResult(s.name, s.module, s.anchor, bool(worst <= use_tol), worst, use_tol, detail)


def run_all(seed: int = 0, samples: int = 200, tol: float | None = None,
            names: list[str] | None = None) -> list[SuiteResult]:
    seqs = np.random.SeedSequence(seed).spawn(len(REGISTRY))
    jobs = [(s, q) for s, q in zip(REGISTRY, seqs) if names is None or s.name in names]
    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        futures = [pool.submit(run_suite, s, q, samples, tol) for s, q in jobs]
        return [f.result() for f in futures]
