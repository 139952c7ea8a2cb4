"""The twelve acceptance criteria at their stated sample sizes, tolerances and runtimes."""

import itertools
import time
import warnings

import numpy as np

from iwasawa import suites
from iwasawa.acstruct import J0, J1, acs_from_forms, is_integrable, orientation_D, random_acs
from iwasawa.cealgebra import KForm, ce_differential, e, wedge, wedge_all
from iwasawa.dolbeault import dbar_matrices, dolbeault_report
from iwasawa.echelon import (
    W3B,
    EchelonPlus,
    InfinityClass,
    J_from_echelon_plus,
    astuple_,
    echelon_minus_from_J,
    random_echelon_plus,
    to_e_basis,
)
from iwasawa.metricgeo import equator_obstruction_check, fundamental_form_D, hemisphere_coords, sd_split, survey_orthogonal
from iwasawa.retract import (
    Q1,
    contraction_path,
    fiber_b_equals_c_check,
    fiber_contract,
    homotopy_path,
    integrable_completion,
    polar_retract,
    random_fiber_point,
    retract,
)
from iwasawa.spectra import (
    CMINUS,
    classify,
    eig_identity_error,
    in_U,
    lemma_coin_mask,
    orbit_dimension,
    orbit_dimension_cases,
    roots,
    star_shaped_check,
)


def cnormal(rng, size, scale=1.0):
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def test_criterion_01_structure_equations(acceptance):
    t = time.perf_counter()
    want = {5: KForm.basis(1, 3) + KForm.basis(4, 2), 6: KForm.basis(1, 4) + KForm.basis(2, 3)}
    bad = sum(ce_differential(e(i)) != want.get(i, KForm.zero(2)) for i in range(1, 7))
    for k in range(1, 7):
        for idx in itertools.combinations(range(1, 7), k):
            bad += not ce_differential(ce_differential(KForm.basis(*idx))).is_zero()
    dt = time.perf_counter() - t
    acceptance(1, bad == 0 and dt < 1, f"{bad} mismatches in de^i and d(d(e^I)) over all basis forms", dt)


def test_criterion_02_eig_identities(acceptance, rng):
    t = time.perf_counter()
    worst = max(eig_identity_error(c) for c, _ in suites.sample_plus(rng, 1000))
    dt = time.perf_counter() - t
    acceptance(2, worst <= 1e-9 and dt < 10, f"max relative error {worst:.2e} over 1000 samples", dt)


def test_criterion_03_coincidence(acceptance, rng):
    t = time.perf_counter()
    bad = 0
    for _ in range(10):
        a, b, c, d = cnormal(rng, (4, 100_000))
        _, _, lam, mu = roots(a, b, c, d)
        bad += int(np.sum(~lemma_coin_mask(lam, mu)))
    dt = time.perf_counter() - t
    acceptance(3, bad == 0 and dt < 30, f"{bad} counterexamples among 10^6 random X", dt)


def test_criterion_04_echelon_round_trips(acceptance, rng):
    plus = suites.sample_plus(rng, 1000)
    minus = suites.sample_minus(rng, 1000)
    err = max(suites.round_trip_error(c, J) for c, J in plus + minus)
    u_err = max(abs(c.u - (-c.a * c.d + c.b * c.c)) for c, _ in plus)
    u_err = max(u_err, max(abs(echelon_minus_from_J(J).d + c.a * c.v) for c, J in minus))
    ok = err <= 1e-10 and u_err <= 1e-12
    acceptance(4, ok, f"round trip {err:.2e}, constraint error {u_err:.2e} over 1000 + 1000 samples")


def test_criterion_05_orbit_dimension(acceptance, rng):
    cases = [random_echelon_plus(rng) for _ in range(10_000)]
    cases.append(EchelonPlus())
    cases += [EchelonPlus(x=x, y=y) for x, y in cnormal(rng, (20, 2))]
    cases += [EchelonPlus(a=z) for z in cnormal(rng, 50)]
    cases += [EchelonPlus(a=a, b=a * s, c=d, d=d * s) for a, d, s in cnormal(rng, (50, 3))]
    dims = [orbit_dimension(c) for c in cases]
    bad = sum(d != orbit_dimension_cases(c) for d, c in zip(dims, cases))
    seen = sorted(set(dims))
    acceptance(5, bad == 0 and seen == [0, 1, 2], f"{bad} mismatches over {len(cases)} cases, dimensions {seen}")


def test_criterion_06_star_shaped(acceptance, rng):
    bad = tried = 0
    while tried < 1000:
        X = cnormal(rng, (2, 2), 0.5)
        if in_U(X):
            tried += 1
            bad += not star_shaped_check(X, steps=100)
    acceptance(6, bad == 0, f"{bad} of 1000 segments leave U")


def test_criterion_07_hemisphere(acceptance, rng):
    worst, bad = 0.0, 0
    for b in cnormal(rng, 10_000):
        s = hemisphere_coords(b)
        worst = max(worst, abs(s.A ** 2 + s.B ** 2 + s.C ** 2 - 1))
        bad += (s.A > 0) != (abs(b) < 1)
    eq = equator_obstruction_check(1j) and equator_obstruction_check(np.exp(0.7j))
    ok = worst <= 1e-12 and bad == 0 and eq
    acceptance(7, ok, f"sphere error {worst:.1e}, {bad} sign failures, equator obstruction {eq}")


def test_criterion_08_orthogonal_structures(acceptance, rng):
    t = time.perf_counter()
    res = survey_orthogonal(rng, 100_000, tol=1e-8)
    dt = time.perf_counter() - t
    ok = res.counts["other"] == 0 and res.max_distance <= 1e-8 and dt < 120 and res.accepted == 100_000
    acceptance(8, ok, f"J0 {res.counts['J0']}, Z {res.counts['Z']}, other {res.counts['other']}, "
                      f"max distance {res.max_distance:.1e}", dt)


def test_criterion_09_retraction(acceptance, rng):
    sq = fixed = 0.0
    for _ in range(10_000):
        Y = rng.standard_normal((4, 4))
        if np.linalg.det(Y) < 0:
            Y[:, 0] *= -1
        Q = np.linalg.solve(Y, Q1 @ Y)
        P = polar_retract(Q).P
        sq = max(sq, np.abs(P @ P + np.eye(4)).max())
        fixed = max(fixed, np.abs(retract(P) - P).max())
    # points of the anti-self-dual sphere itself
    for n in rng.standard_normal((1000, 3)):
        R = _asd_structure(n / np.linalg.norm(n))
        fixed = max(fixed, np.abs(retract(R) - R).max())
    path = 0.0
    for _ in range(100):
        Y = rng.standard_normal((4, 4))
        if np.linalg.det(Y) < 0:
            Y[:, 0] *= -1
        Q = np.linalg.solve(Y, Q1 @ Y)
        for s in np.linspace(0, 1, 100):
            H = homotopy_path(Q, s)
            path = max(path, np.abs(H @ H + np.eye(4)).max() / max(1.0, np.abs(H).max() ** 2))
    ok = sq <= 1e-10 and fixed <= 1e-10 and path <= 1e-10
    acceptance(9, ok, f"|P^2+1| {sq:.1e}, |r(P)-P| {fixed:.1e}, homotopy {path:.1e} at 100 t-values")


def _asd_structure(n):
    """The orthogonal structure on D whose fundamental form is anti-self-dual with coordinates n."""
    from iwasawa.metricgeo import jhat_from_form2d, sd_join

    return jhat_from_form2d(sd_join(np.zeros(3), n))


def test_criterion_10_fibre_and_contraction(acceptance, rng):
    bad = used = 0
    while used < 500:
        J = integrable_completion(random_fiber_point(rng, scale=0.8), *cnormal(rng, 2))
        if classify(J, cross_check=False) != CMINUS:
            continue
        used += 1
        try:
            coords = echelon_minus_from_J(J)
            finite = all(np.isfinite(v) for v in astuple_(coords))
            bad += not (fiber_b_equals_c_check(J, tol=1e-9) and finite)
        except InfinityClass:
            bad += 1
    paths = 0
    for c, J in suites.sample_minus(rng, 50):
        path = contraction_path(J)
        ok = np.abs(fiber_contract(path.coords, 0) - J1).max() == 0
        ok &= all(classify(path.at(s), cross_check=False) == CMINUS for s in np.linspace(0, 1, 51))
        paths += not ok
    acceptance(10, bad == 0 and paths == 0,
               f"{bad} failures among {used} fibre points, {paths} failing contraction paths of 50")


def test_criterion_11_dolbeault(acceptance, rng):
    t = time.perf_counter()
    bad, h1 = 0, {}
    plus = suites.sample_plus(rng, 500)
    minus = suites.sample_minus(rng, 500)
    for c, J in plus + minus:
        r = dolbeault_report(J)
        expect = orbit_dimension(c) if isinstance(c, EchelonPlus) else r.rank0
        bad += r.ker1 != 6 or r.rank0 not in (0, 1, 2) or r.rank0 != expect
        h1[r.h1] = h1.get(r.h1, 0) + 1
    dt = time.perf_counter() - t
    at_j0 = dolbeault_report(J0).h1
    ok = bad == 0 and at_j0 == 6 and max(h1, key=h1.get) == 4 and dt < 60
    acceptance(11, ok, f"{bad} failures over 1000 samples, h1 at J0 {at_j0}, h1 counts {dict(sorted(h1.items()))}", dt)


def test_criterion_12_negative_controls(acceptance, rng):
    bad = tried = 0
    while tried < 100:
        J = random_acs(rng)
        tried += 1
        integrable = is_integrable(J)
        M0, M1, _ = dbar_matrices(J, check=False)
        bad += integrable or np.abs(M1 @ M0).max() <= 1e-6
    broken = 0
    for _ in range(100):
        c = random_echelon_plus(rng)
        F = c.forms_w()
        F[2, W3B] += 1e-3
        broken += not is_integrable(acs_from_forms(to_e_basis(F)))
    ok = bad == 0 and broken == 100
    acceptance(12, ok, f"{bad} random ACS pass integrability or keep dbar^2 = 0; "
                       f"{broken}/100 perturbed u break integrability")
