"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run as  pytest -v -s tests/test_acceptance.py  to see the per-criterion lines.
"""
import random

import pytest
from mpmath import mp, mpc, mpf

from eisperiods.exact import (
    QQ,
    ExtScalar,
    bernoulli_value,
    qq,
)
from eisperiods.cocycle import (
    PeriodPoly,
    build_induced,
    certify_parameter,
    shapiro_descend,
    verify_relations,
)
from eisperiods.eisenstein import (
    LatticeParams,
    e_fourier,
    elliptic_maass_fourier,
    eval_fourier,
    g_fourier,
    lattice_sum,
    maass_fourier,
    raw_scale,
)
from eisperiods.invariant import (
    BiPoly,
    IdealClassTerm,
    QuadLatticeData,
    dd_m_by_raising,
    dd_m_poly,
    hecke_assemble,
    psi_gamma_shift,
    psi_value_ratio,
)
from eisperiods.lseries import (
    LFunctionSpec,
    lvalue_closed,
    lvalue_lerch_product,
    lvalue_numeric,
)
from eisperiods.modgroup import S, T, ResiduePair, act_residue, index_set, t_power
from eisperiods.numerics import (
    e_of,
    hurwitz_zeta,
    polylog,
    rational_reconstruct,
)

PREC = 192


def setup_module():
    mp.prec = 300


def _report(criterion: int, label: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion {criterion}: {label}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {criterion} failed: {label} {detail}"


@pytest.fixture(scope="module")
def sweep_results():
    """Shared sweep over N <= 6, k <= 8: certification, relations, descent."""
    cert_fail = []
    rel_fail = []
    desc_fail = []
    cells = 0
    for N in range(1, 7):
        for k in range(2, 9):
            for lam in index_set(N, k):
                cells += 1
                cochain, modified, report = certify_parameter(k, lam, N)
                if not report.certified:
                    cert_fail.append((k, N, lam.pair(), report.failures[:2]))
                if not all(
                    p.is_rational() for p in modified.val_T + modified.val_S
                ):
                    cert_fail.append((k, N, lam.pair(), "non-rational coefficient"))
                if not verify_relations(cochain):
                    rel_fail.append((k, N, lam.pair()))
                # descent at T^N against the closed form
                got = shapiro_descend(cochain, t_power(N))
                f_inf = -bernoulli_value(k, QQ(lam.l1, N)) / _fact(k)
                want = PeriodPoly(
                    k,
                    [
                        ExtScalar(f_inf / (k - 1) * _binom(k - 1, j) * N ** (k - 1 - j))
                        for j in range(k - 1)
                    ],
                )
                if got != want:
                    desc_fail.append((k, N, lam.pair()))
    return {
        "cells": cells,
        "cert_fail": cert_fail,
        "rel_fail": rel_fail,
        "desc_fail": desc_fail,
    }


def _fact(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _binom(n, k):
    from math import comb

    return comb(n, k)


def test_criterion_1_rationality_theorem(sweep_results):
    ok = not sweep_results["cert_fail"] and sweep_results["cells"] == 616
    _report(
        1,
        "exact rationality of modified cocycles over N<=6, k<=8",
        ok,
        f"{sweep_results['cells']} cells, failures={sweep_results['cert_fail'][:3]}",
    )


def test_criterion_2_fourier_vs_lattice():
    # grid with total weight >= 10 so the documented O(R^{2-w}) truncation
    # tail of the oracle sits below the 1e-18 comparison threshold at R = 400
    taus = {
        "i": mpc(0, 1),
        "(1+3i)/2": mpc(mpf(1) / 2, mpf(3) / 2),
        "1/5+2i": mpc(mpf(1) / 5, 2),
    }
    holo_cases = [  # normalized holomorphic series against the twisted sum
        (10, 1, (0, 0), "i"),
        (11, 3, (1, 2), "1/5+2i"),
        (12, 2, (0, 1), "(1+3i)/2"),
        (11, 4, (2, 3), "i"),
        (10, 2, (1, 1), "1/5+2i"),
    ]
    maass_cases = [  # congruence double-index series
        (6, 4, 1, (0, 0), "i"),
        (7, 3, 2, (1, 1), "(1+3i)/2"),
        (5, 5, 2, (0, 1), "1/5+2i"),
        (8, 2, 3, (1, 2), "i"),
        (7, 4, 4, (2, 1), "(1+3i)/2"),
        (6, 5, 4, (3, 0), "1/5+2i"),
        (9, 2, 2, (1, 0), "1/5+2i"),
        (8, 3, 3, (0, 2), "i"),
        (12, 0, 4, (1, 3), "(1+3i)/2"),
        (10, 1, 3, (2, 2), "i"),
    ]
    elliptic_cases = [  # twisted double-index series
        (5, 5, 1, (0, 0), "i"),
        (6, 4, 2, (0, 1), "(1+3i)/2"),
        (7, 3, 2, (1, 0), "1/5+2i"),
        (4, 6, 3, (1, 2), "i"),
        (8, 4, 4, (2, 3), "(1+3i)/2"),
        (6, 6, 2, (1, 1), "1/5+2i"),
    ]
    M, R = 200, 400
    worst = mpf(0)
    count = 0
    for k, N, lam_pair, tau_name in holo_cases:
        lam = ResiduePair(N, *lam_pair)
        tau = taus[tau_name]
        f = e_fourier(k, lam, N, M)
        got = eval_fourier(f, tau, PREC) * raw_scale(k, PREC)
        want = lattice_sum(LatticeParams(k, 0, N, lam, "elliptic", R), tau, PREC)
        worst = max(worst, abs(got - want))
        count += 1
    for k, l, N, lam_pair, tau_name in maass_cases:
        lam = ResiduePair(N, *lam_pair)
        tau = taus[tau_name]
        fser = maass_fourier(k, l, lam, N, M, PREC)
        got = eval_fourier(fser, tau, PREC)
        want = lattice_sum(LatticeParams(k, l, N, lam, "congruence", R), tau, PREC)
        worst = max(worst, abs(got - want))
        count += 1
    for k, l, N, lam_pair, tau_name in elliptic_cases:
        lam = ResiduePair(N, *lam_pair)
        tau = taus[tau_name]
        fser = elliptic_maass_fourier(k, l, lam, N, M, PREC)
        got = eval_fourier(fser, tau, PREC)
        want = lattice_sum(LatticeParams(k, l, N, lam, "elliptic", R), tau, PREC)
        worst = max(worst, abs(got - want))
        count += 1
    ok = count >= 20 and worst < mpf(10) ** -18
    _report(2, "Fourier vs lattice oracle", ok, f"{count} cases, worst |diff| = {mp.nstr(worst, 4)}")


def test_criterion_3_lvalue_triple_agreement():
    anchor = lvalue_closed(4, ResiduePair(1, 0, 0), 1, 2).numeric(PREC) * raw_scale(4, PREC)
    anchor_ok = abs(anchor - (-mp.pi ** 4 / 54)) < mpf(10) ** -40
    worst = mpf(0)
    checked = 0
    for N in range(1, 5):
        for k in range(2, 9):
            for lam in index_set(N, k):
                spec = LFunctionSpec.for_e_series(k, lam, N, 200)
                scale = raw_scale(k, PREC)
                for r in range(1, k):
                    closed = lvalue_closed(k, lam, N, r).numeric(PREC)
                    numer = lvalue_numeric(spec, r, PREC)
                    lerch = lvalue_lerch_product(k, lam, N, r, PREC) / scale
                    worst = max(
                        worst,
                        abs(closed - numer),
                        abs(closed - lerch),
                        abs(numer - lerch),
                    )
                    checked += 1
    ok = anchor_ok and worst < mpf(10) ** -20
    _report(
        3,
        "L-value triple agreement k<=8, N<=4",
        ok,
        f"{checked} values, worst pairwise diff = {mp.nstr(worst, 4)}",
    )


def test_criterion_4_functional_equation():
    samples = [
        (4, 1, (0, 0), mpf("1.7")),
        (2, 2, (0, 1), mpf("0.8")),
        (3, 3, (1, 1), mpf("1.2")),
        (5, 3, (2, 0), mpc("2.5", "0.3")),
        (6, 2, (1, 1), mpf("3.1")),
        (7, 4, (1, 2), mpf("2.2")),
        (8, 1, (0, 0), mpc("4.5", "-0.7")),
        (4, 4, (3, 2), mpf("0.4")),
        (5, 4, (0, 3), mpc("1.9", "1.1")),
        (2, 3, (2, 2), mpf("1.6")),
    ]
    worst = mpf(0)
    for k, N, lam_pair, s in samples:
        lam = ResiduePair(N, *lam_pair)
        spec_f = LFunctionSpec.for_e_series(k, lam, N, 200)
        spec_fs = LFunctionSpec.for_e_series(k, act_residue(lam, S), N, 200)
        lhs = lvalue_numeric(spec_f, s, PREC)
        rhs = mpc(1j) ** k * lvalue_numeric(spec_fs, k - s, PREC)
        worst = max(worst, abs(lhs - rhs))
    ok = worst < mpf(10) ** -18
    _report(4, "completed-L functional equation, 10 samples", ok, f"worst residual = {mp.nstr(worst, 4)}")


def test_criterion_5_cocycle_relations(sweep_results):
    ok = not sweep_results["rel_fail"]
    # corrupted-cochain control
    c = build_induced(4, ResiduePair(2, 0, 1), 2)
    bad = c.copy()
    polys = list(bad.val_S)
    coeffs = list(polys[0].coeffs)
    coeffs[1] = coeffs[1] + ExtScalar(QQ(1, 5))
    polys[0] = PeriodPoly(4, coeffs)
    bad.val_S = polys
    control = not verify_relations(bad)
    _report(
        5,
        "exact cocycle relations across the sweep + corrupted control",
        ok and control,
        f"relation failures={sweep_results['rel_fail'][:3]}, control={'ok' if control else 'missed'}",
    )


def test_criterion_6_shapiro_descent(sweep_results):
    ok = not sweep_results["desc_fail"]
    _report(
        6,
        "descended value at T^N equals the parabolic closed form",
        ok,
        f"failures={sweep_results['desc_fail'][:3]}",
    )


def test_criterion_7_composite_operator():
    ok = True
    for m in range(2, 9):
        for n in range(0, 2 * m):
            if dd_m_poly(m, n) != dd_m_by_raising(m, n):
                ok = False
        n = 2 * m - 1
        from eisperiods.exact import formal_binomial

        top = BiPoly(
            {(n - r, r): _fact(m - 1) * (-1) ** r * formal_binomial(n, r) for r in range(m)}
        )
        if dd_m_poly(m, n) != top:
            ok = False
    _report(7, "closed-form operator equals iterated raising, m<=8", ok)


def test_criterion_8_invariant_certification():
    failures = []
    for preset in ("gaussian", "eisenstein"):
        data = QuadLatticeData.preset(preset)
        for m in (2, 3, 4):
            for name, gamma in (("T", T), ("S", S), ("ST", S * T)):
                shift = psi_gamma_shift(m, data, gamma, M=400, prec=256)
                rec = rational_reconstruct(shift, 10 ** 6, mpf(10) ** -30, 256)
                if rec is None:
                    failures.append((preset, m, name, "shift"))
            ratio = psi_value_ratio(m, data, data.lam, M=400, prec=256)
            rec = rational_reconstruct(ratio, 10 ** 6, mpf(10) ** -30, 256)
            if rec is None:
                failures.append((preset, m, "value"))
    ok = not failures
    _report(
        8,
        "invariant shift/value rational reconstruction, both presets, m in {2,3,4}",
        ok,
        f"failures={failures[:4]}",
    )


def test_criterion_9_special_function_suite():
    # Hurwitz zeta at nonpositive integers = Bernoulli polynomial values, exact
    hurwitz_ok = True
    for n in range(9):
        for a in (QQ(1, 2), QQ(1, 3), QQ(1, 4), QQ(1)):
            want = -bernoulli_value(n + 1, a) / (n + 1)
            got = rational_reconstruct(
                hurwitz_zeta(a, -n, PREC), 10 ** 12, mpf(2) ** -120, PREC
            )
            if got != want:
                hurwitz_ok = False
    # polylog reflection, residual < 1e-30 for w <= 6
    reflect_worst = mpf(0)
    for w in range(2, 7):
        for x in (QQ(1, 5), QQ(1, 3), QQ(1, 2), QQ(2, 7)):
            b = bernoulli_value(w, x)
            resid = abs(
                polylog(w, x, PREC)
                + (-1) ** w * polylog(w, 1 - x, PREC)
                + (2j * mp.pi) ** w * _q2mp(b) / _fact(w)
            )
            reflect_worst = max(reflect_worst, resid)
    reflect_ok = reflect_worst < mpf(10) ** -30
    # Bernoulli identities, exact
    rng = random.Random(2)
    bern_ok = True
    for n in range(13):
        for _ in range(10):
            t = QQ(rng.randrange(0, 60), 60)
            if bernoulli_value(n, 1 - t) != (-1) ** n * bernoulli_value(n, t):
                bern_ok = False
            if n >= 1 and bernoulli_value(n, 1 + t) != bernoulli_value(n, t) + n * t ** (n - 1):
                bern_ok = False
    # Fourier series of Bernoulli polynomials at 10^4 terms, Abel tail bound
    fourier_ok = True
    Mterms = 10 ** 4
    for k, t in ((2, QQ(1, 3)), (3, QQ(1, 4)), (4, QQ(1, 2)), (5, QQ(2, 5))):
        partial = _bernoulli_fourier_partial(k, t, Mterms)
        target = _q2mp(bernoulli_value(k, t))
        sin_pi_t = mp.sin(mp.pi * _q2mp(t))
        bound = 2 * _fact(k) / ((2 * mp.pi) ** k * (Mterms + 1) ** k * abs(sin_pi_t))
        if abs(partial - target) > bound:
            fourier_ok = False
    ok = hurwitz_ok and reflect_ok and bern_ok and fourier_ok
    _report(
        9,
        "special-function identity suite",
        ok,
        f"hurwitz={hurwitz_ok} reflection(worst {mp.nstr(reflect_worst, 3)})={reflect_ok} "
        f"bernoulli={bern_ok} fourier={fourier_ok}",
    )


def _q2mp(x):
    x = qq(x)
    return mpf(int(x.numerator)) / int(x.denominator)


def _bernoulli_fourier_partial(k: int, t: QQ, M: int):
    """-k!/(2 pi i)^k sum_{0 < |n| <= M} e(nt)/n^k via residue-class tables."""
    den = int(t.denominator)
    with mp.workprec(140):
        phases = [e_of(QQ(j, den), 128) for j in range(den)]
        acc = mpc(0)
        num = int(t.numerator)
        for n in range(1, M + 1):
            ph = phases[(n * num) % den]
            term = (ph + (-1) ** k * mp.conj(ph)) / mpf(n) ** k
            acc += term
        val = -_fact(k) / (2j * mp.pi) ** k * acc
    return val.real


def test_criterion_10_hecke_assembly():
    data = QuadLatticeData.preset("gaussian")
    val = hecke_assemble(2, 0, [IdealClassTerm(data, QQ(1), mpc(1))], 4, prec=256, M=400)
    with mp.workprec(280):
        want = mp.zeta(2) * mp.catalan
    diff = abs(val - want)
    ok = diff < mpf(10) ** -15
    _report(10, "Hecke assembly matches zeta(2) * Catalan", ok, f"|diff| = {mp.nstr(diff, 4)}")
