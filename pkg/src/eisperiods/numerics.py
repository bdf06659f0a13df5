"""Arbitrary-precision evaluation of the special functions used throughout:
Hurwitz zeta, polylogarithms at roots of unity, Lerch zeta, plus rational
reconstruction of numerically computed invariants.

Evaluation is delegated to mpmath (Euler-Maclaurin based Hurwitz zeta on the
continued domain); polylog and Lerch values at rational arguments are split
over residue classes into Hurwitz zeta values, which keeps every call on the
analytically continued branch.  Error bounds are analytic estimates, not
certified enclosures.  All functions are pure; mpmath's internal constant
caches (pi, Euler gamma, ...) are write-once per precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from mpmath import mp, mpc, mpf

from .exact import QQ, is_integer, qq

DEFAULT_PREC = 192
GUARD_BITS = 16


class PoleError(ValueError):
    """Evaluation requested at a pole of the analytically continued function."""


class PrecisionError(ValueError):
    """The requested tolerance is unattainable at the given precision budget."""


@dataclass(frozen=True)
class PrecisionBudget:
    """Working precision (bits), Fourier truncation, lattice radius, tolerance.

    The recommended defaults keep every documented numeric error bound in
    this package at or below tol.
    """

    prec: int = DEFAULT_PREC
    fourier_terms: int = 200
    lattice_radius: int = 400
    tol: float = 2.0 ** -128

    def validate(self):
        if self.tol < 2.0 ** (16 - self.prec):
            raise PrecisionError("tolerance below what the working precision supports")
        return self


def _to_mp(x):
    """Exact rationals map to exact binary ratios; floats/mpc pass through."""
    if isinstance(x, (mpf, mpc, float, int)):
        return x
    q = qq(x)
    return mpf(int(q.numerator)) / int(q.denominator)


def e_of(x, prec: int = DEFAULT_PREC) -> mpc:
    """e(x) = exp(2 pi i x)."""
    with mp.workprec(prec + GUARD_BITS):
        val = mp.expjpi(2 * _to_mp(x))
    return val


def minus_two_pi_i(prec: int = DEFAULT_PREC) -> mpc:
    with mp.workprec(prec + GUARD_BITS):
        val = mpc(0, -2) * mp.pi
    return val


def hurwitz_zeta(a, s, prec: int = DEFAULT_PREC) -> mpc:
    """zeta(a, s) = sum_{n >= 0} (n+a)^{-s} for rational a in (0, 1], on the
    analytically continued domain (pole only at s = 1)."""
    a = qq(a)
    if not 0 < a <= 1:
        raise ValueError("a must lie in (0, 1]")
    s = mpc(s)
    if s == 1:
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    with mp.workprec(prec + GUARD_BITS):
        if mp.im(s) == 0:
            s = mp.re(s)
        val = mp.zeta(s, _to_mp(a))
    return mpc(val)


def hurwitz_zeta_ds(a, s, prec: int = DEFAULT_PREC) -> mpc:
    """d/ds of zeta(a, s); used for removable-singularity limits."""
    a = qq(a)
    with mp.workprec(prec + GUARD_BITS):
        val = mp.zeta(mpc(s), _to_mp(a), 1)
    return mpc(val)


def polylog(w: int, x, prec: int = DEFAULT_PREC) -> mpc:
    """Li_w(e(x)) for integer w >= 1 and rational x in [0, 1).

    Computed as -log(1 - e(x)) for w = 1 and otherwise by splitting the
    defining series over residue classes mod the denominator of x, which
    turns it into a finite combination of Hurwitz zeta values.
    """
    x = qq(x)
    x = x - (x.numerator // x.denominator)
    if w == 1 and x == 0:
        raise PoleError("Li_1(1) diverges")
    if w < 1:
        raise ValueError("weight must be >= 1")
    return _polylog_cached(w, int(x.numerator), int(x.denominator), prec)


@lru_cache(maxsize=4096)
def _polylog_cached(w: int, num: int, den: int, prec: int) -> mpc:
    with mp.workprec(prec + GUARD_BITS):
        if w == 1:
            val = -mp.log(1 - e_of(QQ(num, den), prec))
        elif num == 0:
            val = mp.zeta(w)
        else:
            # Li_w(e(a/N)) = N^-w sum_{j=1..N} e(j a / N) zeta(j/N, w)
            acc = mpc(0)
            for j in range(1, den + 1):
                acc += e_of(QQ(j * num, den), prec) * mp.zeta(w, mpf(j) / den)
            val = acc / mpf(den) ** w
    return mpc(val)


def polylog_s(s, x, prec: int = DEFAULT_PREC) -> mpc:
    """Li_s(e(x)) for arbitrary complex order s (continued branch), rational x."""
    x = qq(x)
    x = x - (x.numerator // x.denominator)
    s = mpc(s)
    if x == 0:
        if s == 1:
            raise PoleError("Li_1(1) diverges")
        with mp.workprec(prec + GUARD_BITS):
            val = mp.zeta(s if mp.im(s) else mp.re(s))
        return mpc(val)
    if s == 1:
        return polylog(1, x, prec)
    den = int(x.denominator)
    with mp.workprec(prec + GUARD_BITS):
        acc = mpc(0)
        for j in range(1, den + 1):
            acc += e_of(j * x, prec) * hurwitz_zeta(QQ(j, den), s, prec)
        val = acc * mp.power(den, -s)
    return mpc(val)


def lerch_phi(x, a, s, prec: int = DEFAULT_PREC) -> mpc:
    """phi(x, a, s) = sum_{n >= 0} e(nx) (n+a)^{-s} on the continued domain.

    For integer x this is the Hurwitz zeta (pole at s = 1); otherwise the sum
    splits over residue classes mod the denominator of x and is entire in s.
    """
    x = qq(x)
    a = qq(a)
    if not 0 < a <= 1:
        raise ValueError("a must lie in (0, 1]")
    if is_integer(x):
        return hurwitz_zeta(a, s, prec)
    x = x - (x.numerator // x.denominator)
    den = int(x.denominator)
    s = mpc(s)
    with mp.workprec(prec + GUARD_BITS):
        if s == 1:
            # the Hurwitz poles cancel (sum of e(jx) over a full period is 0);
            # the finite part is a digamma combination
            acc = mpc(0)
            for j in range(den):
                acc += e_of(j * x, prec) * (-mp.digamma((_to_mp(QQ(j) + a)) / den))
            val = acc / den
        else:
            acc = mpc(0)
            for j in range(den):
                acc += e_of(j * x, prec) * hurwitz_zeta((QQ(j) + a) / den, s, prec)
            val = acc * mp.power(den, -s)
    return mpc(val)


def rational_reconstruct(z, den_bound: int, eps, prec: int = DEFAULT_PREC):
    """Recover a rational p/q, q <= den_bound, with |z - p/q| < eps, from a
    high-precision value; returns None on failure.

    A candidate is accepted only if its residual is below eps AND the next
    continued-fraction convergent has denominator above den_bound, so that
    the reconstruction is unambiguous at the requested tolerance.
    """
    with mp.workprec(prec + GUARD_BITS):
        z = mpc(z)
        eps = mpf(abs(_to_mp(eps)))
        if abs(mp.im(z)) >= eps:
            return None
        x = mp.re(z)
        p, q = _mpf_ratio(x)  # exact binary rational of the mpf value
        target = QQ(p, q)
        convergents = _convergents(target)
        for i, (pn, qn) in enumerate(convergents):
            if qn > den_bound:
                return None
            residual = abs(x - mpf(pn) / qn)
            if residual < eps:
                nxt = convergents[i + 1] if i + 1 < len(convergents) else None
                if nxt is None or nxt[1] > den_bound:
                    return QQ(pn, qn)
                return None
    return None


def _mpf_ratio(x):
    sign, man, exp, _ = mp.mpf(x)._mpf_
    man = -man if sign else man
    if exp >= 0:
        return man * (1 << exp), 1
    return man, 1 << (-exp)


def mpf_hex(x) -> str:
    """Deterministic full-precision rendering of a real value as a
    hex-significand string 0x<mantissa>p<exponent>."""
    sign, man, exp, _ = mpf(x)._mpf_
    m = -man if sign else man
    return f"{'-' if m < 0 else ''}0x{abs(m):x}p{exp}"


def mpc_json(z) -> dict:
    z = mpc(z)
    return {"re": mpf_hex(z.real), "im": mpf_hex(z.imag)}


def _convergents(x: QQ):
    """All continued-fraction convergents of an exact rational."""
    a, b = int(x.numerator), int(x.denominator)
    p0, q0, p1, q1 = 0, 1, 1, 0  # h_{-2}/k_{-2}, h_{-1}/k_{-1}
    out = []
    while b:
        t = a // b
        a, b = b, a - t * b
        p0, p1 = p1, t * p1 + p0
        q0, q1 = q1, t * q1 + q0
        out.append((p1, q1))
    return out


# ---------------------------------------------------------------------------
# numeric embeddings of the exact layer


def cyclo_value(c, prec: int = DEFAULT_PREC) -> mpc:
    """Embed a Cyclo element via mu_N -> exp(2 pi i / N)."""
    with mp.workprec(prec + GUARD_BITS):
        mu = e_of(QQ(1, c.N), prec)
        acc = mpc(0)
        for coeff in reversed(c.coeffs):
            acc = acc * mu + _to_mp(coeff)
    return mpc(acc)


def polylog_symbol_value(sym, prec: int = DEFAULT_PREC) -> mpc:
    """PL(w; a/b) = Li_w(e(a/b)) / (-2 pi i)^w numerically."""
    with mp.workprec(prec + GUARD_BITS):
        li = polylog(sym.w, QQ(sym.num, sym.den), prec)
        val = li / minus_two_pi_i(prec) ** sym.w
    return mpc(val)


def ext_scalar_value(x, prec: int = DEFAULT_PREC) -> mpc:
    with mp.workprec(prec + GUARD_BITS):
        acc = mpc(_to_mp(x.rational))
        for sym, coeff in x.sorted_symbols():
            acc += _to_mp(coeff) * polylog_symbol_value(sym, prec)
    return mpc(acc)


def raw_symbol_sum_value(w: int, raw_terms: dict, prec: int = DEFAULT_PREC) -> mpc:
    """Numeric value of an unreduced symbol sum sum coeff * PL(w; arg)."""
    with mp.workprec(prec + GUARD_BITS):
        m2pi = minus_two_pi_i(prec) ** w
        acc = mpc(0)
        for arg, coeff in raw_terms.items():
            a = qq(arg)
            a = a - (a.numerator // a.denominator)
            acc += _to_mp(qq(coeff)) * polylog(w, a, prec) / m2pi
    return mpc(acc)
