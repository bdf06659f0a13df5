"""Exact arithmetic layer: rationals, cyclotomic numbers, Bernoulli polynomials,
formal binomials and the polylogarithm-symbol ring.

Everything here is immutable after construction and all operations are pure,
so the whole layer is safe for unrestricted concurrent use.
"""
from __future__ import annotations

from functools import lru_cache
from math import gcd
from typing import Dict, List, Sequence, Tuple, Union

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover
    from fractions import Fraction as QQ

RatLike = Union[int, str, "QQ"]


def qq(x: RatLike, den: int | None = None) -> QQ:
    """Coerce to an exact rational."""
    if den is not None:
        return QQ(x, den)
    if isinstance(x, str):
        return QQ(x)
    return QQ(x)


def qq_str(x) -> str:
    """Serialize a rational as "p/q" (denominator always present)."""
    x = qq(x)
    return f"{x.numerator}/{x.denominator}"


def is_integer(x) -> bool:
    return qq(x).denominator == 1


class DivergentSymbolError(ValueError):
    """Raised when a weight-1 polylog symbol at argument 0 is requested."""


# ---------------------------------------------------------------------------
# formal binomial coefficients and Bernoulli polynomials


def formal_binomial(t, n: int) -> QQ:
    """Formal binomial t(t-1)...(t-n+1)/n! ; equals 1 at n=0 and 0 for n<0.

    Works for any rational t, in particular negative integers.
    """
    if n < 0:
        return QQ(0)
    if n == 0:
        return QQ(1)
    t = qq(t)
    num = QQ(1)
    for j in range(n):
        num *= t - j
        num /= j + 1
    return num


@lru_cache(maxsize=None)
def _bernoulli_numbers(n: int) -> tuple:
    """B_0..B_n with B_1 = -1/2 (generating function X e^{tX}/(e^X - 1))."""
    if n == 0:
        return (QQ(1),)
    prev = _bernoulli_numbers(n - 1)
    # sum_{j=0}^{n} C(n+1, j) B_j = 0 for n >= 1
    s = QQ(0)
    binom = 1
    for j in range(n):
        s += binom * prev[j]
        binom = binom * (n + 1 - j) // (j + 1)
    return prev + (-s / (n + 1),)


def bernoulli_number(n: int) -> QQ:
    if n < 0:
        raise ValueError("Bernoulli index must be >= 0")
    return _bernoulli_numbers(n)[n]


class BernoulliPoly:
    """B_n(X) with exact rational coefficients, coeffs[j] = coefficient of X^j."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Sequence):
        self.n = n
        self.coeffs = tuple(qq(c) for c in coeffs)

    def __call__(self, t) -> QQ:
        t = qq(t)
        acc = QQ(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __eq__(self, other):
        return (
            isinstance(other, BernoulliPoly)
            and self.n == other.n
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return f"BernoulliPoly({self.n}, {list(self.coeffs)})"


@lru_cache(maxsize=None)
def bernoulli_polynomial(n: int) -> BernoulliPoly:
    """B_n(X) = sum_j C(n,j) B_{n-j} X^j, exact and memoized."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    nums = _bernoulli_numbers(n)
    coeffs = []
    binom = 1
    for j in range(n + 1):
        coeffs.append(binom * nums[n - j])
        binom = binom * (n - j) // (j + 1)
    return BernoulliPoly(n, coeffs)


def bernoulli_value(n: int, t) -> QQ:
    """B_n(t) for rational t."""
    return bernoulli_polynomial(n)(t)


# ---------------------------------------------------------------------------
# cyclotomic field Q(mu_N) in the power basis modulo Phi_N


@lru_cache(maxsize=None)
def cyclotomic_polynomial(N: int) -> tuple:
    """Integer coefficients of Phi_N, low degree first, computed by dividing
    x^N - 1 by the product of Phi_d over proper divisors d of N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N == 1:
        return (-1, 1)
    # numerator x^N - 1
    num = [0] * (N + 1)
    num[0], num[N] = -1, 1
    for d in range(1, N):
        if N % d == 0:
            num = _poly_div_exact(num, cyclotomic_polynomial(d))
    return tuple(num)


def _poly_div_exact(num: List[int], den: Sequence[int]) -> List[int]:
    """Exact division of integer polynomials (low degree first)."""
    num = list(num)
    dd = len(den) - 1
    lead = den[-1]
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        q, r = divmod(c, lead)
        if r:
            raise ArithmeticError("non-exact polynomial division")
        quot[i - dd] = q
        for j in range(dd + 1):
            num[i - dd + j] -= q * den[j]
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return quot


@lru_cache(maxsize=None)
def euler_phi(N: int) -> int:
    return len(cyclotomic_polynomial(N)) - 1


class Cyclo:
    """Element of Q(mu_N), mu_N = exp(2 pi i / N), as a coefficient vector of
    length phi(N) over the power basis 1, mu_N, ..., mu_N^{phi(N)-1}.

    The power-basis representation modulo Phi_N is a canonical form, so
    equality and zero tests reduce to coefficient comparison.
    """

    __slots__ = ("N", "coeffs")

    def __init__(self, N: int, coeffs: Sequence):
        phi = euler_phi(N)
        coeffs = [qq(c) for c in coeffs]
        if len(coeffs) != phi:
            raise ValueError(f"need exactly phi({N}) = {phi} coefficients")
        self.N = N
        self.coeffs = tuple(coeffs)

    # -- constructors

    @staticmethod
    def zero(N: int) -> "Cyclo":
        return Cyclo(N, [QQ(0)] * euler_phi(N))

    @staticmethod
    def one(N: int) -> "Cyclo":
        c = [QQ(0)] * euler_phi(N)
        c[0] = QQ(1)
        return Cyclo(N, c)

    @staticmethod
    def rational(N: int, x) -> "Cyclo":
        c = [QQ(0)] * euler_phi(N)
        c[0] = qq(x)
        return Cyclo(N, c)

    @staticmethod
    def root_power(N: int, e: int) -> "Cyclo":
        """mu_N^e in canonical form."""
        raw = [QQ(0)] * N
        raw[e % N] = QQ(1)
        return cyclo_canonical(N, raw)

    # -- arithmetic

    def _check(self, other: "Cyclo"):
        if self.N != other.N:
            raise ValueError("mixed cyclotomic levels")

    def __add__(self, other):
        if isinstance(other, Cyclo):
            self._check(other)
            return Cyclo(self.N, [a + b for a, b in zip(self.coeffs, other.coeffs)])
        return self + Cyclo.rational(self.N, other)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.N, [-a for a in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, Cyclo):
            self._check(other)
            return Cyclo(self.N, [a - b for a, b in zip(self.coeffs, other.coeffs)])
        return self - Cyclo.rational(self.N, other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyclo):
            x = qq(other)
            return Cyclo(self.N, [a * x for a in self.coeffs])
        self._check(other)
        a, b = self.coeffs, other.coeffs
        prod = [QQ(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                if bj == 0:
                    continue
                prod[i + j] += ai * bj
        return Cyclo(self.N, _reduce_mod_phi(prod, self.N))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Cyclo):
            return self * other.inverse()
        return self * (QQ(1) / qq(other))

    def inverse(self) -> "Cyclo":
        """Multiplicative inverse via extended Euclid against Phi_N in Q[x]."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        phi = [qq(c) for c in cyclotomic_polynomial(self.N)]
        r0, r1 = phi, list(self.coeffs)
        s0, s1 = [QQ(0)], [QQ(1)]
        while _poly_degree(r1) > 0:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        if _poly_degree(r1) < 0:
            raise ZeroDivisionError("element is a zero divisor (not in the field)")
        c = r1[0]
        inv = [x / c for x in s1]
        return Cyclo(self.N, _reduce_mod_phi(inv, self.N))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> QQ:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coeffs[0]

    def __eq__(self, other):
        if isinstance(other, Cyclo):
            return self.N == other.N and self.coeffs == other.coeffs
        return self.is_rational() and self.coeffs[0] == qq(other)

    def __hash__(self):
        return hash((self.N, self.coeffs))

    def __repr__(self):
        return f"Cyclo({self.N}, {[str(c) for c in self.coeffs]})"

    def to_json(self) -> list:
        return [qq_str(c) for c in self.coeffs]


def _poly_degree(p: Sequence) -> int:
    for i in range(len(p) - 1, -1, -1):
        if p[i] != 0:
            return i
    return -1


def _poly_divmod(a: Sequence, b: Sequence):
    a = list(a)
    db = _poly_degree(b)
    lead = b[db]
    q = [QQ(0)] * max(len(a) - db, 1)
    for i in range(_poly_degree(a), db - 1, -1):
        if a[i] == 0:
            continue
        f = a[i] / lead
        q[i - db] = f
        for j in range(db + 1):
            a[i - db + j] -= f * b[j]
    return q, a[:db] if db > 0 else [QQ(0)]


def _poly_mul(a: Sequence, b: Sequence) -> List:
    out = [QQ(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_sub(a: Sequence, b: Sequence) -> List:
    n = max(len(a), len(b))
    out = [QQ(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return out


def _reduce_mod_phi(coeffs: Sequence, N: int) -> List:
    """Reduce a polynomial in mu_N (low degree first) modulo Phi_N."""
    phi = cyclotomic_polynomial(N)
    deg = len(phi) - 1
    work = [qq(c) for c in coeffs]
    if len(work) < deg:
        work += [QQ(0)] * (deg - len(work))
    for i in range(len(work) - 1, deg - 1, -1):
        c = work[i]
        if c == 0:
            continue
        work[i] = QQ(0)
        for j in range(deg):
            work[i - deg + j] -= c * phi[j]
    return work[:deg]


def cyclo_canonical(N: int, coeffs: Sequence) -> Cyclo:
    """Canonical element of Q(mu_N) from coefficients over mu_N^0..mu_N^{N-1}."""
    if len(coeffs) != N:
        raise ValueError(f"expected {N} coefficients over the N power basis")
    return Cyclo(N, _reduce_mod_phi(list(coeffs), N))


# ---------------------------------------------------------------------------
# polylog symbols PL(w; a/N) := Li_w(e(a/N)) / (-2 pi i)^w and the ring Q + Q<PL>


class PolylogSymbol:
    """Canonical transcendental generator PL(w; a/b).

    Canonical form restricts the argument to [0, 1/2]; argument 0 only occurs
    for odd weight >= 3 (all other boundary cases reduce to rationals).
    """

    __slots__ = ("w", "num", "den")

    def __init__(self, w: int, num: int, den: int):
        if w < 1:
            raise ValueError("weight must be >= 1")
        if den <= 0:
            raise ValueError("argument denominator must be positive")
        g = gcd(num, den)
        num, den = num // g, den // g
        if not 0 <= 2 * num <= den:
            raise ValueError("canonical argument must lie in [0, 1/2]")
        if num == 0:
            if w == 1:
                raise DivergentSymbolError("PL(1; 0) diverges")
            if w % 2 == 0:
                raise ValueError("PL(even w; 0) is rational, not a symbol")
        if 2 * num == den and w % 2 == 0:
            raise ValueError("PL(even w; 1/2) is rational, not a symbol")
        self.w = w
        self.num = num
        self.den = den

    @property
    def argument(self) -> QQ:
        return QQ(self.num, self.den)

    def key(self):
        return (self.w, self.num, self.den)

    def __eq__(self, other):
        return isinstance(other, PolylogSymbol) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        return f"PL({self.w}; {self.num}/{self.den})"


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _reduce_one_symbol(w: int, arg) -> Tuple[QQ, "PolylogSymbol | None", QQ]:
    """Express the raw term PL(w; arg), arg in [0,1), in canonical form.

    Returns (rational_part, symbol_or_None, symbol_coefficient) so that
    PL(w; arg) = rational_part + symbol_coefficient * symbol.
    """
    arg = qq(arg)
    arg = arg - (arg.numerator // arg.denominator)  # reduce mod 1 into [0,1)
    if w == 1 and arg == 0:
        raise DivergentSymbolError("PL(1; 0) diverges (Li_1 at 1)")
    two = 2 * arg
    if is_integer(two):  # arg is 0 or 1/2: self-paired under x -> 1-x
        if w % 2 == 0:
            # 2 PL(w; arg) = -B_w(arg)/w! forces a rational value
            return (-bernoulli_value(w, arg) / (2 * _factorial(w)), None, QQ(0))
        sym = PolylogSymbol(w, int(arg.numerator), int(arg.denominator))
        return (QQ(0), sym, QQ(1))
    if two < 1:
        sym = PolylogSymbol(w, int(arg.numerator), int(arg.denominator))
        return (QQ(0), sym, QQ(1))
    # reflect: PL(w; 1-x) = -B_w(x)/w! - (-1)^w PL(w; x) with x = 1 - arg
    x = 1 - arg
    rat = -bernoulli_value(w, x) / _factorial(w)
    sym = PolylogSymbol(w, int(x.numerator), int(x.denominator))
    return (rat, sym, QQ(-1) if w % 2 == 0 else QQ(1))


class ExtScalar:
    """Element of Q + Q-span of canonical polylog symbols.

    Supports exact addition, subtraction and multiplication by rationals
    (products of two genuinely transcendental elements are rejected).
    """

    __slots__ = ("rational", "symbols")

    def __init__(self, rational=0, symbols: Dict[PolylogSymbol, QQ] | None = None):
        self.rational = qq(rational)
        syms = {}
        if symbols:
            for s, c in symbols.items():
                c = qq(c)
                if c != 0:
                    syms[s] = c
        self.symbols = syms

    @staticmethod
    def zero() -> "ExtScalar":
        return ExtScalar(0)

    @staticmethod
    def from_symbol(sym: PolylogSymbol, coeff=1) -> "ExtScalar":
        return ExtScalar(0, {sym: qq(coeff)})

    def is_rational(self) -> bool:
        return not self.symbols

    def is_zero(self) -> bool:
        return self.rational == 0 and not self.symbols

    def __add__(self, other):
        if not isinstance(other, ExtScalar):
            return ExtScalar(self.rational + qq(other), self.symbols)
        syms = dict(self.symbols)
        for s, c in other.symbols.items():
            v = syms.get(s, QQ(0)) + c
            if v == 0:
                syms.pop(s, None)
            else:
                syms[s] = v
        return ExtScalar(self.rational + other.rational, syms)

    __radd__ = __add__

    def __neg__(self):
        return ExtScalar(-self.rational, {s: -c for s, c in self.symbols.items()})

    def __sub__(self, other):
        if not isinstance(other, ExtScalar):
            return ExtScalar(self.rational - qq(other), self.symbols)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ExtScalar):
            if other.is_rational():
                other = other.rational
            elif self.is_rational():
                self, other = other, self.rational
            else:
                raise TypeError("product of two transcendental scalars is not in the ring")
        x = qq(other)
        if x == 0:
            return ExtScalar.zero()
        return ExtScalar(self.rational * x, {s: c * x for s, c in self.symbols.items()})

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (QQ(1) / qq(other))

    def __eq__(self, other):
        if not isinstance(other, ExtScalar):
            return self.is_rational() and self.rational == qq(other)
        return self.rational == other.rational and self.symbols == other.symbols

    def __hash__(self):
        return hash((self.rational, tuple(sorted(self.symbols.items(), key=lambda t: t[0].key()))))

    def __repr__(self):
        if self.is_rational():
            return f"ExtScalar({self.rational})"
        terms = " + ".join(f"({c})*{s}" for s, c in sorted(self.symbols.items(), key=lambda t: t[0].key()))
        return f"ExtScalar({self.rational} + {terms})"

    def sorted_symbols(self):
        return sorted(self.symbols.items(), key=lambda t: t[0].key())

    def to_json(self) -> dict:
        return {
            "rational": qq_str(self.rational),
            "symbols": [
                {"w": s.w, "arg": f"{s.num}/{s.den}", "coeff": qq_str(c)}
                for s, c in self.sorted_symbols()
            ],
        }


def symbol_term(w: int, arg, coeff=1) -> ExtScalar:
    """coeff * PL(w; arg) reduced to canonical form."""
    coeff = qq(coeff)
    if coeff == 0:
        return ExtScalar.zero()
    rat, sym, sc = _reduce_one_symbol(w, arg)
    out = ExtScalar(rat * coeff)
    if sym is not None:
        out = out + ExtScalar.from_symbol(sym, sc * coeff)
    return out


def symbol_reduce(w: int, raw_terms: Dict) -> ExtScalar:
    """Reduce a raw sum of weight-w polylog symbols to canonical form.

    raw_terms maps arguments a/N in [0, 1) to rational coefficients.  Symbols
    with argument above 1/2 are rewritten through the reflection relation
    PL(w; 1-x) = -B_w(x)/w! - (-1)^w PL(w; x); even-weight self-paired
    arguments (0 and 1/2) become rationals; rational byproducts accumulate
    into the rational part.
    """
    out = ExtScalar.zero()
    for arg, coeff in sorted(raw_terms.items(), key=lambda t: qq(t[0])):
        out = out + symbol_term(w, arg, coeff)
    return out
