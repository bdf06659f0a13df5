"""SL2(Z) utilities: matrices, S/T word decomposition by the Euclidean
algorithm, enumeration of SL2(Z/N), and the right action on residue pairs.

Coset tables are immutable after construction; everything is pure.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor, gcd
from typing import List, Tuple


@dataclass(frozen=True)
class Mat2:
    """Integer 2x2 matrix (a b; c d) with determinant 1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant must be 1: {self}")

    def __mul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def entries(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def max_entry(self) -> int:
        return max(abs(x) for x in self.entries())

    def is_congruent_to_identity(self, N: int) -> bool:
        return (
            self.a % N == 1 % N
            and self.d % N == 1 % N
            and self.b % N == 0
            and self.c % N == 0
        )


IDENTITY = Mat2(1, 0, 0, 1)
T = Mat2(1, 1, 0, 1)
S = Mat2(0, -1, 1, 0)
MINUS_IDENTITY = Mat2(-1, 0, 0, -1)


def t_power(n: int) -> Mat2:
    return Mat2(1, n, 0, 1)


# tokens: ("S", 1) or ("T", n) with n a nonzero integer (run-length compressed)
Token = Tuple[str, int]


class STWord:
    """Word in the generators; stored with T-power run compression, expanded
    to single letters S / T / T^-1 on demand (S^-1 is spelled S^3)."""

    __slots__ = ("tokens",)

    def __init__(self, tokens: List[Token]):
        self.tokens = [t for t in tokens if not (t[0] == "T" and t[1] == 0)]

    def letters(self) -> List[str]:
        out = []
        for kind, n in self.tokens:
            if kind == "S":
                out.extend(["S"] * n)
            else:
                out.extend(["T" if n > 0 else "T^-1"] * abs(n))
        return out

    def to_matrix(self) -> Mat2:
        acc = IDENTITY
        for kind, n in self.tokens:
            if kind == "S":
                for _ in range(n):
                    acc = acc * S
            else:
                acc = acc * t_power(n)
        return acc

    def __len__(self):
        return len(self.letters())

    def __repr__(self):
        return f"STWord({self.tokens})"


def decompose_ST(gamma: Mat2) -> STWord:
    """Express gamma as a word in S and T by the continued-fraction algorithm
    on the left column; -Id is spelled S^2.

    Peels gamma = T^q S gamma' with |c'| <= |c|/2 (nearest-integer division),
    so the word length is O(log max-entry).
    """
    tokens: List[Token] = []
    g = gamma
    while g.c != 0:
        q = floor(Fraction(g.a, g.c) + Fraction(1, 2))
        if q:
            tokens.append(("T", q))
        tokens.append(("S", 1))
        # g <- S^-1 T^-q g
        a, b = g.a - q * g.c, g.b - q * g.d
        g = Mat2(g.c, g.d, -a, -b)
    # now g = +-T^n
    if g.a == 1:
        if g.b:
            tokens.append(("T", g.b))
    else:  # g = -T^-n, and -Id = S^2
        tokens.append(("S", 2))
        if g.b:
            tokens.append(("T", -g.b))
    return STWord(tokens)


@dataclass(frozen=True)
class ResiduePair:
    """Row vector (l1, l2) in (Z/N)^2 with the canonical lift in [0, N)^2."""

    N: int
    l1: int
    l2: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("modulus must be >= 1")
        object.__setattr__(self, "l1", self.l1 % self.N)
        object.__setattr__(self, "l2", self.l2 % self.N)

    def act(self, gamma: Mat2) -> "ResiduePair":
        """Right action (l1, l2) gamma = (l1 a + l2 c, l1 b + l2 d) mod N."""
        return ResiduePair(
            self.N,
            self.l1 * gamma.a + self.l2 * gamma.c,
            self.l1 * gamma.b + self.l2 * gamma.d,
        )

    def is_zero(self) -> bool:
        return self.l1 == 0 and self.l2 == 0

    def pair(self) -> Tuple[int, int]:
        return (self.l1, self.l2)

    def __repr__(self):
        return f"({self.l1},{self.l2}) mod {self.N}"


def act_residue(lam: ResiduePair, gamma: Mat2) -> ResiduePair:
    return lam.act(gamma)


def sl2_order(N: int) -> int:
    """|SL2(Z/N)| = N^3 prod_{p | N} (1 - p^-2)."""
    order = N ** 3
    n, p = N, 2
    while p * p <= n:
        if n % p == 0:
            order = order * (p * p - 1) // (p * p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        order = order * (n * n - 1) // (n * n)
    return order


class CosetTable:
    """Enumeration of SL2(Z/N) with right-multiplication tables for T, S and
    their inverses; this indexes the cosets Gamma(N) \\ SL2(Z).

    Elements are listed in lexicographic order of their canonical lifts
    (a, b, c, d) with entries in [0, N), so the ordering is deterministic.
    """

    def __init__(self, N: int):
        self.N = N
        elems = []
        for a in range(N):
            for b in range(N):
                for c in range(N):
                    for d in range(N):
                        if (a * d - b * c) % N == 1 % N:
                            elems.append((a, b, c, d))
        self.elements: Tuple[Tuple[int, int, int, int], ...] = tuple(sorted(elems))
        self.lookup = {e: i for i, e in enumerate(self.elements)}
        self.rmul_T = self._rmul_table(T)
        self.rmul_S = self._rmul_table(S)
        self.rmul_T_inv = self._rmul_table(t_power(-1))
        self.rmul_S_inv = self._rmul_table(S.inverse())

    def _rmul_table(self, g: Mat2) -> Tuple[int, ...]:
        out = []
        for (a, b, c, d) in self.elements:
            prod = (
                (a * g.a + b * g.c) % self.N,
                (a * g.b + b * g.d) % self.N,
                (c * g.a + d * g.c) % self.N,
                (c * g.b + d * g.d) % self.N,
            )
            out.append(self.lookup[prod])
        return tuple(out)

    def __len__(self):
        return len(self.elements)

    def index_of(self, gamma: Mat2) -> int:
        key = (gamma.a % self.N, gamma.b % self.N, gamma.c % self.N, gamma.d % self.N)
        return self.lookup[key]

    def representative(self, i: int) -> Mat2:
        """A determinant-1 integer lift of element i."""
        a, b, c, d = self.elements[i]
        return _lift_to_sl2z(a, b, c, d, self.N)

    def identity_index(self) -> int:
        return self.index_of(IDENTITY)

    def rmul_index(self, i: int, letter: str) -> int:
        table = {
            "T": self.rmul_T,
            "S": self.rmul_S,
            "T^-1": self.rmul_T_inv,
            "S^-1": self.rmul_S_inv,
        }[letter]
        return table[i]

    def rmul_t_power(self, i: int, n: int) -> int:
        table = self.rmul_T if n >= 0 else self.rmul_T_inv
        for _ in range(abs(n) % self.N if self.N > 1 else 0):
            i = table[i]
        return i


def _lift_to_sl2z(a: int, b: int, c: int, d: int, N: int) -> Mat2:
    """Lift an SL2(Z/N) element to SL2(Z) (classical strong-approximation
    argument: fix the bottom row to be coprime, then correct the top row)."""
    if N == 1:
        return IDENTITY
    # choose lift of (c, d) that is coprime
    c0, d0 = c % N, d % N
    if c0 == 0 and d0 == 0:
        raise ValueError("bottom row is zero mod N; not in SL2(Z/N)")
    cc, dd = c0, d0
    if gcd(cc, dd) != 1:
        # adjust dd by multiples of N until gcd(cc, dd) == 1 (works since
        # gcd(cc, dd, N) = 1); for cc = 0 force dd = 1 via d0 +- kN impossible
        # unless d0 invertible, so swap roles through cc += N first
        if cc == 0:
            cc = N
        t = dd
        while gcd(cc, t) != 1:
            t += N
        dd = t
    # find x, y with x dd - y cc = 1
    x, y = _bezout(dd, cc)
    # row (x, y) has det x*dd - y*cc = 1; correct top row mod N
    # target top row (a, b): (x + uN, y + vN) with (x+uN)dd - (y+vN)cc = 1
    # we need x' = a, y' = b mod N; since a*d - b*c = 1 mod N and x dd - y cc = 1,
    # (a - x, b - y) is proportional to (cc, dd) mod N: a - x = k cc, b - y = k dd
    for k in range(N):
        if (x + k * cc) % N == a % N and (y + k * dd) % N == b % N:
            break
    else:
        raise ArithmeticError("lift failed")
    mat = Mat2(x + k * cc, y + k * dd, cc, dd)
    assert mat.a % N == a % N and mat.b % N == b % N and mat.c % N == c % N and mat.d % N == d % N
    return mat


def _bezout(p: int, q: int) -> Tuple[int, int]:
    """x, y with x p - y q = 1 for coprime p, q."""
    old_r, r = p, q
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    if old_r == 1:
        return old_s, -old_t
    if old_r == -1:
        return -old_s, old_t
    raise ValueError("arguments not coprime")


@lru_cache(maxsize=32)
def enumerate_sl2(N: int) -> CosetTable:
    return CosetTable(N)


class IndexSetError(ValueError):
    """Parameter outside the admissible index set for the requested weight."""


def index_set(N: int, k: int) -> List[ResiduePair]:
    """Admissible residue parameters for weight k at level N: everything for
    even k >= 4 or odd k with N >= 3, the nonzero pairs for k = 2, and the
    empty set otherwise."""
    if k == 2:
        return [ResiduePair(N, a, b) for a in range(N) for b in range(N) if (a, b) != (0, 0)]
    if k >= 3 and (k % 2 == 0 or N >= 3):
        return [ResiduePair(N, a, b) for a in range(N) for b in range(N)]
    return []


def in_index_set(lam: ResiduePair, k: int) -> bool:
    if k == 2:
        return not lam.is_zero()
    return k >= 3 and (k % 2 == 0 or lam.N >= 3)
