"""Exact arithmetic primitives: dyadic rationals, valuations, primality,
partial factorization, and modular square roots.

Everything here is deterministic.  The factorization budget is counted in
Pollard-rho iterations rather than wall-clock time so results are
reproducible across machines.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field


class UndefinedValuationError(ArithmeticError):
    """Valuation of zero requested."""


# ---------------------------------------------------------------------------
# Dyadic rationals
# ---------------------------------------------------------------------------


class Dyadic:
    """Rational number num / 2**kexp in canonical form.

    Canonical means kexp == 0 or num is odd; zero is (0, 0).  With this
    normalization the valuation at an odd prime can be read directly off
    the numerator.
    """

    __slots__ = ("num", "kexp")

    def __init__(self, num: int, kexp: int = 0):
        if num == 0:
            kexp = 0
        elif kexp < 0:
            num <<= -kexp
            kexp = 0
        else:
            while kexp > 0 and num % 2 == 0:
                num //= 2
                kexp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "kexp", kexp)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    # -- conversions --------------------------------------------------------

    @staticmethod
    def of(x) -> "Dyadic":
        if isinstance(x, Dyadic):
            return x
        if isinstance(x, int):
            return Dyadic(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Dyadic")

    @property
    def denominator(self) -> int:
        return 1 << self.kexp

    def is_integer(self) -> bool:
        return self.kexp == 0

    def as_int(self) -> int:
        if self.kexp != 0:
            raise ValueError(f"{self} is not an integer")
        return self.num

    def __float__(self) -> float:
        return self.num / (1 << self.kexp)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = Dyadic.of(other)
        k = max(self.kexp, o.kexp)
        return Dyadic((self.num << (k - self.kexp)) + (o.num << (k - o.kexp)), k)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.num, self.kexp)

    def __sub__(self, other):
        return self + (-Dyadic.of(other))

    def __rsub__(self, other):
        return Dyadic.of(other) + (-self)

    def __mul__(self, other):
        o = Dyadic.of(other)
        return Dyadic(self.num * o.num, self.kexp + o.kexp)

    __rmul__ = __mul__

    def __abs__(self):
        return Dyadic(abs(self.num), self.kexp)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not dyadic in general")
        return Dyadic(self.num**e, self.kexp * e)

    def half(self) -> "Dyadic":
        """Exact division by 2."""
        return Dyadic(self.num, self.kexp + 1)

    # -- comparisons ---------------------------------------------------------

    def _cmp_key(self, other):
        o = Dyadic.of(other)
        return self.num << o.kexp, o.num << self.kexp

    def __eq__(self, other):
        if not isinstance(other, (Dyadic, int)):
            return NotImplemented
        a, b = self._cmp_key(other)
        return a == b

    def __lt__(self, other):
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other):
        a, b = self._cmp_key(other)
        return a <= b

    def __gt__(self, other):
        a, b = self._cmp_key(other)
        return a > b

    def __ge__(self, other):
        a, b = self._cmp_key(other)
        return a >= b

    def __hash__(self):
        return hash((self.num, self.kexp))

    def __bool__(self):
        return self.num != 0

    def __str__(self):
        if self.kexp == 0:
            return str(self.num)
        return f"{self.num}/{1 << self.kexp}"

    def __repr__(self):
        return f"Dyadic({self.num}, {self.kexp})"


# ---------------------------------------------------------------------------
# Valuations and squares
# ---------------------------------------------------------------------------


def valuation(x: int, p: int) -> int:
    """Largest e with p**e dividing x.  Raises on x == 0."""
    if x == 0:
        raise UndefinedValuationError("valuation of 0 is undefined")
    if p < 2:
        raise ValueError("p must be at least 2")
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e


def dyadic_valuation(q: Dyadic, p: int) -> int:
    """p-adic valuation of a nonzero dyadic; negative only possible at p == 2."""
    if q.num == 0:
        raise UndefinedValuationError("valuation of 0 is undefined")
    v = valuation(q.num, p)
    if p == 2:
        v -= q.kexp
    return v


def is_square(q) -> bool:
    """Whether q (int or Dyadic) is the square of a rational."""
    q = Dyadic.of(q)
    if q.num < 0:
        return False
    if q.num == 0:
        return True
    if q.kexp % 2 != 0:
        return False
    r = math.isqrt(q.num)
    return r * r == q.num


def dyadic_sqrt(q: Dyadic) -> Dyadic:
    """Exact square root of a dyadic square (caller must check is_square)."""
    if not is_square(q):
        raise ValueError(f"{q} is not a square")
    return Dyadic(math.isqrt(q.num), q.kexp // 2)


# ---------------------------------------------------------------------------
# Primality
# ---------------------------------------------------------------------------

# The first 12 primes witness-prove primality below 3317044064679887385961981,
# which covers every 64-bit integer.
MR_BASE_SET = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_PROVEN_LIMIT = 3317044064679887385961981
MR_EXTRA_ROUNDS = 64
_MR_WITNESS_SEED = 0x5EED_CA7A1A5


def _mr_witness(n: int, d: int, s: int, a: int) -> bool:
    """True when a witnesses compositeness of n (n - 1 = d * 2**s, d odd)."""
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime(n: int) -> bool:
    """Miller-Rabin: deterministic below 2**64, seeded 64 extra rounds above."""
    if n < 2:
        return False
    for p in MR_BASE_SET:
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in MR_BASE_SET:
        if _mr_witness(n, d, s, a):
            return False
    if n < _MR_PROVEN_LIMIT:
        return True
    rng = random.Random(_MR_WITNESS_SEED ^ n)
    for _ in range(MR_EXTRA_ROUNDS):
        a = rng.randrange(2, n - 1)
        if _mr_witness(n, d, s, a):
            return False
    return True


# ---------------------------------------------------------------------------
# Partial factorization
# ---------------------------------------------------------------------------

_TRIAL_LIMIT = 1 << 16
_small_prime_cache: list[int] = []

DEFAULT_EFFORT = 200_000  # Pollard-rho iterations


def small_primes() -> list[int]:
    """Primes below 2**16, sieved once and cached."""
    if not _small_prime_cache:
        sieve = bytearray([1]) * _TRIAL_LIMIT
        sieve[0] = sieve[1] = 0
        for i in range(2, math.isqrt(_TRIAL_LIMIT) + 1):
            if sieve[i]:
                sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
        _small_prime_cache.extend(i for i in range(_TRIAL_LIMIT) if sieve[i])
    return _small_prime_cache


@dataclass(frozen=True)
class FactoredValue:
    """sign * cofactor * prod(p**e) == the original integer, always.

    cofactor_status: 'unit' (cofactor 1), 'prime' (probable prime too large
    to certify), 'composite' (known composite, budget ran out), 'unknown'
    (never tested, zero budget).
    """

    sign: int
    factors: dict[int, int] = field(default_factory=dict)
    cofactor: int = 1
    cofactor_status: str = "unit"

    def value(self) -> int:
        v = self.sign * self.cofactor
        for p, e in self.factors.items():
            v *= p**e
        return v

    def is_complete(self) -> bool:
        return self.cofactor_status == "unit"

    def __str__(self):
        parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in sorted(self.factors.items())]
        if self.cofactor != 1:
            parts.append(f"[{self.cofactor}:{self.cofactor_status}]")
        body = "*".join(parts) if parts else "1"
        return ("-" if self.sign < 0 else "") + body


def _rho_brent(n: int, budget: int, c: int) -> tuple[int | None, int]:
    """One Brent-rho attempt on x^2 + c mod n; returns (factor, spent)."""
    y, m, g, r, q = 2, 128, 1, 1, 1
    spent = 0
    x = ys = y
    while g == 1 and spent < budget:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            spent += min(m, r - k)
            g = math.gcd(q, n)
            k += m
            if spent >= budget:
                break
        r *= 2
    if g == n:  # backtrack
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            spent += 1
            if spent > budget + 2 * m:
                return None, spent
    if 1 < g < n:
        return g, spent
    return None, spent


def factor(n: int, effort: int = DEFAULT_EFFORT) -> FactoredValue:
    """Best-effort factorization: trial division then Pollard rho.

    With effort exhausted the leftover lands in the cofactor; exponents of
    the identified primes are exact regardless.  Probable primes at or above
    2**64 are never promoted into the factor map.
    """
    if n == 0:
        raise ValueError("cannot factor 0")
    sign = 1 if n > 0 else -1
    m = abs(n)
    factors: dict[int, int] = {}
    for p in small_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors[p] = e
    if m == 1:
        return FactoredValue(sign, factors, 1, "unit")
    if effort <= 0:
        return FactoredValue(sign, factors, m, "unknown")

    budget = effort
    big_pp: list[int] = []  # probable primes >= 2**64, kept out of `factors`
    stuck: list[int] = []
    stack = [m]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            if m < 1 << 64:
                factors[m] = factors.get(m, 0) + 1
            else:
                big_pp.append(m)
            continue
        if m < _TRIAL_LIMIT * _TRIAL_LIMIT:
            # composite below trial range squared must have split already
            stuck.append(m)
            continue
        found = None
        c = 1
        while budget > 0 and found is None and c <= 20:
            found, spent = _rho_brent(m, budget, c)
            budget -= max(spent, 1)
            c += 1
        if found is None:
            stuck.append(m)
        else:
            stack.append(found)
            stack.append(m // found)

    cofactor = 1
    for v in big_pp:
        cofactor *= v
    for v in stuck:
        cofactor *= v
    if cofactor == 1:
        status = "unit"
    elif len(big_pp) == 1 and not stuck:
        status = "prime"
    else:
        status = "composite"
    return FactoredValue(sign, factors, cofactor, status)


# ---------------------------------------------------------------------------
# Modular square roots
# ---------------------------------------------------------------------------


def sqrt_mod(a: int, p: int) -> int | None:
    """Smaller square root of a mod p, or None for a non-residue.

    Tonelli-Shanks when p % 4 == 1, a single exponentiation when p % 4 == 3.
    """
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    # Tonelli-Shanks
    q = p - 1
    s = 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2 = t
        i = 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t = t * c % p
        r = r * b % p
    return min(r, p - r)
