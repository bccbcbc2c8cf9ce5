"""Integer polynomials and quadratic-map dynamics.

Covers exact polynomial arithmetic, composition, the resultant in the
root-product convention (product of h2 over the roots of monic h1),
critical orbits, the discriminant chain recursion, post-critical
finiteness, and conjugation by integer shifts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .exactnum import Dyadic


class IntPoly:
    """Dense integer polynomial; coeffs ascending, no trailing zeros."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        if not all(isinstance(c, int) for c in cs):
            raise TypeError("IntPoly coefficients must be integers")
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("IntPoly is immutable")

    @staticmethod
    def x() -> "IntPoly":
        return IntPoly((0, 1))

    @staticmethod
    def const(c: int) -> "IntPoly":
        return IntPoly((c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # zero polynomial has degree -1

    @property
    def lead(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        o = _as_poly(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return IntPoly(
            [
                (self.coeffs[i] if i < len(self.coeffs) else 0)
                + (o.coeffs[i] if i < len(o.coeffs) else 0)
                for i in range(n)
            ]
        )

    __radd__ = __add__

    def __neg__(self):
        return IntPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) + (-self)

    def __mul__(self, other):
        o = _as_poly(other)
        if self.is_zero() or o.is_zero():
            return IntPoly(())
        out = [0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        out = IntPoly((1,))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def derivative(self) -> "IntPoly":
        return IntPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def evaluate(self, x):
        """Horner evaluation; works over int, Dyadic, or Fraction."""
        acc = x - x  # zero of the right type
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __call__(self, x):
        return self.evaluate(x)

    def divmod_exact(self, d: "IntPoly"):
        """Polynomial division by a monic divisor, staying in Z[x]."""
        if not d.is_monic():
            raise ValueError("divisor must be monic")
        rem = list(self.coeffs)
        dd = d.degree
        q = [0] * max(len(rem) - dd, 0)
        for i in range(len(rem) - dd - 1, -1, -1):
            t = rem[i + dd]
            if t:
                q[i] = t
                for j, c in enumerate(d.coeffs):
                    rem[i + j] -= t * c
        return IntPoly(q), IntPoly(rem[:dd])

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly((other,))
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        from .parsing import poly_to_string

        return poly_to_string(self)


def _as_poly(x) -> IntPoly:
    if isinstance(x, IntPoly):
        return x
    if isinstance(x, int):
        return IntPoly((x,))
    raise TypeError(f"cannot coerce {type(x).__name__} to IntPoly")


def compose(g: IntPoly, f: IntPoly) -> IntPoly:
    """Coefficients of g(f(x)), via Horner in the polynomial ring."""
    acc = IntPoly(())
    for c in reversed(g.coeffs):
        acc = acc * f + c
    return acc


def iterate_poly(f: IntPoly, n: int) -> IntPoly:
    """n-th compositional iterate; n == 0 gives x."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = IntPoly.x()
    for _ in range(n):
        out = compose(out, f)
    return out


def poly_gcd(a: IntPoly, b: IntPoly) -> IntPoly:
    """Monic gcd over Q, scaled to a primitive integer polynomial."""
    fa = [Fraction(c) for c in a.coeffs]
    fb = [Fraction(c) for c in b.coeffs]

    def deg(v):
        return len(v) - 1

    def rem(u, v):
        u = u[:]
        dv = deg(v)
        inv = 1 / v[-1]
        for i in range(len(u) - dv - 1, -1, -1):
            t = u[i + dv] * inv
            if t:
                for j, c in enumerate(v):
                    u[i + j] -= t * c
        while u and u[-1] == 0:
            u.pop()
        return u

    while fb:
        fa, fb = fb, rem(fa, fb)
    if not fa:
        return IntPoly(())
    # clear denominators, make primitive with positive lead
    from math import gcd, lcm

    den = lcm(*(c.denominator for c in fa)) if len(fa) > 1 else fa[0].denominator
    ints = [int(c * den) for c in fa]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return IntPoly(ints)


def is_squarefree(h: IntPoly) -> bool:
    return poly_gcd(h, h.derivative()).degree == 0


# ---------------------------------------------------------------------------
# Resultants (root-product convention)
# ---------------------------------------------------------------------------


def _det_bareiss(mat: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    m = [row[:] for row in mat]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def sylvester_resultant(h1: IntPoly, h2: IntPoly) -> int:
    """Classical resultant det Syl(h1, h2)."""
    n, m = h1.degree, h2.degree
    if n < 0 or m < 0:
        return 0
    if n == 0:
        return h1.coeffs[0] ** m
    if m == 0:
        return h2.coeffs[0] ** n
    size = n + m
    a = list(reversed(h1.coeffs))
    b = list(reversed(h2.coeffs))
    rows = []
    for i in range(m):
        rows.append([0] * i + a + [0] * (size - n - 1 - i))
    for i in range(n):
        rows.append([0] * i + b + [0] * (size - m - 1 - i))
    return _det_bareiss(rows)


def resultant(h1: IntPoly, h2: IntPoly) -> int:
    """Product of h2 over the roots of h1 (counted with multiplicity).

    Computed as det Syl(h1, h2) / lead(h1)**deg(h2), which agrees with the
    textbook resultant exactly when h1 is monic.
    """
    if h1.degree < 1:
        raise ValueError("h1 must be nonconstant")
    if h2.is_zero():
        return 0
    det = sylvester_resultant(h1, h2)
    scale = h1.lead ** h2.degree
    q, r = divmod(det, scale)
    if r != 0:
        raise ValueError("root-product resultant is not integral for this h1")
    return q


# ---------------------------------------------------------------------------
# Quadratic maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadMap:
    """Monic quadratic x^2 + b*x + c with critical point gamma = -b/2.

    Normal form f = (x - gamma)^2 + gamma + m, so m = c - b^2/4 + b/2.
    """

    b: int
    c: int

    @cached_property
    def gamma(self) -> Dyadic:
        return Dyadic(-self.b, 1)

    @cached_property
    def m(self) -> Dyadic:
        return Dyadic(4 * self.c - self.b * self.b + 2 * self.b, 2)

    @property
    def poly(self) -> IntPoly:
        return IntPoly((self.c, self.b, 1))

    @staticmethod
    def from_poly(f: IntPoly) -> "QuadMap":
        if f.degree != 2 or not f.is_monic():
            raise ValueError("expected a monic quadratic")
        return QuadMap(b=f.coeffs[1], c=f.coeffs[0])

    def __call__(self, x):
        return x * x + self.b * x + self.c

    def critical_value(self, n: int):
        """f^n(gamma) as an exact Dyadic, n >= 0."""
        v = self.gamma
        for _ in range(n):
            v = self(v)
        return v

    def __str__(self):
        return str(self.poly)


def critical_orbit(f: QuadMap, g: IntPoly, N: int) -> list[Dyadic]:
    """Translated critical orbit g(f^n(gamma)) for n = 1..N, exact."""
    if N < 1:
        raise ValueError("N must be at least 1")
    out = []
    v = f.gamma
    for _ in range(N):
        v = f(v)
        out.append(g.evaluate(v))
    return out


# ---------------------------------------------------------------------------
# Discriminant chain
# ---------------------------------------------------------------------------


@dataclass
class DiscChain:
    """Values Delta_n = Disc(g o f^n) in the root-product convention.

    entries[i] = (n, Delta_n) for n = 0..; the chain truncates with
    `inseparable_at` set if some translated critical-orbit value vanishes.
    """

    entries: list[tuple[int, int]]
    inseparable_at: int | None = None


def disc_chain(f: QuadMap, g: IntPoly, N: int) -> DiscChain:
    """Discriminant recursion Delta_n = Delta_{n-1}^2 * (-2)^(2^n deg g) * g(f^n(gamma)).

    The dyadic orbit value combines with the power of -2 into an exact
    integer.  Requires g separable; a vanishing orbit value flags the
    iterate inseparable and truncates the chain.
    """
    if g.degree < 1:
        raise ValueError("g must be nonconstant")
    if not is_squarefree(g):
        return DiscChain(entries=[], inseparable_at=0)
    delta = resultant(g, g.derivative()) if g.degree >= 1 else 1
    entries = [(0, delta)]
    v = f.gamma
    for n in range(1, N + 1):
        v = f(v)
        t = g.evaluate(v)
        if t.num == 0:
            return DiscChain(entries=entries, inseparable_at=n)
        e = (1 << n) * g.degree
        scaled = Dyadic((-2) ** e) * t
        entries.append((n, delta * delta * scaled.as_int()))
        delta = entries[-1][1]
    return DiscChain(entries=entries)


# ---------------------------------------------------------------------------
# Critical finiteness and conjugation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalOrbitStatus:
    finite: bool
    reason: str  # 'cycle', 'escape', or 'half-integer'
    orbit: tuple = ()
    detail: str = ""


def escape_bound(f: QuadMap) -> int:
    """B with |f(x)| > |x| whenever |x| >= B (monic quadratic)."""
    return abs(f.b) + abs(f.c) + 2


def is_critically_finite(f: QuadMap) -> CriticalOrbitStatus:
    """Decide finiteness of the critical orbit, with a witness.

    Half-integer gamma forces an infinite orbit: the denominator 2^(2^n)
    strictly grows while the numerator stays odd.  Integer gamma is decided
    by iterating until a repeat or the escape bound.
    """
    if f.gamma.kexp != 0:
        return CriticalOrbitStatus(
            False, "half-integer", detail="denominator 2^(2^n) grows without bound"
        )
    B = escape_bound(f)
    seen: dict[int, int] = {}
    x = f.gamma.num
    orbit = [x]
    while True:
        seen[x] = len(orbit) - 1
        x = f(x)
        if x in seen:
            orbit.append(x)
            return CriticalOrbitStatus(
                True, "cycle", tuple(orbit), detail=f"repeat of index {seen[x]}"
            )
        orbit.append(x)
        if abs(x) >= B:
            return CriticalOrbitStatus(
                False, "escape", tuple(orbit), detail=f"|f^{len(orbit) - 1}(gamma)| >= {B}"
            )


def conjugate_by_shift(f: QuadMap, t: int) -> QuadMap:
    """The map x -> f(x + t) - t, so conj^n(x) = f^n(x + t) - t."""
    return QuadMap(b=2 * t + f.b, c=t * t + f.b * t + f.c - t)
