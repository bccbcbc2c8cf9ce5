"""Irreducibility and stability engines.

The square-criterion chain (irreducible upward from an irreducible level
when the translated critical-orbit value is not a rational square), exact
inequality checks backing the stability theorem, mod-p irreducibility
certificates, exhaustive Kronecker factor search for small degrees, the
eventual-stability scanner, and the four-family classifier.

Irreducibility over Q is certified, never assumed: the square criterion is
only sufficient, so "unknown" is a first-class verdict that gets resolved
by a mod-p certificate (sufficient the other way) or by Kronecker search
(complete, but degree-limited).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exactnum import Dyadic, dyadic_sqrt, is_square
from .polys import IntPoly, QuadMap, compose, iterate_poly, poly_gcd

IRREDUCIBLE = "irreducible-certified"
REDUCIBLE = "reducible-with-factors"
UNKNOWN = "unknown"

STABLE = "stable-certified-to-depth"
EVENTUALLY_STABLE = "eventually-stable-witness"
NOT_EVENTUALLY_STABLE = "not-eventually-stable"
INCONCLUSIVE = "inconclusive"

KRONECKER_DEGREE_CAP = 8
MODP_CERT_PRIMES = tuple(p for p in range(2, 100) if all(p % q for q in range(2, p)))
MODP_DEGREE_CAP = 64

_SAMPLE_POINTS = (0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6, -6, 7, -7, 8, -8, 9, -9, 10, -10, 11, -11)


class UnsupportedSizeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Mod-p irreducibility certificate
# ---------------------------------------------------------------------------


def _gfp(coeffs, p):
    out = [c % p for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return out


def _gfp_rem(a, b, p):
    a = a[:]
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    for i in range(len(a) - db - 1, -1, -1):
        t = a[i + db] * inv % p
        if t:
            for j, c in enumerate(b):
                a[i + j] = (a[i + j] - t * c) % p
    return _gfp(a[:db], p)


def _gfp_gcd(a, b, p):
    a, b = _gfp(a, p), _gfp(b, p)
    while b:
        a, b = b, _gfp_rem(a, b, p)
    return a


def _gfp_mulmod(a, b, mod, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return _gfp_rem(out, mod, p)


def _gfp_powmod(base, e, mod, p):
    out = [1]
    base = _gfp_rem(base, mod, p)
    while e:
        if e & 1:
            out = _gfp_mulmod(out, base, mod, p)
        base = _gfp_mulmod(base, base, mod, p)
        e >>= 1
    return out


def irreducible_mod_p(h: IntPoly, p: int) -> str:
    """Rabin test for h mod p: 'irreducible', 'reducible', or 'degenerate'.

    Degenerate when p divides the leading coefficient or h mod p is
    inseparable.  An 'irreducible' answer certifies irreducibility of
    monic h over Q.
    """
    if h.degree < 1:
        raise ValueError("h must be nonconstant")
    if h.lead % p == 0:
        return "degenerate"
    hb = _gfp(h.coeffs, p)
    inv = pow(hb[-1], -1, p)
    hb = [c * inv % p for c in hb]
    d = len(hb) - 1
    deriv = _gfp([i * c for i, c in enumerate(hb)][1:], p)
    if len(_gfp_gcd(hb, deriv, p)) != 1:
        return "degenerate"
    if d == 1:
        return "irreducible"
    # x^(p^k) mod h for k = 1..d by iterated powering
    frob = [None] * (d + 1)
    t = _gfp_powmod([0, 1], p, hb, p)
    frob[1] = t
    for k in range(2, d + 1):
        t = _gfp_powmod(t, p, hb, p)
        frob[k] = t

    def minus_x(poly):
        out = list(poly) + [0] * max(0, 2 - len(poly))
        out[1] = (out[1] - 1) % p
        return _gfp(out, p)

    if minus_x(frob[d]):
        return "reducible"
    dd = d
    qs = set()
    q = 2
    while q * q <= dd:
        if dd % q == 0:
            qs.add(q)
            while dd % q == 0:
                dd //= q
        q += 1
    if dd > 1:
        qs.add(dd)
    for q in sorted(qs):
        if len(_gfp_gcd(minus_x(frob[d // q]), hb, p)) != 1:
            return "reducible"
    return "irreducible"


# ---------------------------------------------------------------------------
# Kronecker factor search
# ---------------------------------------------------------------------------


def _divisors_signed(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    out.sort()
    return [s * d for d in out for s in (1, -1)]


def _interpolate(points: list[tuple[int, int]]) -> list[Fraction] | None:
    """Lagrange interpolation; None unless all coefficients are integers."""
    k = len(points)
    coeffs = [Fraction(0)] * k
    for i, (xi, yi) in enumerate(points):
        basis = [Fraction(1)]
        denom = 1
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            new = [Fraction(0)] * (len(basis) + 1)
            for t, c in enumerate(basis):
                new[t] -= c * xj
                new[t + 1] += c
            basis = new
            denom *= xi - xj
        scale = Fraction(yi, denom)
        for t, c in enumerate(basis):
            coeffs[t] += c * scale
    if any(c.denominator != 1 for c in coeffs):
        return None
    return [int(c) for c in coeffs]


def _kronecker_search_degree(h: IntPoly, s: int, points: list[tuple[int, int]]):
    """Exhaustive search for a monic degree-s factor of h.

    A monic factor u of degree s satisfies, at every sample point x_i,
    u(x_i) | h(x_i), the congruences u(x_i) = u(x_j) mod (x_i - x_j), the
    Mignotte coefficient bound, and the divided-difference identity
    u[x_0..x_s] = 1.  The identity pins the value at the last point, so
    only s points are enumerated; the prunes never discard a true factor,
    keeping None a proof of no-factor-of-degree-s.
    """
    import math

    if len(points) < s + 1:
        return None
    # Mignotte-style bound on |u(x)| for a monic degree-s factor of h
    l2 = math.isqrt(sum(c * c for c in h.coeffs)) + 1
    coeff_bound = (1 << s) * l2

    def value_bound(x: int) -> int:
        return coeff_bound * (s + 1) * max(1, abs(x)) ** s

    ranked = sorted(points, key=lambda t: (len(t[2]), t[3]))
    enum_pts = ranked[:s]
    check_pt = ranked[s]
    xs = [pt[0] for pt in enum_pts] + [check_pt[0]]
    # weights of the order-s divided difference: sum_k u(x_k)/w_k = lead(u)
    ws = []
    for k in range(s + 1):
        w = 1
        for j in range(s + 1):
            if j != k:
                w *= xs[k] - xs[j]
        ws.append(w)
    lcm_w = 1
    for w in ws:
        lcm_w = lcm_w * abs(w) // math.gcd(lcm_w, abs(w))
    mults = [lcm_w // w for w in ws]

    chosen: list[int] = []

    def dfs(k: int):
        if k == s:
            # determine the value at the check point from monicity
            num = lcm_w - sum(d * m for d, m in zip(chosen, mults[:s]))
            if mults[s] == 0 or num % mults[s] != 0:
                return None
            d_last = num // mults[s]
            if d_last == 0 or check_pt[1] % d_last != 0:
                return None
            if abs(d_last) > value_bound(check_pt[0]):
                return None
            coeffs = _interpolate(list(zip(xs, chosen + [d_last])))
            if coeffs is None:
                return None
            cand = IntPoly(coeffs)
            if cand.degree != s or cand.coeffs[-1] != 1:
                return None
            q, r = h.divmod_exact(cand)
            if r.is_zero():
                return cand, q
            return None
        vb = value_bound(xs[k])
        for d in enum_pts[k][2]:
            if abs(d) > vb:
                break
            ok = True
            for j in range(k):
                gap = xs[k] - xs[j]
                if (d - chosen[j]) % gap != 0:
                    ok = False
                    break
            if not ok:
                continue
            chosen.append(d)
            hit = dfs(k + 1)
            chosen.pop()
            if hit is not None:
                return hit
        return None

    return dfs(0)


def kronecker_factor(
    h: IntPoly, max_factor_degree: int = 4
) -> tuple[IntPoly, IntPoly] | None:
    """Monic factor of degree <= max_factor_degree with its cofactor, or None.

    Kronecker interpolation over the fixed sample points 0, +-1, +-2, ...:
    divisor tuples of the values h(x_i) are enumerated (with congruence and
    coefficient-bound prunes that cannot lose a factor), interpolated, and
    tested by exact division.  The search is exhaustive, so None proves
    there is no factor within the degree bound.  Degree of h is capped at 8.
    """
    if not h.is_monic():
        raise ValueError("h must be monic")
    if h.degree > KRONECKER_DEGREE_CAP:
        raise UnsupportedSizeError(f"degree {h.degree} exceeds cap {KRONECKER_DEGREE_CAP}")
    if h.degree < 2:
        return None
    if max_factor_degree < 1:
        raise ValueError("max_factor_degree must be at least 1")

    w = poly_gcd(h, h.derivative())
    if w.degree >= 1:
        # repeated factor: w divides h properly
        if w.degree <= max_factor_degree:
            q, r = h.divmod_exact(w)
            assert r.is_zero()
            return w, q
        sub = kronecker_factor(w, max_factor_degree)
        if sub is not None:
            fac = sub[0]
            q, r = h.divmod_exact(fac)
            assert r.is_zero()
            return fac, q
        return None

    points = []
    for order, x in enumerate(_SAMPLE_POINTS):
        v = h.evaluate(x)
        if v != 0:
            points.append((x, v, _divisors_signed(v), order))
    bound = min(max_factor_degree, h.degree - 1)
    for s in range(1, bound + 1):
        hit = _kronecker_search_degree(h, s, points)
        if hit is not None:
            return hit
    return None


def factor_into_irreducibles(h: IntPoly) -> list[IntPoly]:
    """Complete factorization into monic irreducibles (degree <= 8)."""
    if h.degree > KRONECKER_DEGREE_CAP:
        raise UnsupportedSizeError(f"degree {h.degree} exceeds cap {KRONECKER_DEGREE_CAP}")
    out = []
    stack = [h]
    while stack:
        cur = stack.pop()
        if cur.degree <= 1:
            if cur.degree == 1:
                out.append(cur)
            continue
        split = kronecker_factor(cur, max_factor_degree=cur.degree // 2)
        if split is None:
            out.append(cur)
        else:
            stack.extend(split)
    out.sort(key=lambda q: (q.degree, q.coeffs))
    return out


# ---------------------------------------------------------------------------
# Square-criterion chain
# ---------------------------------------------------------------------------


@dataclass
class LevelStatus:
    n: int
    verdict: str
    evidence: dict = field(default_factory=dict)
    factors: tuple[IntPoly, ...] = ()


@dataclass
class StabilityReport:
    f: str
    g: str
    depth: int
    levels: list[LevelStatus]
    overall: str
    certified_depth: int

    def level(self, n: int) -> LevelStatus:
        for st in self.levels:
            if st.n == n:
                return st
        raise KeyError(n)


def sqcrit_step(f: QuadMap, g: IntPoly, n: int, prev_irreducible: bool):
    """One step of the square criterion (n >= 2).

    Returns (verdict, value): irreducible-certified when the previous level
    is irreducible and g(f^n(gamma)) is not a rational square; unknown
    otherwise (the criterion is one-directional).
    """
    if n < 2:
        raise ValueError("square criterion requires n >= 2")
    value = g.evaluate(f.critical_value(n))
    if not prev_irreducible:
        return UNKNOWN, value
    if is_square(value):
        return UNKNOWN, value
    return IRREDUCIBLE, value


def _quadratic_verdict(h: IntPoly) -> tuple[str, dict, tuple]:
    disc = h.coeffs[1] ** 2 - 4 * h.coeffs[0]
    if is_square(Dyadic(disc)):
        r = dyadic_sqrt(Dyadic(disc)).num
        if (h.coeffs[1] + r) % 2 == 0:
            a = (-h.coeffs[1] + r) // 2
            b = (-h.coeffs[1] - r) // 2
            return REDUCIBLE, {"square-disc": disc}, (IntPoly((-a, 1)), IntPoly((-b, 1)))
    else:
        return IRREDUCIBLE, {"nonsquare-disc": disc}, ()
    # disc a square but odd parity cannot happen for integer monic quadratics
    return REDUCIBLE, {"square-disc": disc}, ()


def _certify_general(h: IntPoly) -> tuple[str, dict, tuple]:
    """Absolute verdict for monic h: Kronecker when small, else mod-p only."""
    if h.degree == 1:
        return IRREDUCIBLE, {"linear": True}, ()
    if h.degree == 2:
        return _quadratic_verdict(h)
    if h.degree <= KRONECKER_DEGREE_CAP:
        split = kronecker_factor(h, max_factor_degree=h.degree // 2)
        if split is None:
            return IRREDUCIBLE, {"kronecker-exhaustive": True}, ()
        return REDUCIBLE, {"kronecker": True}, split
    if h.degree <= MODP_DEGREE_CAP:
        for p in MODP_CERT_PRIMES:
            if irreducible_mod_p(h, p) == "irreducible":
                return IRREDUCIBLE, {"mod-p": p}, ()
    return UNKNOWN, {}, ()


def f2irr_condition(f: QuadMap) -> tuple[bool, dict]:
    """The second-iterate condition: (-m +- sqrt(f^2(gamma)))/2 not in Q*^2.

    Only meaningful when sqrt(f^2(gamma)) is rational; holds vacuously
    otherwise.  Given f irreducible this is equivalent to f^2 irreducible.
    """
    v2 = f.critical_value(2)
    if not is_square(v2):
        return True, {"f2-critical-value-nonsquare": str(v2)}
    s = dyadic_sqrt(v2)
    branches = [((-f.m) + s).half(), ((-f.m) - s).half()]
    for br in branches:
        if br.num > 0 and is_square(br):
            return False, {"branch-in-Qstar2": str(br)}
    return True, {"branches": [str(b) for b in branches]}


def base_irreducibility(f: QuadMap, g: IntPoly) -> dict[int, LevelStatus]:
    """Verdicts for the base of the chain.

    g = x: level 1 from the discriminant square test, level 2 from the
    second-iterate condition (and Kronecker for the factor pair when it
    fails).  General g: absolute verdicts for g (level 0) and g o f
    (level 1) via quadratic/Kronecker/mod-p certificates.
    """
    out: dict[int, LevelStatus] = {}
    if g == IntPoly.x():
        out[0] = LevelStatus(0, IRREDUCIBLE, {"linear": True})
        v1, e1, fac1 = _quadratic_verdict(f.poly)
        out[1] = LevelStatus(1, v1, e1, fac1)
        if v1 != IRREDUCIBLE:
            out[2] = LevelStatus(2, REDUCIBLE, {"level-1-reducible": True},
                                 tuple(compose(u, f.poly) for u in fac1))
            return out
        ok, ev = f2irr_condition(f)
        if ok:
            out[2] = LevelStatus(2, IRREDUCIBLE, ev)
        else:
            f2 = compose(f.poly, f.poly)
            split = kronecker_factor(f2, max_factor_degree=2)
            out[2] = LevelStatus(2, REDUCIBLE, ev, split if split else ())
        return out
    v0, e0, fac0 = _certify_general(g)
    out[0] = LevelStatus(0, v0, e0, fac0)
    gf = compose(g, f.poly)
    if v0 == REDUCIBLE:
        out[1] = LevelStatus(1, REDUCIBLE, {"level-0-reducible": True},
                             tuple(compose(u, f.poly) for u in fac0))
    else:
        v1, e1, fac1 = _certify_general(gf)
        out[1] = LevelStatus(1, v1, e1, fac1)
    return out


def stability_scan(f: QuadMap, g: IntPoly | None, N: int) -> StabilityReport:
    """Per-level irreducibility of g o f^n for n up to N.

    Chains the base verdicts with the square criterion; a square
    obstruction falls back to Kronecker (degree permitting) and mod-p
    certificates.  Once a level is reducible all later levels inherit the
    composed factor pair.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if g is None:
        g = IntPoly.x()
    base = base_irreducibility(f, g)
    levels = [base[k] for k in sorted(base)]
    start = max(base) + 1
    for n in range(start, N + 1):
        prev = levels[-1]
        if prev.verdict == REDUCIBLE:
            levels.append(
                LevelStatus(
                    n,
                    REDUCIBLE,
                    {"inherited-from": prev.n},
                    tuple(compose(u, f.poly) for u in prev.factors),
                )
            )
            continue
        verdict, value = sqcrit_step(f, g, n, prev.verdict == IRREDUCIBLE)
        if verdict == IRREDUCIBLE:
            levels.append(LevelStatus(n, IRREDUCIBLE, {"nonsquare-value": str(value)}))
            continue
        h = compose(g, iterate_poly(f.poly, n))
        v, ev, fac = _certify_general(h)
        ev = {"square-value": str(value), **ev} if is_square(value) else ev
        levels.append(LevelStatus(n, v, ev, fac))

    wanted = [st for st in levels if 1 <= st.n <= N]
    if all(st.verdict == IRREDUCIBLE for st in levels):
        overall = STABLE
        certified = N
    elif any(st.verdict == REDUCIBLE for st in levels):
        overall = REDUCIBLE
        certified = 0
        for st in wanted:
            if st.verdict != IRREDUCIBLE:
                break
            certified = st.n
    else:
        overall = INCONCLUSIVE
        certified = 0
        for st in wanted:
            if st.verdict != IRREDUCIBLE:
                break
            certified = st.n
    return StabilityReport(
        f=str(f.poly), g=str(g), depth=N, levels=levels, overall=overall, certified_depth=certified
    )


# ---------------------------------------------------------------------------
# Exact inequality checks for the stability theorem
# ---------------------------------------------------------------------------


def _is_square_poly(f: QuadMap) -> bool:
    return f.gamma.kexp == 0 and (f.gamma + f.m) == Dyadic(0)


def long_bound_check(f: QuadMap) -> bool:
    """|m| > 6 + 3*sqrt(|gamma| + 1), or |m| > 1 + sqrt(|gamma| + 1) for integer gamma.

    Evaluated exactly: compare (|m| - K)^2 against C*(|gamma| + 1) with a
    sign guard, K, C = (1, 1) or (6, 9).
    """
    if _is_square_poly(f):
        raise ValueError("f must be nonsquare")
    k, csq = (1, 1) if f.gamma.kexp == 0 else (6, 9)
    am = abs(f.m)
    t = am - k
    if t <= 0:
        return False
    return t * t > (abs(f.gamma) + 1) * csq


def prince_check(f: QuadMap, n: int) -> bool:
    """Exact test of |gamma + m| < j^(-2^(n-1)) * (2|f^(n-1)(gamma) - gamma| - 1)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    j = 1 if f.gamma.kexp == 0 else 2
    lhs = abs(f.gamma + f.m) * (j ** (1 << (n - 1)))
    rhs = abs(f.critical_value(n - 1) - f.gamma) * 2 - 1
    return lhs < rhs


def thingtoshow_check(f: QuadMap, n: int) -> bool:
    """Exact test of |f_m^(n-1)(0)| > 1 + j^(2^(n-1)) with f_m = x^2 + m."""
    if n < 2:
        raise ValueError("n must be at least 2")
    j = 1 if f.gamma.kexp == 0 else 2
    v = Dyadic(0)
    for _ in range(n - 1):
        v = v * v + f.m
    return abs(v) > 1 + j ** (1 << (n - 1))


# ---------------------------------------------------------------------------
# Eventual stability
# ---------------------------------------------------------------------------


@dataclass
class EventualStabilityReport:
    f: str
    status: str  # eventually-stable-witness | not-eventually-stable | inconclusive
    unfold: int | None = None
    factors: tuple[IntPoly, ...] = ()
    factor_reports: tuple[StabilityReport, ...] = ()
    zero_cycle: tuple[int, ...] = ()


def _zero_cycle(f: QuadMap) -> tuple[int, ...] | None:
    """The cycle through 0 when 0 is periodic under f, else None."""
    B = abs(f.b) + abs(f.c) + 2
    orbit = [0]
    seen = {0: 0}
    x = 0
    while True:
        x = f(x)
        if x == 0:
            return tuple(orbit)
        if x in seen or abs(x) >= B:
            return None
        seen[x] = len(orbit)
        orbit.append(x)


def eventual_stability_scan(f: QuadMap, max_unfold: int = 3, depth: int = 6) -> EventualStabilityReport:
    """Search for an iterate of f splitting into f-stable factors.

    0 periodic under f rules eventual stability out immediately (x divides
    some iterate, so every deeper iterate keeps a linear factor).  Otherwise
    f^m is factored completely for m <= max_unfold and each factor is
    scanned for f-stability to the requested depth.
    """
    if max_unfold > 3:
        raise UnsupportedSizeError("complete factorization is capped at f^3 (degree 8)")
    cyc = _zero_cycle(f)
    if cyc is not None:
        return EventualStabilityReport(f=str(f.poly), status=NOT_EVENTUALLY_STABLE, zero_cycle=cyc)
    last_factors: tuple[IntPoly, ...] = ()
    last_reports: tuple[StabilityReport, ...] = ()
    for m in range(0, max_unfold + 1):
        fm = iterate_poly(f.poly, m)
        factors = tuple(factor_into_irreducibles(fm)) if m >= 1 else (IntPoly.x(),)
        reports = tuple(stability_scan(f, gi, depth) for gi in factors)
        last_factors, last_reports = factors, reports
        if all(r.overall == STABLE for r in reports):
            return EventualStabilityReport(
                f=str(f.poly),
                status=EVENTUALLY_STABLE,
                unfold=m,
                factors=factors,
                factor_reports=reports,
            )
        if any(r.overall == INCONCLUSIVE for r in reports):
            continue  # deeper unfolding may still resolve the reducible levels
    return EventualStabilityReport(
        f=str(f.poly),
        status=INCONCLUSIVE,
        unfold=max_unfold,
        factors=last_factors,
        factor_reports=last_reports,
    )


# ---------------------------------------------------------------------------
# Family classifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyMatch:
    family: int
    k: int
    excluded: bool
    form: str


_EXCLUDED = {1: frozenset(), 2: frozenset({0, 2}), 3: frozenset({-1}), 4: frozenset({-1, 1})}


def family_from_parameters(family: int, k: int) -> QuadMap:
    if family == 1:
        return QuadMap(-k, k)
    if family == 2:
        return QuadMap(k, -1)
    if family == 3:
        return QuadMap(0, k)
    if family == 4:
        return QuadMap(-2 * k, k)
    raise ValueError("family must be 1..4")


def family_classify(f: QuadMap) -> list[FamilyMatch]:
    """All density-zero family patterns matching x^2 + b*x + c.

    Family 1 is matched under both sign conventions of its parameter
    (x^2 - k*x + k and x^2 + k*x - k name the same set of maps).
    """
    out = []
    b, c = f.b, f.c
    if c == -b:
        out.append(FamilyMatch(1, c, c in _EXCLUDED[1], "x^2 - k*x + k"))
        if b != c:  # avoid duplicating k = 0
            out.append(FamilyMatch(1, b, b in _EXCLUDED[1], "x^2 + k*x - k"))
    if c == -1:
        out.append(FamilyMatch(2, b, b in _EXCLUDED[2], "x^2 + k*x - 1"))
    if b == 0:
        out.append(FamilyMatch(3, c, c in _EXCLUDED[3], "x^2 + k"))
    if b % 2 == 0 and c == -b // 2:
        out.append(FamilyMatch(4, c, c in _EXCLUDED[4], "x^2 - 2*k*x + k"))
    return sorted(out, key=lambda m: (m.family, m.form, m.k))
