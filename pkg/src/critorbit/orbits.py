"""Translated critical-orbit arithmetic.

Factor tables for g(f^n(gamma)), isolated/recurrent classification of
divisor primes, rigid-divisibility verification, and the odd-valuation
maximality certificates for the Galois layers.

Soundness over completeness throughout: composite cofactors never
contribute witnesses, and p = 2 is excluded from certificates and rigid
checks (the dyadic prime plays the role of the excluded set S = {2}).
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactnum import DEFAULT_EFFORT, Dyadic, FactoredValue, factor, is_prime, valuation
from .polys import IntPoly, QuadMap

ISOLATED = "isolated"
RECURRENT = "recurrent"
NONDIVISOR = "nondivisor"


# ---------------------------------------------------------------------------
# Factor table
# ---------------------------------------------------------------------------


@dataclass
class OrbitEntry:
    """One level of the translated critical orbit, with its factorization.

    new_primes are the fully identified primes appearing here with positive
    valuation and valuation zero at every earlier level; valuations of
    identified primes are exact even when the cofactor stays composite.
    """

    n: int
    value: Dyadic
    numerator_factored: FactoredValue
    new_primes: frozenset[int]

    @property
    def complete(self) -> bool:
        return self.numerator_factored.is_complete()


def orbit_factor_table(
    f: QuadMap, g: IntPoly | None = None, N: int = 4, effort: int = DEFAULT_EFFORT
) -> list[OrbitEntry]:
    """Entries n = 1..N with best-effort factorizations of the numerators."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if g is None:
        g = IntPoly.x()
    entries: list[OrbitEntry] = []
    numerators: list[int] = []
    v = f.gamma
    for n in range(1, N + 1):
        v = f(v)
        val = g.evaluate(v)
        if val.num == 0:
            fv = FactoredValue(0, {}, 1, "unit")
            new = frozenset()
        else:
            fv = factor(val.num, effort)
            dyadic_factors = dict(fv.factors)
            if val.kexp:
                dyadic_factors[2] = dyadic_factors.get(2, 0) - val.kexp
            positive = {p for p, e in dyadic_factors.items() if e > 0}
            new = frozenset(
                p for p in positive if all(m == 0 or m % p != 0 for m in numerators)
            )
        entries.append(OrbitEntry(n, val, fv, new))
        numerators.append(val.num)
    return entries


# ---------------------------------------------------------------------------
# Isolated / recurrent classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeClassification:
    p: int
    verdict: str
    tail_length: int
    cycle_length: int
    hit_indices: tuple[int, ...]  # orbit indices n >= 1 with p | g(f^n(gamma))


def classify_prime(f: QuadMap, g: IntPoly | None, p: int) -> PrimeClassification:
    """Walk gamma mod p: recurrent iff a zero of g sits on the eventual cycle.

    Isolated means the zeros of g are met only in the pre-periodic tail;
    nondivisor means they are never met at indices n >= 1.  The walk is
    bounded by p + 1 steps via a visited map, so termination is
    unconditional.  p = 2 is unsupported (dyadic denominators).
    """
    if p == 2:
        raise ValueError("p = 2 is unsupported (dyadic denominators)")
    if not is_prime(p):
        raise ValueError("p must be prime")
    if g is None:
        g = IntPoly.x()
    gamma_mod = (-f.b) % p * pow(2, -1, p) % p
    gc = [c % p for c in g.coeffs]

    def is_root(x: int) -> bool:
        acc = 0
        for c in reversed(gc):
            acc = (acc * x + c) % p
        return acc == 0

    # positions indexed from n = 1 (the walk starts at f(gamma) mod p)
    x = (gamma_mod * gamma_mod + f.b * gamma_mod + f.c) % p
    seen: dict[int, int] = {}
    hits: list[int] = []
    idx = 1
    while x not in seen:
        seen[x] = idx
        if is_root(x):
            hits.append(idx)
        x = (x * x + f.b * x + f.c) % p
        idx += 1
    cycle_start = seen[x]
    cycle_len = idx - cycle_start
    tail_len = cycle_start - 1
    if any(h >= cycle_start for h in hits):
        verdict = RECURRENT
    elif hits:
        verdict = ISOLATED
    else:
        verdict = NONDIVISOR
    return PrimeClassification(p, verdict, tail_len, cycle_len, tuple(hits))


# ---------------------------------------------------------------------------
# Rigid divisibility
# ---------------------------------------------------------------------------


@dataclass
class RigidReport:
    f: str
    g: str
    depth: int
    verified: bool
    primes_checked: tuple[int, ...]
    violations: tuple[tuple[int, int, int], ...]  # (n, m, p): v_p(b_n) > 0 but v_p(b_{mn}) != v_p(b_n)

    @property
    def first_violation(self):
        return self.violations[0] if self.violations else None


def verify_rigid_divisibility(
    f: QuadMap, g: IntPoly | None = None, N: int = 8, effort: int = DEFAULT_EFFORT
) -> RigidReport:
    """Check v_p(b_n) > 0 => v_p(b_{mn}) = v_p(b_n) over identified primes.

    b_n = g(f^n(gamma)) as indexed from 1; p = 2 is excluded (the dyadic
    prime belongs to the allowed set S).  All violating triples (n, m, p)
    are reported, ordered lexicographically.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    table = orbit_factor_table(f, g, N, effort)
    primes = sorted(
        {p for e in table for p in e.numerator_factored.factors if p != 2}
    )
    vals: dict[int, list[int]] = {}
    for p in primes:
        vp = []
        for e in table:
            num = e.value.num
            vp.append(valuation(num, p) if num != 0 else -1)  # -1 marks a zero term
        vals[p] = vp
    violations = []
    for n in range(1, N + 1):
        for m in range(2, N // n + 1):
            for p in primes:
                vn, vmn = vals[p][n - 1], vals[p][m * n - 1]
                if vn > 0 and vmn != vn:
                    violations.append((n, m, p))
    violations.sort()
    return RigidReport(
        f=str(f.poly),
        g=str(g) if g is not None else "x",
        depth=N,
        verified=not violations,
        primes_checked=tuple(primes),
        violations=tuple(violations),
    )


# ---------------------------------------------------------------------------
# Maximality certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaximalityCertificate:
    """Witness that the level-n Galois layer is maximal (given irreducibility).

    p odd with odd valuation at level n and valuation zero at levels 1..n-1;
    p coprime to 2a holds automatically for monic f and odd p.
    """

    f: str
    g: str
    n: int
    p: int
    vp_at_n: int
    checked_earlier_levels: tuple[int, ...]
    p_coprime_to_2a: bool = True
    assumes_irreducible_tower: bool = True

    def revalidate(self, f: QuadMap, g: IntPoly | None = None) -> bool:
        """Recompute the witness conditions from scratch by trial division."""
        if g is None:
            g = IntPoly.x()
        v = f.gamma
        ok = self.p % 2 == 1 and is_prime(self.p)
        for m in range(1, self.n + 1):
            v = f(v)
            num = g.evaluate(v).num
            if num == 0:
                return False
            e = valuation(num, self.p)
            if m < self.n:
                ok = ok and e == 0
            else:
                ok = ok and e == self.vp_at_n and e % 2 == 1
        return ok


@dataclass
class CertificateResult:
    n: int
    status: str  # 'certified' | 'none-found' | 'not-applicable'
    certificate: MaximalityCertificate | None = None
    budget_note: str = ""


def maximality_certificate(
    f: QuadMap, g: IntPoly | None, n: int, table: list[OrbitEntry]
) -> CertificateResult:
    """Search entry n for the smallest odd prime with an odd valuation here
    and zero valuation at every earlier level.

    Absence of a certificate is not evidence of non-maximality; with an
    incomplete factorization the budget note says so.
    """
    if n < 1 or n > len(table):
        raise ValueError("n out of table range")
    if n == 1:
        return CertificateResult(1, "not-applicable")
    entry = table[n - 1]
    gname = str(g) if g is not None else "x"
    earlier = [table[m - 1].value.num for m in range(1, n)]
    if any(num == 0 for num in earlier) or entry.value.num == 0:
        return CertificateResult(n, "none-found", budget_note="zero orbit value in range")
    for p in sorted(entry.numerator_factored.factors):
        if p == 2:
            continue
        e = entry.numerator_factored.factors[p]
        if e % 2 == 1 and all(num % p != 0 for num in earlier):
            cert = MaximalityCertificate(
                f=str(f.poly),
                g=gname,
                n=n,
                p=p,
                vp_at_n=e,
                checked_earlier_levels=tuple(range(1, n)),
            )
            return CertificateResult(n, "certified", cert)
    note = "" if entry.complete else f"factorization incomplete (cofactor {entry.numerator_factored.cofactor_status})"
    return CertificateResult(n, "none-found", budget_note=note)


@dataclass
class CertificateScan:
    f: str
    g: str
    depth: int
    results: list[CertificateResult]
    certified_levels: tuple[int, ...]
    fraction: float
    incomplete_levels: tuple[int, ...] = ()

    def result(self, n: int) -> CertificateResult:
        for r in self.results:
            if r.n == n:
                return r
        raise KeyError(n)


def certificate_scan(
    f: QuadMap, g: IntPoly | None = None, N: int = 4, effort: int = DEFAULT_EFFORT
) -> CertificateScan:
    """Maximality certificates for every applicable level n <= N."""
    if N < 1:
        raise ValueError("N must be at least 1")
    table = orbit_factor_table(f, g, N, effort)
    results = [maximality_certificate(f, g, n, table) for n in range(1, N + 1)]
    certified = tuple(r.n for r in results if r.status == "certified")
    applicable = max(N - 1, 1)
    return CertificateScan(
        f=str(f.poly),
        g=str(g) if g is not None else "x",
        depth=N,
        results=results,
        certified_levels=certified,
        fraction=len(certified) / applicable,
        incomplete_levels=tuple(e.n for e in table if not e.complete),
    )
