"""Empirical prime-divisor density.

Prime sieve, orbit-divisibility tests (eq. of membership: p divides some
nonzero orbit term), finite-cutoff density estimates, the zero-periodic
proportion, and the mod-p preimage-tree upper bound on the density.

Per-prime work is pure and independent; estimates are map-reduce over the
sieve stream with commutative aggregation, so reports are identical for
any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from . import _backend, _purekernel
from .polys import IntPoly, QuadMap

MAX_PREIMAGE_DEPTH = 20

_I62 = 1 << 62
_P31 = 1 << 31


# ---------------------------------------------------------------------------
# Prime sieve
# ---------------------------------------------------------------------------


def prime_sieve(X: int):
    """All primes <= X in order (segmented Eratosthenes)."""
    if X < 2:
        return
    yield 2
    root = math.isqrt(X)
    base = bytearray([1]) * (root + 1)
    base[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(root) + 1):
        if base[i]:
            base[i * i :: i] = bytearray(len(base[i * i :: i]))
    base_primes = [i for i in range(3, root + 1) if base[i]]
    for p in base_primes:
        yield p
    seg_len = 1 << 16
    lo = root + 1
    while lo <= X:
        hi = min(lo + seg_len - 1, X)
        seg = bytearray([1]) * (hi - lo + 1)
        for p in base_primes:
            start = ((lo + p - 1) // p) * p
            seg[start - lo :: p] = bytearray(len(seg[start - lo :: p]))
        if lo <= 2 <= hi:
            pass
        start = lo if lo % 2 == 1 else lo + 1
        for i in range(start - lo, len(seg), 2):
            if seg[i]:
                yield lo + i
        lo = hi + 1


@lru_cache(maxsize=4)
def _primes_list(X: int) -> tuple[int, ...]:
    return tuple(prime_sieve(X))


@lru_cache(maxsize=2)
def _spf_array(X: int):
    """Smallest-prime-factor table 0..X (numpy), for factoring p - 1 quickly."""
    import numpy as np

    spf = np.zeros(X + 1, dtype=np.int64)
    for i in range(2, math.isqrt(X) + 1):
        if spf[i] == 0:
            sl = spf[i * i :: i]
            sl[sl == 0] = i
    return spf


def _factor_with_spf(n: int, spf) -> list[int]:
    """Distinct prime factors of n using the SPF table."""
    out = []
    while n > 1:
        q = int(spf[n])
        if q == 0:
            q = n
        out.append(q)
        while n % q == 0:
            n //= q
    return out


# ---------------------------------------------------------------------------
# Integer-orbit prefix analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitPrefix:
    """Exact early orbit data shared by every prime.

    pairs: (n, g(a_n)) for the indices handled exactly, nonzero values only.
    start_index/start_value: where the mod-p walk takes over; start_value is
    None when the integer orbit is finite and the pairs are exhaustive.
    """

    pairs: tuple[tuple[int, int], ...]
    start_index: int | None
    start_value: int | None


def _int_roots(g: IntPoly) -> list[int]:
    """Integer roots of g, by the rational-root candidates."""
    if g.is_zero():
        raise ValueError("zero polynomial")
    coeffs = list(g.coeffs)
    roots = []
    shift = 0
    while coeffs[0] == 0:
        roots.append(0)
        coeffs = coeffs[1:]
        shift += 1
        if len(coeffs) == 1:
            return sorted(set(roots))
    c0, lead = abs(coeffs[0]), coeffs[-1]
    p = IntPoly(coeffs)
    for d in range(1, c0 + 1):
        if c0 % d:
            continue
        for r in (d, -d):
            if p.evaluate(r) == 0:
                roots.append(r)
    return sorted(set(roots))


def _poly_escape_bound(f: IntPoly) -> int:
    """B with |f(x)| > |x| for |x| >= B; degree >= 2 (any lead), or |b| >= 2 linear."""
    if f.degree >= 2:
        return sum(abs(c) for c in f.coeffs) + 2
    b, c = f.coeffs[1], f.coeffs[0]
    if abs(b) >= 2:
        return abs(c) + 1
    raise ValueError("no escape bound for |lead| <= 1 linear maps")


def orbit_prefix(f: IntPoly, g: IntPoly | None, a0: int) -> OrbitPrefix:
    """Walk the integer orbit until it provably escapes or closes up.

    Beyond the returned start index every orbit value has |a_n| >= B, so
    g(a_n) != 0 and the nonzero-term proviso cannot bite; mod-p work is
    then safe.  Finite orbits are returned in full.
    """
    if f.degree < 1:
        raise ValueError("f must be nonconstant")
    groots = _int_roots(g) if g is not None else [0]
    g_bound = max((abs(r) for r in groots), default=0) + 1

    def pairs_for(values: list[int]) -> tuple[tuple[int, int], ...]:
        out = []
        for n, a in enumerate(values):
            gv = g.evaluate(a) if g is not None else a
            if gv != 0:
                out.append((n, gv))
        return tuple(out)

    if f.degree == 1 and abs(f.coeffs[1]) < 2:
        b, c = f.coeffs[1], f.coeffs[0]
        if b == -1 or (b == 1 and c == 0):
            values = [a0, f.evaluate(a0)]  # period <= 2
            return OrbitPrefix(pairs_for(values), None, None)
        # b == 1, c != 0: arithmetic progression; step past every g-root crossing
        t = 0
        for r in groots:
            n, rem = divmod(r - a0, c)
            if rem == 0 and n >= 0:
                t = max(t, n + 1)
        values = [a0 + n * c for n in range(t + 1)]
        return OrbitPrefix(pairs_for(values), t, values[-1])

    B = max(_poly_escape_bound(f), g_bound)
    seen = set()
    values = [a0]
    x = a0
    while abs(x) < B:
        if x in seen:
            return OrbitPrefix(pairs_for(values[:-1]), None, None)
        seen.add(x)
        x = f.evaluate(x)
        values.append(x)
    return OrbitPrefix(pairs_for(values), len(values) - 1, x)


# ---------------------------------------------------------------------------
# Membership (divides-orbit) machinery
# ---------------------------------------------------------------------------


def _kernel_for(f: IntPoly, g: IntPoly | None, prefix: OrbitPrefix, max_p: int):
    """Compiled kernel only when every operand fits its 64-bit assumptions."""
    if _backend.NAME == "pure":
        return _backend
    ok = (
        max_p < _P31
        and all(abs(c) < _I62 for c in f.coeffs)
        and (g is None or all(abs(c) < _I62 for c in g.coeffs))
        and all(abs(v) < _I62 for _, v in prefix.pairs)
        and (prefix.start_value is None or abs(prefix.start_value) < _I62)
    )
    return _backend if ok else _purekernel


def divides_orbit(f: IntPoly, a0: int, p: int, g: IntPoly | None = None) -> bool:
    """True iff p divides some nonzero term g(f^n(a0)), n >= 0."""
    prefix = orbit_prefix(f, g, a0)
    members, _ = _purekernel.orbit_member_batch(
        list(f.coeffs),
        list(g.coeffs) if g is not None else None,
        prefix.pairs,
        prefix.start_index,
        prefix.start_value,
        [p],
    )
    return members == 1


def _order_mod(b: int, p: int, spf) -> int:
    d = p - 1
    for q in _factor_with_spf(p - 1, spf):
        while d % q == 0 and pow(b, d // q, p) == 1:
            d //= q
    return d


def _linear_members(f: IntPoly, prefix: OrbitPrefix, primes, spf) -> int:
    """Order-based membership count for linear maps (g = x).

    The mod-p orbit of b*x + c lies on a coset of <b>, so membership
    reduces to a subgroup test: t in <b> iff t^ord(b) == 1.  This replaces
    walks of length ord_p(b), which for maps like 2x - 1 average a constant
    fraction of p and would dominate the entire run.
    """
    b, c = f.coeffs[1], f.coeffs[0]
    x0 = prefix.start_value
    members = 0
    for p in primes:
        hit = False
        for _, v in prefix.pairs:
            if v % p == 0:
                hit = True
                break
        if not hit and x0 is not None:
            if p == 2:
                m, _ = _purekernel.orbit_member_batch(
                    list(f.coeffs), None, (), prefix.start_index, x0, [2]
                )
                hit = m == 1
            else:
                bb, cc, y0 = b % p, c % p, x0 % p
                if bb == 0:
                    hit = y0 == 0 or cc == 0
                elif bb == 1:
                    hit = cc != 0 or y0 == 0
                else:
                    phi = cc * pow(1 - bb, -1, p) % p
                    if y0 == phi:
                        hit = y0 == 0
                    else:
                        t = -phi * pow(y0 - phi, -1, p) % p
                        hit = pow(t, _order_mod(bb, p, spf), p) == 1
        if hit:
            members += 1
    return members


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

PER_PRIME_HEADER = "p,member,steps,cycle_len"


@dataclass
class DensityReport:
    f: str
    a0: int
    limit: int
    g: str | None
    primes_tested: int
    members: int
    estimate: float
    upper_bounds: list[tuple[int, float]] | None = None
    per_prime: list[tuple[int, int, int, int]] | None = None
    config: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = {
            "f": self.f,
            "a0": self.a0,
            "limit": self.limit,
            "g": self.g,
            "primes_tested": self.primes_tested,
            "members": self.members,
            "estimate": self.estimate,
        }
        if self.upper_bounds is not None:
            d["upper_bounds"] = [{"n": n, "fraction": fr} for n, fr in self.upper_bounds]
        return d


def _chunks(seq, k):
    n = len(seq)
    size = (n + k - 1) // k
    return [seq[i : i + size] for i in range(0, n, size)]


def density_estimate(
    f: IntPoly,
    a0: int,
    X: int,
    g: IntPoly | None = None,
    threads: int = 1,
    collect: bool = False,
    config: dict | None = None,
) -> DensityReport:
    """Finite-cutoff proportion of primes <= X dividing the (translated) orbit.

    Deterministic and thread-count invariant: membership per prime is pure,
    the aggregate is a sum, and per-prime rows keep sieve order.
    """
    if X < 2:
        raise ValueError("X must be at least 2")
    primes = list(_primes_list(X))
    prefix = orbit_prefix(f, g, a0)
    fc = list(f.coeffs)
    gc = list(g.coeffs) if g is not None else None

    rows = None
    if f.degree == 1 and g is None and not collect:
        spf = _spf_array(X)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                parts = ex.map(lambda ch: _linear_members(f, prefix, ch, spf), _chunks(primes, threads))
            members = sum(parts)
        else:
            members = _linear_members(f, prefix, primes, spf)
    else:
        kern = _kernel_for(f, g, prefix, primes[-1])

        def run(chunk):
            return kern.orbit_member_batch(
                fc, gc, prefix.pairs, prefix.start_index, prefix.start_value, chunk, collect
            )

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                results = list(ex.map(run, _chunks(primes, threads)))
        else:
            results = [run(primes)]
        members = sum(r[0] for r in results)
        if collect:
            rows = [row for r in results for row in r[1]]

    return DensityReport(
        f=str(f),
        a0=a0,
        limit=X,
        g=str(g) if g is not None else None,
        primes_tested=len(primes),
        members=members,
        estimate=members / len(primes),
        per_prime=rows,
        config=dict(config or {}),
    )


@dataclass
class ZeroPeriodicReport:
    f: str
    limit: int
    primes_tested: int
    periodic: int
    fraction: float
    flags: list[tuple[int, int]] | None = None


def zero_periodic_density(f: IntPoly, X: int, collect: bool = False) -> ZeroPeriodicReport:
    """Proportion of p <= X for which 0 lies on a cycle of f mod p.

    0 is periodic mod p iff 0 reappears in the forward orbit of f(0), so
    the same walk kernel applies with start value f(0).
    """
    primes = list(_primes_list(X))
    start = f.evaluate(0)
    prefix = OrbitPrefix((), 0, start)
    kern = _kernel_for(f, None, prefix, primes[-1])
    count, rows = kern.orbit_member_batch(list(f.coeffs), None, (), 0, start, primes, collect)
    flags = [(p, m) for (p, m, _, _) in rows] if collect else None
    return ZeroPeriodicReport(
        f=str(f),
        limit=X,
        primes_tested=len(primes),
        periodic=count,
        fraction=count / len(primes),
        flags=flags,
    )


# ---------------------------------------------------------------------------
# Preimage trees and the Chebotarev-style upper bound
# ---------------------------------------------------------------------------


def _roots_mod(g: IntPoly, p: int) -> list[int] | None:
    """Roots of g mod p; None when g vanishes identically mod p."""
    coeffs = [c % p for c in g.coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        return None
    if len(coeffs) == 1:
        return []
    if p < 64 or len(coeffs) == 2:
        if len(coeffs) == 2:
            return [(-coeffs[0]) * pow(coeffs[1], -1, p) % p]
        return [x for x in range(p) if _eval_mod(coeffs, x, p) == 0]
    return _roots_mod_large(coeffs, p)


def _eval_mod(coeffs, x, p):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def _gf_norm(a, p):
    a = [c % p for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _gf_rem(a, b, p):
    a = a[:]
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    for i in range(len(a) - db - 1, -1, -1):
        t = a[i + db] * inv % p
        if t:
            for j, c in enumerate(b):
                a[i + j] = (a[i + j] - t * c) % p
    return _gf_norm(a[:db], p)


def _gf_gcd(a, b, p):
    a, b = _gf_norm(a, p), _gf_norm(b, p)
    while b:
        a, b = b, _gf_rem(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _gf_mulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return _gf_rem(out, mod, p)


def _gf_powmod(base, e, mod, p):
    out = [1]
    base = _gf_rem(base, mod, p)
    while e:
        if e & 1:
            out = _gf_mulmod(out, base, mod, p)
        base = _gf_mulmod(base, base, mod, p)
        e >>= 1
    return out


def _roots_mod_large(coeffs, p):
    """Root finding via x^p - x splitting and deterministic-shift halving."""
    inv = pow(coeffs[-1], -1, p)
    h = [c * inv % p for c in coeffs]
    xp = _gf_powmod([0, 1], p, h, p)
    lin = _gf_gcd([(a - b) % p for a, b in zip(xp + [0] * len(h), [0, 1] + [0] * len(h))], h, p)
    roots = []
    stack = [lin]
    delta = 0
    while stack:
        w = stack.pop()
        if len(w) <= 1:
            continue
        if len(w) == 2:
            roots.append((-w[0]) % p)
            continue
        split = None
        while split is None:
            cand = _gf_powmod([delta % p, 1], (p - 1) // 2, w, p)
            cand = _gf_norm([(c - (1 if i == 0 else 0)) % p for i, c in enumerate(cand + [0])], p)
            d = _gf_gcd(cand, w, p)
            delta += 1
            if 0 < len(d) - 1 < len(w) - 1:
                split = d
        q = _gf_quot(w, split, p)
        stack.append(split)
        stack.append(q)
    return sorted(roots)


def _gf_quot(a, b, p):
    a = a[:]
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * (len(a) - db)
    for i in range(len(a) - db - 1, -1, -1):
        t = a[i + db] * inv % p
        q[i] = t
        if t:
            for j, c in enumerate(b):
                a[i + j] = (a[i + j] - t * c) % p
    return _gf_norm(q, p)


def preimage_exists_mod_p(f: QuadMap, g: IntPoly, n: int, p: int) -> bool:
    """Whether g(f^n(x)) = 0 has a solution mod p (odd p), by backward BFS."""
    if p == 2:
        raise ValueError("p must be odd")
    if n > MAX_PREIMAGE_DEPTH:
        raise ValueError(f"depth capped at {MAX_PREIMAGE_DEPTH}")
    roots = _roots_mod(g, p)
    if roots is None:
        return True
    if not roots:
        return False
    return _backend.preimage_depth_one(f.b, f.c, n, p, roots) >= n


@dataclass
class BoundReport:
    f: str
    g: str
    limit: int
    depth: int
    primes_tested: int
    counts: list[int]
    fractions: list[tuple[int, float]]
    config: dict = field(default_factory=dict)


def chebotarev_upper_bound(
    f: QuadMap, g: IntPoly | None, N: int, X: int, config: dict | None = None
) -> BoundReport:
    """For n = 1..N, the fraction of odd p <= X with g(f^n(x)) solvable mod p.

    These fractions estimate P(X_n > 0) for the Galois process and bound the
    divisor density from above; they are nonincreasing in n by construction.
    p = 2 is skipped (a single prime cannot move a density).
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > MAX_PREIMAGE_DEPTH:
        raise ValueError(f"depth capped at {MAX_PREIMAGE_DEPTH}")
    if X < 100:
        raise ValueError("X must be at least 100")
    primes = [p for p in _primes_list(X) if p != 2]
    kern = _backend
    if _backend.NAME != "pure" and (
        max(abs(f.b), abs(f.c)) >= _I62 or primes[-1] >= _P31
    ):
        kern = _purekernel
    counts = [0] * (N + 1)
    if g is None or g == IntPoly.x():
        depths = kern.preimage_depth_batch(f.b, f.c, N, primes)
        for d in depths:
            for n in range(1, min(d, N) + 1):
                counts[n] += 1
    else:
        for p in primes:
            roots = _roots_mod(g, p)
            if roots is None:
                d = N
            elif not roots:
                d = -1
            else:
                d = kern.preimage_depth_one(f.b, f.c, N, p, roots)
            for n in range(1, min(d, N) + 1):
                counts[n] += 1
    fractions = [(n, counts[n] / len(primes)) for n in range(1, N + 1)]
    return BoundReport(
        f=str(f),
        g=str(g) if g is not None else "x",
        limit=X,
        depth=N,
        primes_tested=len(primes),
        counts=counts[1:],
        fractions=fractions,
        config=dict(config or {}),
    )
