"""Pure-Python kernel for the per-prime hot loops.

Mirrors the API of the compiled extension (critorbit._kernel); selected by
critorbit._backend when the extension is missing or CRITORBIT_PURE is set.
Unlike the extension this path takes arbitrary-precision inputs, so the
drivers also route any oversized operands here.

Orbit walks use Brent cycle detection: the hare visits every reachable
residue before the cycle closes, so testing each hare value is a complete
membership check with O(1) memory.
"""

from __future__ import annotations

NAME = "pure"


def _sqrt_mod_prime(a: int, p: int) -> int:
    """A square root of a mod p, or -1 for a non-residue.  p must be an odd prime."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) >> 1, p) != 1:
        return -1
    if p & 3 == 3:
        return pow(a, (p + 1) >> 2, p)
    q = p - 1
    s = 0
    while q % 2 == 0:
        q >>= 1
        s += 1
    z = 2
    while pow(z, (p - 1) >> 1, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) >> 1, p)
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
    return r


def _walk(fc: list[int], gc: list[int] | None, x0: int, p: int):
    """Brent walk of x -> f(x) mod p from x0.

    Returns (hit, steps, lam): hit at `steps` f-applications from x0
    (0 tests x0 itself), or the cycle length lam when no zero of g is
    reachable.  gc None means g = x.
    """
    quad = len(fc) == 3 and fc[2] % p == 1
    b = fc[1] % p if quad else 0
    c = fc[0] % p if quad else 0

    def step(x: int) -> int:
        if quad:
            return (x * (x + b) + c) % p
        acc = 0
        for co in reversed(fc):
            acc = (acc * x + co) % p
        return acc

    def hit(x: int) -> bool:
        if gc is None:
            return x == 0
        acc = 0
        for co in reversed(gc):
            acc = (acc * x + co) % p
        return acc == 0

    x0 %= p
    if hit(x0):
        return True, 0, -1
    power = lam = 1
    tort = x0
    hare = step(x0)
    steps = 1
    while True:
        if hit(hare):
            return True, steps, -1
        if hare == tort:
            return False, -1, lam
        if power == lam:
            tort = hare
            power <<= 1
            lam = 0
        hare = step(hare)
        lam += 1
        steps += 1


def orbit_member_batch(f_coeffs, g_coeffs, prefix_pairs, start_index, start_value, primes, collect=False):
    """Membership of each prime as a divisor of the (translated) orbit.

    prefix_pairs: (n, value) with value != 0, the exact early terms; the
    mod-p walk takes over at orbit index start_index with integer value
    start_value (None when the integer orbit is finite and the prefix is
    everything).  Returns (members, rows); rows are
    (p, member, first_hit_index, cycle_len) when collect is set.
    """
    members = 0
    rows = [] if collect else None
    for p in primes:
        member = False
        steps = -1
        lam = 0
        for n, v in prefix_pairs:
            if v % p == 0:
                member = True
                steps = n
                break
        if not member and start_value is not None:
            hit, s, lam = _walk(f_coeffs, g_coeffs, start_value % p, p)
            if hit:
                member = True
                steps = start_index + s
        if member:
            members += 1
        if collect:
            rows.append((p, int(member), steps, lam))
    return members, rows


def preimage_depth_one(b: int, c: int, depth: int, p: int, roots) -> int:
    """Longest backward chain length k <= depth under x^2 + b*x + c mod p.

    Starts from the given residues (zeros of g); each step replaces the
    frontier by its f-preimages via a modular square root.  Returns -1 when
    the starting set is empty, else the achieved depth.
    """
    frontier = {r % p for r in roots}
    if not frontier:
        return -1
    inv2 = (p + 1) >> 1
    h = b % p * inv2 % p
    shift = (h * h - c) % p
    d = 0
    while d < depth:
        nxt = set()
        for y in frontier:
            r = _sqrt_mod_prime((y + shift) % p, p)
            if r < 0:
                continue
            nxt.add((r - h) % p)
            nxt.add((-r - h) % p)
        if not nxt:
            return d
        frontier = nxt
        d += 1
    return depth


def preimage_depth_batch(b: int, c: int, depth: int, primes) -> list[int]:
    """preimage_depth_one with g = x (root set {0}) over many primes."""
    return [preimage_depth_one(b, c, depth, p, (0,)) for p in primes]
