"""Finite wreath-group models of the Galois process.

Automorphisms of the complete binary rooted tree of height n are stored as
one swap bit per internal node (heap order: node 1 is the root, node v has
children 2v and 2v+1; leaves are indexed depth-first by their path bits).
The full group at height n has 2^(2^n - 1) elements.

The process value X_i of an element is the number of depth-i nodes it
fixes, i.e. the number of all-zero root paths.  Exact probabilities come
from enumeration (small heights), the top-down recursion
q_n = q_{n-1} - q_{n-1}^2 / 2, or a distribution-evolution recursion for
mixed towers; Monte Carlo sampling covers the rest.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import random

MAXIMAL = "maximal"
ORDER2 = "order2"

ENUM_HEIGHT_CAP = 4


class UnsupportedSizeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Tree automorphisms
# ---------------------------------------------------------------------------


class TreeAut:
    """Bit-labeled automorphism of the height-n complete binary rooted tree."""

    __slots__ = ("height", "mask")

    def __init__(self, height: int, mask: int = 0):
        if height < 1:
            raise ValueError("height must be at least 1")
        if not 0 <= mask < 1 << ((1 << height) - 1):
            raise ValueError("label mask out of range")
        object.__setattr__(self, "height", height)
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, name, value):
        raise AttributeError("TreeAut is immutable")

    @property
    def labels(self) -> tuple[int, ...]:
        """Swap bits in level-by-level node order (node indices 1..2^n - 1)."""
        return tuple((self.mask >> i) & 1 for i in range((1 << self.height) - 1))

    @staticmethod
    def identity(height: int) -> "TreeAut":
        return TreeAut(height, 0)

    @staticmethod
    def from_labels(height: int, labels) -> "TreeAut":
        mask = 0
        for i, bit in enumerate(labels):
            if bit:
                mask |= 1 << i
        return TreeAut(height, mask)

    @staticmethod
    def random(height: int, rng: random.Random) -> "TreeAut":
        return TreeAut(height, rng.getrandbits((1 << height) - 1))

    def bit(self, node: int) -> int:
        return (self.mask >> (node - 1)) & 1

    def node_image(self, v: int) -> int:
        """Image of a node in heap indexing (works for leaves too)."""
        depth = v.bit_length() - 1
        if depth > self.height:
            raise ValueError("node below the leaves")
        src = 1
        img = 1
        for i in range(depth - 1, -1, -1):
            b = (v >> i) & 1
            img = 2 * img + (b ^ self.bit(src))
            src = 2 * src + b
        return img

    def leaf_image(self, leaf: int) -> int:
        """Action on leaves 0..2^n - 1 (depth-first path-bit indexing)."""
        n = self.height
        return self.node_image((1 << n) + leaf) - (1 << n)

    def fixed_nodes_at_depth(self, depth: int) -> int:
        """Number of depth-`depth` nodes fixed: all-zero paths of that length."""

        def rec(v: int, d: int) -> int:
            if d == depth:
                return 1
            if self.bit(v):
                return 0
            return rec(2 * v, d + 1) + rec(2 * v + 1, d + 1)

        return rec(1, 0)

    def fixed_leaves(self) -> int:
        return self.fixed_nodes_at_depth(self.height)

    def __mul__(self, other: "TreeAut") -> "TreeAut":
        """(self * other)(x) = self(other(x))."""
        if self.height != other.height:
            raise ValueError("height mismatch")
        mask = 0
        for v in range(1, (1 << self.height)):
            bit = other.bit(v) ^ self.bit(other.node_image(v))
            if bit:
                mask |= 1 << (v - 1)
        return TreeAut(self.height, mask)

    def inverse(self) -> "TreeAut":
        mask = 0
        for v in range(1, (1 << self.height)):
            if self.bit(v):
                mask |= 1 << (self.node_image(v) - 1)
        return TreeAut(self.height, mask)

    def __eq__(self, other):
        if not isinstance(other, TreeAut):
            return NotImplemented
        return self.height == other.height and self.mask == other.mask

    def __hash__(self):
        return hash((self.height, self.mask))

    def __repr__(self):
        return f"TreeAut(height={self.height}, mask={self.mask:#x})"


def enumerate_aut(n: int):
    """Every automorphism of the height-n tree exactly once (n <= 4)."""
    if n > ENUM_HEIGHT_CAP:
        raise UnsupportedSizeError(f"enumeration capped at height {ENUM_HEIGHT_CAP}; use sampling")
    for mask in range(1 << ((1 << n) - 1)):
        yield TreeAut(n, mask)


def fixed_leaves(sigma: TreeAut) -> int:
    return sigma.fixed_leaves()


# ---------------------------------------------------------------------------
# Exact probabilities
# ---------------------------------------------------------------------------


def qn_recursion(n: int) -> Fraction:
    """q_n = q_{n-1} - q_{n-1}^2 / 2 with q_0 = 1."""
    q = Fraction(1)
    for _ in range(n):
        q = q - q * q / 2
    return q


def qn_by_enumeration(n: int) -> Fraction:
    """P(X_n > 0) by full enumeration of the height-n group (n <= 4)."""
    count = sum(1 for s in enumerate_aut(n) if s.fixed_leaves() > 0)
    return Fraction(count, 1 << ((1 << n) - 1))


def qn_exact(n: int) -> Fraction:
    """P(X_n > 0) for the full wreath model; enumeration cross-checks the
    recursion at small heights."""
    q = qn_recursion(n)
    if 1 <= n <= ENUM_HEIGHT_CAP:
        assert q == qn_by_enumeration(n)
    return q


def exceptional_fixed_fraction(n: int) -> Fraction:
    """P(X_n > 0) = 2^-n for the order-2-per-level model."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return Fraction(1, 1 << n)


def order2_element(n: int, eps) -> TreeAut:
    """Element of the order-2-per-level model: bit eps[l] swaps every pair
    at depth l (all labels at that depth equal)."""
    mask = 0
    for lvl, bit in enumerate(eps):
        if bit:
            lo, hi = 1 << lvl, 1 << (lvl + 1)
            for v in range(lo, hi):
                mask |= 1 << (v - 1)
    return TreeAut(n, mask)


def exceptional_fraction_by_enumeration(n: int) -> Fraction:
    """Enumerates the 2^n-element model group and counts X_n > 0."""
    count = 0
    for e in range(1 << n):
        eps = [(e >> i) & 1 for i in range(n)]
        if order2_element(n, eps).fixed_leaves() > 0:
            count += 1
    return Fraction(count, 1 << n)


def masked_qn_exact(n_max: int, level_mask) -> list[Fraction]:
    """Exact P(X_n > 0) for a mixed tower, by evolving the distribution of
    the number of fixed nodes per depth.

    maximal level: k fixed parents generate 2 * Binomial(k, 1/2) fixed
    children; order2 level: 2k with probability 1/2, else 0.
    """
    from math import comb

    if len(level_mask) < n_max:
        raise ValueError("mask shorter than n_max")
    if n_max > 16:
        raise UnsupportedSizeError("distribution evolution tracks up to 2^n states; use sampling")
    dist = {1: Fraction(1)}  # fixed nodes at depth 0
    out = []
    for lvl in range(1, n_max + 1):
        kind = level_mask[lvl - 1]
        nxt: dict[int, Fraction] = {}
        for k, pr in dist.items():
            if kind == MAXIMAL:
                for j in range(k + 1):
                    w = pr * Fraction(comb(k, j), 1 << k)
                    nxt[2 * j] = nxt.get(2 * j, Fraction(0)) + w
            elif kind == ORDER2:
                if k == 0:
                    nxt[0] = nxt.get(0, Fraction(0)) + pr
                else:
                    nxt[2 * k] = nxt.get(2 * k, Fraction(0)) + pr / 2
                    nxt[0] = nxt.get(0, Fraction(0)) + pr / 2
            else:
                raise ValueError(f"unknown mask entry {kind!r}")
        dist = nxt
        out.append(1 - dist.get(0, Fraction(0)))
    return out


# ---------------------------------------------------------------------------
# Martingale and stabilizer-average checks
# ---------------------------------------------------------------------------


def martingale_check(n: int) -> Fraction:
    """Max over realizable histories of |E[X_n | X_0..X_{n-1}] - t_{n-1}|.

    Full enumeration, so n <= 3.  The full wreath model is a martingale at
    every level, hence the deviation is exactly 0.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > 3:
        raise UnsupportedSizeError("full-history enumeration capped at n = 3")
    groups: dict[tuple[int, ...], list[int]] = {}
    for s in enumerate_aut(n):
        hist = tuple(s.fixed_nodes_at_depth(i) for i in range(n))  # X_0..X_{n-1}
        groups.setdefault(hist, []).append(s.fixed_nodes_at_depth(n))
    dev = Fraction(0)
    for hist, xs in groups.items():
        e = Fraction(sum(xs), len(xs))
        dev = max(dev, abs(e - hist[-1]))
    return dev


def stabav_check(n: int, v0: int, sigma: TreeAut) -> Fraction:
    """Average over the level-(n-1) pointwise stabilizer H of the number of
    children of v0 fixed by sigma*tau; equals 1 whenever sigma fixes v0.
    """
    if n > ENUM_HEIGHT_CAP:
        raise UnsupportedSizeError(f"stabilizer enumeration capped at height {ENUM_HEIGHT_CAP}")
    if sigma.height != n:
        raise ValueError("sigma must act on the height-n tree")
    depth = v0.bit_length() - 1
    if depth != n - 1:
        raise ValueError("v0 must be a depth n-1 node (heap index)")
    if sigma.node_image(v0) != v0:
        raise ValueError("sigma must fix v0")
    lo, hi = 1 << (n - 1), 1 << n
    free_bits = hi - lo
    children = (2 * v0, 2 * v0 + 1)
    total = 0
    for sub in range(1 << free_bits):
        mask = 0
        for i in range(free_bits):
            if (sub >> i) & 1:
                mask |= 1 << (lo + i - 1)
        tau = TreeAut(n, mask)
        pi = sigma * tau
        total += sum(1 for ch in children if pi.node_image(ch) == ch)
    return Fraction(total, 1 << free_bits)


def random_stabav_instance(n: int, rng: random.Random) -> tuple[int, TreeAut]:
    """A uniform (v0, sigma) pair with sigma fixing v0."""
    v0 = rng.randrange(1 << (n - 1), 1 << n)
    sigma = TreeAut.random(n, rng)
    # zero the labels along v0's ancestor path so sigma fixes v0
    mask = sigma.mask
    v = v0
    while v > 1:
        v //= 2
        mask &= ~(1 << (v - 1))
    return v0, TreeAut(n, mask)


# ---------------------------------------------------------------------------
# Monte Carlo sampling
# ---------------------------------------------------------------------------


@dataclass
class LevelStat:
    n: int
    mask: str
    exact: Fraction | None = None
    estimate: float | None = None
    stderr: float | None = None
    # martingale diagnostics: mean and stderr of X_n - X_{n-1}, or the exact
    # max conditional deviation for enumerated heights
    increment_mean: float | None = None
    increment_stderr: float | None = None
    exact_deviation: Fraction | None = None


@dataclass
class ProcessStats:
    mode: str
    height: int
    levels: list[LevelStat]
    trials: int | None = None
    seed: int | None = None
    level_mask: tuple[str, ...] | None = None

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "height": self.height,
            "trials": self.trials,
            "seed": self.seed,
            "levels": [
                {
                    "n": ls.n,
                    "mask": ls.mask,
                    "exact": str(ls.exact) if ls.exact is not None else None,
                    "value": float(ls.exact) if ls.exact is not None else ls.estimate,
                    "stderr": ls.stderr,
                    "increment_mean": ls.increment_mean,
                    "increment_stderr": ls.increment_stderr,
                    "martingale_deviation": (
                        str(ls.exact_deviation) if ls.exact_deviation is not None else None
                    ),
                }
                for ls in self.levels
            ],
        }


def sample_process(
    n_max: int, trials: int, seed: int, level_mask=None
) -> ProcessStats:
    """Monte Carlo estimates of P(X_n > 0) for a (possibly mixed) tower.

    Simulates the per-trial count of fixed nodes level by level: a maximal
    level thins k parents to 2 * Binomial(k, 1/2) children, an order-2
    level keeps or kills everything with one bit.  Deterministic given the
    seed; Philox counter streams keep trials order-independent.
    """
    import numpy as np

    if trials < 1:
        raise ValueError("trials must be at least 1")
    if level_mask is None:
        level_mask = (MAXIMAL,) * n_max
    level_mask = tuple(level_mask)
    if len(level_mask) < n_max:
        raise ValueError("mask shorter than n_max")
    rng = np.random.Generator(np.random.Philox(key=seed))
    alive = np.ones(trials, dtype=np.int64)
    stats = []
    for lvl in range(1, n_max + 1):
        kind = level_mask[lvl - 1]
        prev = alive
        if kind == MAXIMAL:
            alive = 2 * rng.binomial(alive, 0.5)
        elif kind == ORDER2:
            keep = rng.integers(0, 2, size=trials, dtype=np.int64)
            alive = 2 * alive * keep
        else:
            raise ValueError(f"unknown mask entry {kind!r}")
        q = float(np.count_nonzero(alive)) / trials
        stderr = (q * (1 - q) / trials) ** 0.5
        inc = (alive - prev).astype(np.float64)
        stats.append(
            LevelStat(
                lvl,
                kind,
                estimate=q,
                stderr=stderr,
                increment_mean=float(inc.mean()),
                increment_stderr=float(inc.std(ddof=1) / trials**0.5) if trials > 1 else None,
            )
        )
    return ProcessStats(
        mode="sample",
        height=n_max,
        levels=stats,
        trials=trials,
        seed=seed,
        level_mask=level_mask,
    )


def exact_process(n_max: int, mode: str = "recursion") -> ProcessStats:
    """Exact P(X_n > 0) for the all-maximal tower, by recursion or enumeration.

    Levels small enough to enumerate full histories also carry the exact
    martingale deviation (always 0 for this model).
    """
    if mode == "enumeration":
        qs = [qn_by_enumeration(n) for n in range(1, n_max + 1)]
    elif mode == "recursion":
        qs = [qn_recursion(n) for n in range(1, n_max + 1)]
    else:
        raise ValueError("mode must be 'recursion' or 'enumeration'")
    levels = []
    for i, q in enumerate(qs):
        n = i + 1
        dev = martingale_check(n) if n <= 3 else None
        levels.append(LevelStat(n, MAXIMAL, exact=q, exact_deviation=dev))
    return ProcessStats(mode=f"exact-{mode}", height=n_max, levels=levels)
