"""Tests for the density module: sieve, membership, bounds, reports."""

import math
import random

import pytest

from critorbit.parsing import parse_poly
from critorbit.polys import IntPoly, QuadMap, iterate_poly
from critorbit.density import (
    _linear_members,
    _primes_list,
    _roots_mod,
    _spf_array,
    chebotarev_upper_bound,
    density_estimate,
    divides_orbit,
    orbit_prefix,
    preimage_exists_mod_p,
    prime_sieve,
    zero_periodic_density,
)
from critorbit.treemodel import qn_recursion


def visited_set_member(f: IntPoly, a0: int, p: int) -> bool:
    """Oracle: exact-prefix analysis plus a visited-set walk mod p."""
    pre = orbit_prefix(f, None, a0)
    for _, v in pre.pairs:
        if v % p == 0:
            return True
    if pre.start_value is None:
        return False
    x = pre.start_value % p
    seen = set()
    while x not in seen:
        if x == 0:
            return True
        seen.add(x)
        x = f.evaluate(x) % p
    return False


class TestPrimeSieve:
    def test_small(self):
        assert list(prime_sieve(10)) == [2, 3, 5, 7]
        assert len(list(prime_sieve(100))) == 25

    def test_million(self):
        assert len(_primes_list(10**6)) == 78498

    def test_matches_naive(self):
        def naive(X):
            out = []
            for n in range(2, X + 1):
                if all(n % d for d in range(2, math.isqrt(n) + 1)):
                    out.append(n)
            return out

        assert list(prime_sieve(2000)) == naive(2000)

    def test_segment_boundaries(self):
        full = list(prime_sieve(70000))
        assert full == sorted(set(full))
        assert 65537 in full


class TestDividesOrbit:
    def test_x2_plus_1(self):
        f = parse_poly("x^2+1")
        assert divides_orbit(f, 0, 5)  # orbit 1, 2, 5
        assert not divides_orbit(f, 0, 3)  # 1, 2, 2, ... mod 3

    def test_hasse_sequence(self):
        assert divides_orbit(parse_poly("2*x - 1"), 2, 3)  # 2^1 + 1 = 3

    def test_nonzero_term_proviso(self):
        # f = x^2 - 4, a0 = 2: orbit 2, 0, -4, 12, 140, ...; the 0 term is skipped
        f = parse_poly("x^2 - 4")
        assert divides_orbit(f, 2, 2)  # 2 itself
        assert divides_orbit(f, 2, 7)  # 140 = 2^2 * 5 * 7
        assert divides_orbit(f, 2, 3)  # 12

    def test_all_zero_orbit_has_no_divisors(self):
        f = parse_poly("x^2")
        assert not divides_orbit(f, 0, 5)
        assert not divides_orbit(f, 0, 2)

    def test_brent_agrees_with_visited_set(self):
        rng = random.Random(13)
        primes = [p for p in _primes_list(10**4)]
        for _ in range(10):
            f = IntPoly([rng.randrange(-9, 10), rng.randrange(-9, 10), 1])
            a0 = rng.randrange(-6, 7)
            pre = orbit_prefix(f, None, a0)
            from critorbit import _backend

            members, rows = _backend.orbit_member_batch(
                list(f.coeffs), None, pre.pairs, pre.start_index, pre.start_value, primes, True
            )
            oracle = sum(visited_set_member(f, a0, p) for p in primes)
            assert members == oracle
            for p, m, _, _ in rows[:50]:
                assert bool(m) == visited_set_member(f, a0, p)


class TestDensityEstimate:
    def test_powers_of_two(self):
        rep = density_estimate(parse_poly("x^2"), 2, 10**4)
        assert rep.members == 1  # only p = 2

    def test_translated_set(self):
        # g = x - 2 over f = x^2 - 4 starting at 0: g(f^n(0)) = f^n(0) - 2
        f = parse_poly("x^2 - 4")
        g = parse_poly("x - 2")
        rep = density_estimate(f, 0, 200, g=g, collect=True)
        rows = {p: bool(m) for p, m, _, _ in rep.per_prime}
        # oracle: walk the translated values mod p with a visited set
        for p in [q for q in _primes_list(200) if q > 2]:
            seen = set()
            x = 0 % p
            hit = False
            # g(a_0) = -2 is a nonzero term
            if (x - 2) % p == 0:
                hit = True
            while x not in seen and not hit:
                seen.add(x)
                x = (x * x - 4) % p
                if (x - 2) % p == 0:
                    hit = True
            assert rows[p] == hit, p

    def test_linear_fast_path_matches_walk(self):
        f = parse_poly("2*x - 1")
        fast = density_estimate(f, 2, 3000)
        walk = density_estimate(f, 2, 3000, collect=True)  # collect forces the walk
        assert fast.members == walk.members

    def test_linear_translation_maps(self):
        # x + 3 from 1: arithmetic progression hits every residue unless p | 3
        rep = density_estimate(parse_poly("x + 3"), 1, 100)
        primes = _primes_list(100)
        expected = sum(1 for p in primes if 3 % p != 0 or 1 % p == 0)
        assert rep.members == expected

    def test_reflection_map(self):
        # x -> -x + 5 from 2: orbit {2, 3}
        rep = density_estimate(parse_poly("-x + 5"), 2, 100)
        assert rep.members == 2  # p = 2 and p = 3

    def test_thread_count_invariance(self):
        f = parse_poly("x^2 + 3")
        a = density_estimate(f, 1, 10**4, threads=1)
        b = density_estimate(f, 1, 10**4, threads=4)
        assert (a.members, a.primes_tested) == (b.members, b.primes_tested)
        ra = density_estimate(f, 1, 3000, threads=1, collect=True)
        rb = density_estimate(f, 1, 3000, threads=3, collect=True)
        assert ra.per_prime == rb.per_prime

    def test_per_prime_rows(self):
        rep = density_estimate(parse_poly("x^2+1"), 0, 50, collect=True)
        rows = {p: (m, s, l) for p, m, s, l in rep.per_prime}
        assert rows[5][0] == 1 and rows[5][1] == 3  # a_3 = 5 is the first hit
        assert rows[3][0] == 0 and rows[3][2] >= 1  # cycle length recorded

    def test_report_fields(self):
        rep = density_estimate(parse_poly("x^2+1"), 0, 100, config={"seed": 1})
        assert rep.limit == 100 and rep.primes_tested == 25
        assert 0 <= rep.estimate <= 1
        assert rep.members <= rep.primes_tested
        d = rep.as_dict()
        assert set(d) >= {"f", "a0", "limit", "primes_tested", "members", "estimate"}


class TestZeroPeriodic:
    def test_examples(self):
        rep = zero_periodic_density(parse_poly("x^2+5"), 100, collect=True)
        flags = dict(rep.flags)
        assert flags[3] == 1  # 0 -> 2 -> 0
        assert flags[7] == 0  # 0 -> 5 -> 2 -> 2

    def test_x_squared_always_periodic(self):
        rep = zero_periodic_density(parse_poly("x^2"), 100)
        assert rep.periodic == rep.primes_tested

    def test_periodicity_equals_membership_from_zero(self):
        # for a0 = 0 the two sets coincide: 0 recurs iff 0 divides some a_n;
        # this cross-validates two independent walk pipelines
        f = parse_poly("x^2+1")
        zp = zero_periodic_density(f, 10**4)
        de = density_estimate(f, 0, 10**4)
        assert zp.fraction == de.estimate

    def test_counts_against_membership_flags(self):
        f = parse_poly("x^2+1")
        zp = zero_periodic_density(f, 500, collect=True)
        de = density_estimate(f, 0, 500, collect=True)
        assert dict(zp.flags) == {p: m for p, m, _, _ in de.per_prime}


class TestPreimageTrees:
    def test_examples(self):
        f = QuadMap(0, 1)
        assert preimage_exists_mod_p(f, IntPoly.x(), 2, 5)  # f^2(1) = 5
        assert not preimage_exists_mod_p(f, IntPoly.x(), 1, 3)  # -1 nonresidue mod 3
        # depth 0 is root existence of g
        assert preimage_exists_mod_p(f, parse_poly("x - 1"), 0, 7)
        assert not preimage_exists_mod_p(f, parse_poly("x^2 + 1"), 0, 7)

    def test_rejects_p2_and_depth_cap(self):
        with pytest.raises(ValueError):
            preimage_exists_mod_p(QuadMap(0, 1), IntPoly.x(), 1, 2)
        with pytest.raises(ValueError):
            preimage_exists_mod_p(QuadMap(0, 1), IntPoly.x(), 21, 5)

    def test_brute_force_oracle(self):
        rng = random.Random(17)
        for _ in range(20):
            f = QuadMap(rng.randrange(-6, 7), rng.randrange(-6, 7))
            n = rng.randrange(1, 4)
            p = rng.choice([3, 5, 7, 11, 13, 17, 19])
            h = iterate_poly(f.poly, n)
            oracle = any(h.evaluate(x) % p == 0 for x in range(p))
            assert preimage_exists_mod_p(f, IntPoly.x(), n, p) == oracle, (f, n, p)

    def test_general_g_oracle(self):
        g = parse_poly("x^2 - 2")
        f = QuadMap(0, 1)
        from critorbit.polys import compose

        for p in (5, 7, 11, 13, 17, 23):
            for n in (1, 2):
                h = compose(g, iterate_poly(f.poly, n))
                oracle = any(h.evaluate(x) % p == 0 for x in range(p))
                assert preimage_exists_mod_p(f, g, n, p) == oracle, (p, n)

    def test_roots_mod(self):
        assert _roots_mod(parse_poly("x^2 - 1"), 7) == [1, 6]
        assert _roots_mod(parse_poly("x^2 + 1"), 7) == []
        assert _roots_mod(parse_poly("7*x + 7"), 7) is None  # vanishes identically
        big = parse_poly("(x - 10) * (x - 20) * (x - 30) * (x + 1)")
        assert _roots_mod(big, 101) == sorted([10, 20, 30, 100])


class TestChebotarevBound:
    def test_x2_plus_1_matches_model(self):
        rep = chebotarev_upper_bound(QuadMap(0, 1), None, 4, 10**4)
        fr = dict(rep.fractions)
        assert abs(fr[1] - 0.5) < 0.03
        assert abs(fr[2] - 0.375) < 0.03

    def test_nonincreasing(self):
        rep = chebotarev_upper_bound(QuadMap(0, 5), None, 6, 10**4)
        vals = [fr for _, fr in rep.fractions]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_upper_bounds_density(self):
        # membership density never exceeds the preimage-solvability fraction
        for fs, a0s in ((parse_poly("x^2+5"), (1, 2, 3)),
                        (parse_poly("x^2+3"), (1, 2, 3)),
                        (parse_poly("x^2 - 3*x + 3"), (1, 2, 3))):
            f = QuadMap.from_poly(fs)
            bound = chebotarev_upper_bound(f, None, 6, 10**5)
            for a0 in a0s:
                est = density_estimate(fs, a0, 10**5).estimate
                for _, fr in bound.fractions:
                    assert est <= fr + 0.01, (fs, a0)

    def test_general_g_path(self):
        rep = chebotarev_upper_bound(QuadMap(0, 1), parse_poly("x - 1"), 3, 2000)
        vals = [fr for _, fr in rep.fractions]
        assert all(0 <= v <= 1 for v in vals)
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_depth_8_tracks_model_at_million(self):
        rep = chebotarev_upper_bound(QuadMap(0, 1), None, 8, 10**6)
        assert dict(rep.fractions)[8] < float(qn_recursion(8)) + 0.05


class TestLinearInternals:
    def test_order_based_matches_walk_for_many_maps(self):
        primes = list(_primes_list(2000))
        spf = _spf_array(2000)
        rng = random.Random(23)
        from critorbit import _purekernel

        for _ in range(12):
            b = rng.choice([2, 3, -2, 5, 7, -4])
            c = rng.randrange(-9, 10)
            a0 = rng.randrange(-9, 10)
            f = IntPoly([c, b])
            pre = orbit_prefix(f, None, a0)
            fast = _linear_members(f, pre, primes, spf)
            walk, _ = _purekernel.orbit_member_batch(
                list(f.coeffs), None, pre.pairs, pre.start_index, pre.start_value, primes
            )
            assert fast == walk, (b, c, a0)
