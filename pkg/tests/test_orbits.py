"""Tests for orbit factor tables, prime classification, rigidity, certificates."""

import pytest

from critorbit.exactnum import Dyadic, valuation
from critorbit.parsing import parse_poly
from critorbit.polys import IntPoly, QuadMap
from critorbit.orbits import (
    ISOLATED,
    NONDIVISOR,
    RECURRENT,
    certificate_scan,
    classify_prime,
    maximality_certificate,
    orbit_factor_table,
    verify_rigid_divisibility,
)


class TestOrbitFactorTable:
    def test_x2_plus_5(self):
        table = orbit_factor_table(QuadMap(0, 5), None, 4)
        assert [e.numerator_factored.factors for e in table] == [
            {5: 1},
            {2: 1, 3: 1, 5: 1},
            {5: 1, 181: 1},
            {2: 1, 3: 1, 5: 1, 23: 1, 1187: 1},
        ]
        assert [sorted(e.new_primes) for e in table] == [[5], [2, 3], [181], [23, 1187]]
        assert all(e.complete for e in table)

    def test_x2_plus_3(self):
        table = orbit_factor_table(QuadMap(0, 3), None, 4)
        assert [e.value for e in table] == [Dyadic(3), Dyadic(12), Dyadic(147), Dyadic(21612)]
        assert table[2].numerator_factored.factors == {3: 1, 7: 2}
        assert table[3].numerator_factored.factors == {2: 2, 3: 1, 1801: 1}

    def test_postcritically_finite_constant_tail(self):
        table = orbit_factor_table(QuadMap(0, -2), None, 3)
        assert [e.value for e in table] == [Dyadic(-2), Dyadic(2), Dyadic(2)]
        assert [sorted(e.new_primes) for e in table] == [[2], [], []]

    def test_budget_degradation_recorded(self):
        # big orbit numerators keep composite cofactors under a tiny budget
        table = orbit_factor_table(QuadMap(0, 7), None, 7, effort=5)
        assert any(not e.complete for e in table)
        for e in table:
            fv = e.numerator_factored
            assert fv.value() == e.value.num

    def test_half_integer_values_reconstruct(self):
        table = orbit_factor_table(QuadMap(-1, -1), None, 3)
        assert [str(e.value) for e in table] == ["-5/4", "29/16", "121/256"]
        assert table[2].numerator_factored.factors == {11: 2}


class TestClassifyPrime:
    def test_isolated(self):
        cls = classify_prime(QuadMap(-1, 1), None, 7)
        assert cls.verdict == ISOLATED
        assert cls.hit_indices == (3,)  # f^3(gamma) = 0 mod 7, tail only

    def test_recurrent(self):
        assert classify_prime(QuadMap(0, 5), None, 3).verdict == RECURRENT

    def test_nondivisor(self):
        assert classify_prime(QuadMap(0, 5), None, 7).verdict == NONDIVISOR

    def test_p2_unsupported(self):
        with pytest.raises(ValueError):
            classify_prime(QuadMap(0, 5), None, 2)

    def test_composite_rejected(self):
        with pytest.raises(ValueError):
            classify_prime(QuadMap(0, 5), None, 15)

    def test_gamma_zero_all_divisors_recurrent(self):
        # with gamma = 0 every prime dividing a table entry is recurrent
        for k in (2, 3, 5, 6, 7):
            table = orbit_factor_table(QuadMap(0, k), None, 6)
            primes = {p for e in table for p in e.numerator_factored.factors if p != 2 and p < 200}
            for p in primes:
                assert classify_prime(QuadMap(0, k), None, p).verdict == RECURRENT, (k, p)

    def test_recurrent_has_second_hit_within_period(self):
        # recurrent => 0 on the cycle => divisibility recurs within one period
        f = QuadMap(0, 5)
        for p in (3, 5):
            cls = classify_prime(f, None, p)
            assert cls.verdict == RECURRENT
            first = min(h for h in cls.hit_indices)
            # walk on from the first hit: must hit again within cycle_length steps
            x = (-f.b) % p * pow(2, -1, p) % p
            for _ in range(first):
                x = (x * x + f.b * x + f.c) % p
            again = False
            for _ in range(cls.cycle_length):
                x = (x * x + f.b * x + f.c) % p
                if x == 0:
                    again = True
                    break
            assert again

    def test_matches_direct_valuations(self):
        # verdicts agree with actual divisibility of the dyadic orbit values
        f = QuadMap(0, 5)
        table = orbit_factor_table(f, None, 6)
        for p in (3, 5, 181, 23, 1187):
            cls = classify_prime(f, None, p)
            divides_some = any(e.value.num % p == 0 for e in table)
            assert (cls.verdict != NONDIVISOR) == divides_some or cls.verdict != NONDIVISOR


class TestRigidDivisibility:
    def test_x2_plus_5(self):
        rep = verify_rigid_divisibility(QuadMap(0, 5), None, 4)
        assert rep.verified and rep.violations == ()

    def test_x2_plus_3(self):
        rep = verify_rigid_divisibility(QuadMap(0, 3), None, 4)
        assert rep.verified
        # v_3 = 1 at every level, v_2(t_2) = v_2(t_4) = 2
        assert valuation(147, 3) == 1 and valuation(21612, 3) == 1
        assert valuation(12, 2) == valuation(21612, 2) == 2

    def test_violation_for_half_integer_gamma(self):
        rep = verify_rigid_divisibility(QuadMap(-1, 1), None, 3)
        assert not rep.verified
        assert (1, 3, 3) in rep.violations  # v_3(3/4) = 1 but v_3(217/256) = 0
        assert rep.first_violation == (1, 2, 3)

    def test_lemma_holds_for_pure_square_family(self):
        for k in range(1, 11):
            rep = verify_rigid_divisibility(QuadMap(0, k), None, 6, effort=20_000)
            assert rep.verified, (k, rep.violations)

    def test_requires_depth_2(self):
        with pytest.raises(ValueError):
            verify_rigid_divisibility(QuadMap(0, 5), None, 1)


class TestMaximalityCertificates:
    def test_x2_plus_5_witnesses(self):
        f = QuadMap(0, 5)
        table = orbit_factor_table(f, None, 4)
        assert maximality_certificate(f, None, 1, table).status == "not-applicable"
        c2 = maximality_certificate(f, None, 2, table)
        c3 = maximality_certificate(f, None, 3, table)
        c4 = maximality_certificate(f, None, 4, table)
        assert (c2.certificate.p, c3.certificate.p, c4.certificate.p) == (3, 181, 23)
        assert c2.certificate.vp_at_n == 1

    def test_revalidation_from_scratch(self):
        f = QuadMap(0, 5)
        table = orbit_factor_table(f, None, 4)
        for n in (2, 3, 4):
            cert = maximality_certificate(f, None, n, table).certificate
            assert cert.revalidate(f)

    def test_forged_certificate_fails_revalidation(self):
        from critorbit.orbits import MaximalityCertificate

        bad = MaximalityCertificate(f="x^2 + 5", g="x", n=3, p=5, vp_at_n=1,
                                    checked_earlier_levels=(1, 2))
        assert not bad.revalidate(QuadMap(0, 5))

    def test_postcritically_finite_has_none(self):
        f = QuadMap(0, -2)
        table = orbit_factor_table(f, None, 3)
        res = maximality_certificate(f, None, 3, table)
        assert res.status == "none-found"

    def test_scan(self):
        scan = certificate_scan(QuadMap(0, 5), None, 4)
        assert scan.certified_levels == (2, 3, 4)
        assert scan.fraction == 1.0
        assert scan.incomplete_levels == ()

    def test_scan_x2_plus_3_level_4_witness(self):
        scan = certificate_scan(QuadMap(0, 3), None, 4)
        res = scan.result(4)
        assert res.status == "certified" and res.certificate.p == 1801

    def test_scan_empty_for_x2_minus_2(self):
        scan = certificate_scan(QuadMap(0, -2), None, 6)
        assert scan.certified_levels == ()

    def test_smallest_witness_preferred(self):
        # level 2 of x^2+5 has candidates 2 (excluded), 3, 5 (fails earlier-level check)
        scan = certificate_scan(QuadMap(0, 5), None, 2)
        assert scan.result(2).certificate.p == 3
