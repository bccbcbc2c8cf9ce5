"""Tests for the expression parser, printer, and CLI surface."""

import json
import random

import pytest

from critorbit.cli import main
from critorbit.parsing import PolyParseError, parse_poly, poly_to_string
from critorbit.polys import IntPoly


class TestParser:
    def test_examples(self):
        assert parse_poly("x^2 - x + 1").coeffs == (1, -1, 1)
        assert parse_poly("(x-2)^2 + 2").coeffs == (6, -4, 1)

    def test_implicit_multiplication_rejected(self):
        with pytest.raises(PolyParseError) as exc:
            parse_poly("x^2+10x+17")
        assert exc.value.pos == 6

    def test_error_positions(self):
        with pytest.raises(PolyParseError) as exc:
            parse_poly("x^2 + ")
        assert exc.value.pos == 6  # EOF
        with pytest.raises(PolyParseError):
            parse_poly("x^")
        with pytest.raises(PolyParseError):
            parse_poly("x^-2")  # exponent must be a nonnegative literal
        with pytest.raises(PolyParseError):
            parse_poly("2.5*x")

    def test_whitespace_insensitive(self):
        assert parse_poly(" x ^ 2 + 5 ") == parse_poly("x^2+5")

    def test_unary_minus(self):
        assert parse_poly("-x^2 + 1").coeffs == (1, 0, -1)
        assert parse_poly("- (x + 1)").coeffs == (-1, -1)

    def test_nested(self):
        p = parse_poly("((x - 1) * (x + 1))^2")
        assert p == parse_poly("x^4 - 2*x^2 + 1")

    def test_printer_round_trip_random(self):
        rng = random.Random(19)
        for _ in range(60):
            deg = rng.randrange(0, 9)
            coeffs = [rng.randrange(-(10**6), 10**6 + 1) for _ in range(deg)]
            coeffs.append(rng.randrange(1, 10**6))
            p = IntPoly(coeffs)
            assert parse_poly(poly_to_string(p)) == p
        assert parse_poly(poly_to_string(IntPoly(()))) == IntPoly(())

    def test_printer_style(self):
        assert poly_to_string(parse_poly("x^2+5")) == "x^2 + 5"
        assert poly_to_string(parse_poly("x^2 - x - 1")) == "x^2 - x - 1"
        assert poly_to_string(parse_poly("3*x^3")) == "3*x^3"


class TestCLI:
    def run(self, capsys, *argv):
        code = main(list(argv))
        out = capsys.readouterr().out
        return code, out

    def test_schema_keys(self, capsys):
        code, out = self.run(capsys, "classify", "--f", "x^2+5")
        assert code == 0
        doc = json.loads(out)
        assert set(doc) == {"input", "config", "results", "version"}
        fams = doc["results"]["families"]
        assert fams == [{"family": 3, "k": 5, "excluded": False, "form": "x^2 + k"}]

    def test_orbit_regression(self, capsys):
        code, out = self.run(capsys, "orbit", "--f", "x^2+5", "--depth", "4")
        assert code == 0
        entries = json.loads(out)["results"]["entries"]
        assert [e["factors"] for e in entries] == [
            {"5": 1},
            {"2": 1, "3": 1, "5": 1},
            {"5": 1, "181": 1},
            {"2": 1, "3": 1, "5": 1, "23": 1, "1187": 1},
        ]
        assert entries[1]["classifications"]["3"] == "recurrent"

    def test_orbit_with_translate(self, capsys):
        code, out = self.run(capsys, "orbit", "--f", "x^2-4", "--g", "x-2", "--depth", "3")
        assert code == 0
        entries = json.loads(out)["results"]["entries"]
        assert [e["value"] for e in entries] == ["-6", "10", "138"]
        assert entries[2]["factors"] == {"2": 1, "3": 1, "23": 1}

    def test_galois_recursion(self, capsys):
        code, out = self.run(capsys, "galois", "--mode", "recursion", "--height", "3")
        assert code == 0
        levels = json.loads(out)["results"]["levels"]
        assert levels[-1]["exact"] == "39/128"

    def test_galois_sample_masked(self, capsys):
        code, out = self.run(
            capsys, "galois", "--mode", "sample", "--height", "3",
            "--trials", "20000", "--seed", "9", "--mask", "MOM",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["config"]["seed"] == 9
        assert len(doc["results"]["levels"]) == 3

    def test_density_cli_with_csv(self, capsys, tmp_path):
        csv_path = tmp_path / "rows.csv"
        code, out = self.run(
            capsys, "density", "--f", "x^2", "--a0", "2", "--limit", "100",
            "--per-prime", str(csv_path),
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["results"]["members"] == 1
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == "p,member,steps,cycle_len"
        assert lines[1].startswith("2,1,")
        assert len(lines) == 26  # header + 25 primes

    def test_bound_cli(self, capsys):
        code, out = self.run(capsys, "bound", "--f", "x^2+1", "--depth", "2", "--limit", "1000")
        assert code == 0
        fr = json.loads(out)["results"]["fractions"]
        assert fr[0]["n"] == 1 and 0.4 < fr[0]["fraction"] < 0.6

    def test_stability_cli(self, capsys):
        code, out = self.run(capsys, "stability", "--f", "x^2 - x - 1", "--depth", "3")
        assert code == 0
        levels = json.loads(out)["results"]["levels"]
        assert levels[-1]["verdict"] == "reducible-with-factors"

    def test_certify_cli(self, capsys):
        code, out = self.run(capsys, "certify", "--f", "x^2+5", "--depth", "4")
        assert code == 0
        res = json.loads(out)["results"]
        assert res["certified_levels"] == [2, 3, 4]
        assert res["rigid_divisibility"]["verified"] is True

    def test_usage_error_exit_1(self, capsys):
        assert main(["density", "--f", "x^2"]) == 1 or main(["nonsense"]) == 1

    def test_parse_error_exit_1(self, capsys):
        assert main(["classify", "--f", "x^2+10x+17"]) == 1

    def test_nonquadratic_rejected(self, capsys):
        assert main(["classify", "--f", "x^3+1"]) == 1
        assert main(["stability", "--f", "2*x^2+1", "--depth", "2"]) == 1

    def test_inconclusive_budget_exit_2(self, capsys):
        # effort 0 leaves cofactors unknown; certificates cannot be found
        code = main(["certify", "--f", "x^2+5", "--depth", "3", "--effort", "0"])
        assert code == 2

    def test_text_format(self, capsys):
        code, out = self.run(capsys, "classify", "--f", "x^2+5", "--format", "text")
        assert code == 0 and "family: 3" in out

    def test_config_echoed(self, capsys):
        _, out = self.run(capsys, "density", "--f", "x^2+1", "--a0", "0",
                          "--limit", "100", "--seed", "42")
        doc = json.loads(out)
        assert doc["config"]["seed"] == 42
        assert doc["config"]["mr_base_set"][0] == 2

    def test_golden_schema(self, capsys):
        # key layout of a full report, pinned
        _, out = self.run(capsys, "galois", "--mode", "recursion", "--height", "2")
        doc = json.loads(out)
        assert list(sorted(doc)) == ["config", "input", "results", "version"]
        assert set(doc["results"]) == {"mode", "height", "trials", "seed", "levels"}
        assert set(doc["results"]["levels"][0]) == {
            "n", "mask", "exact", "value", "stderr",
            "increment_mean", "increment_stderr", "martingale_deviation",
        }
        assert doc["results"]["levels"][0]["martingale_deviation"] == "0"

    @pytest.mark.parametrize(
        "name,argv",
        [
            ("classify_x2p5", ["classify", "--f", "x^2+5"]),
            ("galois_recursion_h2", ["galois", "--mode", "recursion", "--height", "2"]),
            ("orbit_x2p5_d2", ["orbit", "--f", "x^2+5", "--depth", "2"]),
        ],
    )
    def test_golden_files(self, capsys, name, argv):
        import pathlib

        code, out = self.run(capsys, *argv)
        assert code == 0
        golden = pathlib.Path(__file__).parent / "golden" / f"{name}.json"
        assert json.loads(out) == json.loads(golden.read_text())
