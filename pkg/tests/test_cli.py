"""CLI: flags, reports, exit codes, machine-readable round-trip."""

import json

import pytest

from logflat.cli import run


def capture(capsys, argv):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestLogpic:
    def test_spec_example(self, capsys):
        code, out, _ = capture(
            capsys,
            ["logpic", "--ring", "Q(sqrt -5)", "--D", "(2,1+w)", "--div", "1/2*(2,1+w)"],
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["schema_version"] == 1
        assert rep["result"]["class"]["order"] == 4
        assert rep["result"]["class"]["fractional_part"]["(2, 1+w)"] == "1/2"

    def test_without_divisor(self, capsys):
        code, out, _ = capture(capsys, ["logpic", "--ring", "Z", "--D", "(5)"])
        assert code == 0
        rep = json.loads(out)
        assert rep["result"]["pic"]["order"] == 1
        assert rep["result"]["frac_target"] == ["Q/Z at (5)"]

    def test_malformed_divisor_exit_2(self, capsys):
        code, out, _ = capture(
            capsys, ["logpic", "--ring", "Z", "--D", "(5)", "--div", "1/2*bogus"]
        )
        assert code == 2
        assert json.loads(out)["error"] == "ParseError"


class TestMun:
    def test_spec_example(self, capsys):
        code, out, _ = capture(capsys, ["mun", "--ring", "Z", "--D", "(5)", "--n", "2"])
        assert code == 0
        rep = json.loads(out)
        assert rep["result"]["order_marked_base"] == 4
        assert rep["result"]["order_punctured_base"] == 4
        assert rep["checks"][0]["verdict"] == "ok"

    def test_empty_marked_set(self, capsys):
        code, out, _ = capture(capsys, ["mun", "--ring", "Z", "--D", "", "--n", "3"])
        assert code == 0
        rep = json.loads(out)
        assert rep["result"]["order_marked_base"] == 1

    def test_quadratic(self, capsys):
        code, out, _ = capture(
            capsys, ["mun", "--ring", "Q(sqrt -5)", "--D", "(2,1+w)", "--n", "2"]
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["result"]["order_marked_base"] == rep["result"]["order_punctured_base"] == 4


class TestCurve:
    def test_spec_example(self, capsys):
        code, out, _ = capture(
            capsys, ["curve", "--E", "[0,-1,1,-10,-20]", "--p", "11"]
        )
        assert code == 0
        rep = json.loads(out)
        red = rep["result"]["reduction"][0]
        assert red["kodaira"] == "I5"
        assert red["component_group"] == [5]
        assert red["pairing_table"]["1,2"] == "2/5"

    def test_all_bad_primes(self, capsys):
        code, out, _ = capture(capsys, ["curve", "--E", "[0,-1,1,-10,-20]"])
        assert code == 0
        rep = json.loads(out)
        assert [r["prime"] for r in rep["result"]["reduction"]] == ["(11)"]

    def test_singular_exit_3(self, capsys):
        code, out, _ = capture(capsys, ["curve", "--E", "[0,0,0,0,0]"])
        assert code == 3
        assert json.loads(out)["error"] == "InvalidInputError"


class TestPair:
    def test_fixture(self, capsys):
        code, out, _ = capture(
            capsys, ["pair", "--E", "[0,-2,0,-3,0]", "--x", "(0,0)", "--y", "(0,0)"]
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["result"]["monodromy_profile"]["(3)"] == "1/2"
        assert all(c["verdict"] == "ok" for c in rep["checks"])

    def test_zero_argument(self, capsys):
        code, out, _ = capture(
            capsys, ["pair", "--E", "[0,-1,1,-10,-20]", "--x", "O", "--y", "(5,5)"]
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["result"]["class"]["trivial"] is True
        assert all(v == "0/1" for v in rep["result"]["monodromy_profile"].values())

    def test_non_torsion_exit_4(self, capsys):
        code, out, _ = capture(
            capsys, ["pair", "--E", "[0,-2,0,2,0]", "--x", "(0,0)", "--y", "(1,1)"]
        )
        assert code == 4
        assert json.loads(out)["error"] == "NonTorsionPointError"


class TestReportHygiene:
    def test_round_trip_bit_for_bit(self, capsys):
        code, out, _ = capture(
            capsys, ["pair", "--E", "[0,-1,1,-10,-20]", "--x", "(5,5)", "--y", "(5,5)"]
        )
        rep = json.loads(out)
        assert json.loads(json.dumps(rep)) == rep

    def test_pretty_renders_same_numbers(self, capsys):
        code, out, err = capture(
            capsys,
            ["--pretty", "pair", "--E", "[0,-2,0,-3,0]", "--x", "(0,0)", "--y", "(0,0)"],
        )
        assert code == 0
        rep = json.loads(out)
        assert "1/2" in err
        for key, val in rep["result"]["monodromy_profile"].items():
            assert val in err
