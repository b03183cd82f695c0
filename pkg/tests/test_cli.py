import io
from contextlib import redirect_stdout
from pathlib import Path

import pytest

from ordkit.cli import main

INSTANCES = Path(__file__).parent / "instances"


def run(*argv):
    buffer = io.StringIO()
    with redirect_stdout(buffer):
        status = main(list(argv))
    return status, buffer.getvalue()


class TestCalculator:
    def test_eval_normalizes(self):
        assert run("eval", "1+w") == (0, "w\n")

    def test_cmp(self):
        assert run("cmp", "w^2", "w*9+5") == (0, "greater\n")
        assert run("cmp", "w", "w") == (0, "equal\n")
        assert run("cmp", "5", "w") == (0, "less\n")

    def test_eval_syntax_error(self):
        status, out = run("eval", "w*0")
        assert status == 1
        assert out.splitlines()[0] == "syntax-error"


class TestCodingCommands:
    def test_pair_and_unpair(self):
        status, out = run("pair", "--alpha", "w", "1", "2")
        assert status == 0
        code = out.strip()
        status, out = run("unpair", "--alpha", "w", code)
        assert (status, out) == (0, "1\n2\n")

    def test_unpair_off_range(self):
        assert run("unpair", "--alpha", "w^2", "w^2") == (0, "none\n")

    def test_fincode(self):
        status, out = run("fincode", "--alpha", "w", "2,5")
        assert status == 0 and out.strip().isdigit()
        assert run("fincode", "--alpha", "w", "") == (0, "0\n")

    def test_cnfbij_roundtrip(self):
        status, down = run("cnfbij", "--alpha", "w", "--dir", "down", "w^3+w")
        assert status == 0
        status, up = run("cnfbij", "--alpha", "w", "--dir", "up", down.strip())
        assert (status, up) == (0, "w^3 + w\n")

    def test_domain_error_status(self):
        status, out = run("pair", "--alpha", "5", "1", "1")
        assert status == 1
        assert out.splitlines()[0] == "bound-violation"

    def test_fuel_exhaustion_reachable(self):
        status, out = run("cnfbij", "--alpha", "w", "--dir", "down", "w^2", "--fuel", "0")
        assert status == 1
        assert out.splitlines()[0] == "fuel-exhausted"


class TestUsageErrors:
    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as err:
            run("eval", "--bogus", "w")
        assert err.value.code == 2

    def test_missing_subcommand(self):
        with pytest.raises(SystemExit) as err:
            run()
        assert err.value.code == 2


class TestEngineCommands:
    def test_reduce_case1(self):
        status, out = run(
            "reduce",
            "--instance",
            str(INSTANCES / "case1_identity.txt"),
            "--verify-below",
            "w*5",
        )
        assert status == 0
        lines = out.splitlines()
        assert lines[0] == "case=case1 k=0 delta=w^2"
        assert any(line.startswith("target=") for line in lines)

    def test_reduce_case2(self):
        status, out = run(
            "reduce",
            "--instance",
            str(INSTANCES / "case2_tower.txt"),
            "--verify-below",
            "w^3",
        )
        assert status == 0
        assert out.splitlines()[0] == "case=case2 delta=w^w"

    def test_reduce_precondition_error(self):
        status, out = run(
            "reduce",
            "--instance",
            str(INSTANCES / "degenerate_delta_omega.txt"),
            "--verify-below",
            "w",
        )
        assert status == 1
        assert out.splitlines()[0] == "precondition-violated"

    def test_reduce_coverage_error(self, tmp_path):
        path = tmp_path / "gap.txt"
        path.write_text(
            "carrier: m:[0,w^2)\nalpha: w^2\n"
            "row 0: m -> monotone [w,w^2)\n"  # never reaches [0, w)
        )
        status, out = run("reduce", "--instance", str(path), "--verify-below", "w")
        assert status == 1
        assert out.splitlines()[0] == "coverage-broken"

    def test_refute_modes(self):
        for mode in ("pset", "infpset"):
            status, out = run(
                "refute",
                "--instance",
                str(INSTANCES / "refute_demo.txt"),
                "--mode",
                mode,
                "--check",
                "20",
            )
            assert status == 0
            lines = out.splitlines()
            assert lines[0].startswith(f"mode={mode}")
            assert "recheck=ok" in lines[1]

    def test_decode_wo(self, tmp_path):
        path = tmp_path / "rel.txt"
        path.write_text("0 1\n0 2\n1 2\n")
        assert run("decode-wo", str(path)) == (0, "3\n")
        path.write_text("bits:\n")
        assert run("decode-wo", str(path)) == (0, "0\n")

    def test_selftest(self):
        status, out = run("selftest", "--size", "2")
        assert status == 0
        assert "csb_bijective" in out and "0 failures" in out


class TestDeterminism:
    FULL_SET = [
        ("eval", "w^(w*2)*3 + w^2 + 5"),
        ("eval", "1+w"),
        ("cmp", "w^2", "w*9+5"),
        ("pair", "--alpha", "w^2", "w", "1"),
        ("unpair", "--alpha", "w^2", "w + 2"),
        ("fincode", "--alpha", "w", "2,5"),
        ("cnfbij", "--alpha", "w^2", "--dir", "down", "w^(w*2)"),
        (
            "reduce",
            "--instance",
            str(INSTANCES / "case2_tower.txt"),
            "--verify-below",
            "w^2",
        ),
        (
            "refute",
            "--instance",
            str(INSTANCES / "refute_demo.txt"),
            "--mode",
            "pset",
            "--check",
            "10",
        ),
        ("selftest", "--size", "2"),
    ]

    def test_byte_identical_across_runs(self):
        first = [run(*argv) for argv in self.FULL_SET]
        second = [run(*argv) for argv in self.FULL_SET]
        assert first == second
