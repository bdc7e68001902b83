import json
import pathlib

import pytest

from ttc.cli import main

DATA = pathlib.Path(__file__).parent / "data"
FIXTURES = str(DATA / "fixtures.ttc")

NAIVE_N = """
transducer naive_n {
  input { a:1, e:0 }
  output { f:2, e:0, e':0 }
  initial p
  rules {
    p(a(x1)) -> f(p'(x1), p''(x1));
    p'(e) -> e;
    p''(e) -> e | e';
  }
}
"""


@pytest.fixture
def naive_file(tmp_path):
    path = tmp_path / "naive.ttc"
    path.write_text(NAIVE_N, encoding="utf-8")
    return str(path)


def run_cli(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


class TestCheck:
    def test_functional_chain_json(self, capsys):
        status, out, _ = run_cli(
            capsys, "-w", FIXTURES, "check", "--chain", "copying", "--max-size", "4", "--format", "json"
        )
        assert status == 0
        doc = json.loads(out)
        assert doc["status"] == "functional-up-to-bound"
        assert doc["bound"] == 4
        assert doc["counterexample"] is None

    def test_not_functional_exit_code(self, capsys, naive_file):
        status, out, _ = run_cli(capsys, "-w", naive_file, "check", "--machine", "naive_n", "--format", "json")
        assert status == 1
        doc = json.loads(out)
        assert doc["status"] == "not-functional"
        assert doc["counterexample"]["input"] == "a(e)"
        assert sorted(doc["counterexample"]["outputs"]) == ["f(e,e')", "f(e,e)"]

    def test_text_format(self, capsys):
        status, out, _ = run_cli(capsys, "-w", FIXTURES, "check", "--chain", "deleting")
        assert status == 0
        assert "functional-up-to-bound" in out

    def test_lookahead_machine_target(self, capsys):
        status, out, _ = run_cli(
            capsys, "-w", FIXTURES, "check", "--machine", "quadratic_la", "--max-size", "3"
        )
        assert status == 0
        assert "functional-up-to-bound" in out


class TestRun:
    def test_machine_outputs(self, capsys, naive_file):
        status, out, _ = run_cli(capsys, "-w", naive_file, "run", "--machine", "naive_n", "--input", "a(e)")
        assert status == 0
        assert sorted(out.splitlines()) == ["f(e,e')", "f(e,e)"]

    def test_chain_outputs(self, capsys):
        status, out, _ = run_cli(capsys, "-w", FIXTURES, "run", "--chain", "copying", "--input", "a(e)")
        assert status == 0
        assert out.strip() == "f(e,e)"

    def test_lookahead_machine(self, capsys):
        status, out, _ = run_cli(
            capsys, "-w", FIXTURES, "run", "--machine", "quadratic_la", "--input", "a(e)", "--format", "json"
        )
        assert status == 0
        assert json.loads(out)["outputs"] == ["f(e,e)"]

    def test_empty_translation(self, capsys):
        status, out, _ = run_cli(capsys, "-w", FIXTURES, "run", "--chain", "deleting", "--input", "a(e,e)")
        assert status == 0
        assert out.strip() == "(empty)"


class TestTrace:
    def test_text(self, capsys):
        status, out, _ = run_cli(capsys, "-w", FIXTURES, "trace", "--machine", "quadratic", "--input", "a(a(e))")
        assert status == 0
        assert out.startswith("q0(a(a(e)))")
        assert "complete" in out

    def test_dot(self, capsys):
        status, out, _ = run_cli(
            capsys, "-w", FIXTURES, "trace", "--machine", "quadratic", "--input", "a(a(e))", "--format", "dot"
        )
        assert status == 0
        assert out.startswith("digraph")
        assert out.count("->") == 6

    def test_branch_flag(self, capsys):
        _, out0, _ = run_cli(capsys, "-w", FIXTURES, "trace", "--machine", "quadratic", "--input", "a(e)")
        _, out1, _ = run_cli(
            capsys, "-w", FIXTURES, "trace", "--machine", "quadratic", "--input", "a(e)", "--branch", "1"
        )
        assert out0 != out1


class TestConstructionCommands:
    def test_domaut(self, capsys):
        status, out, _ = run_cli(capsys, "-w", FIXTURES, "domaut", "--machine", "ex4_t2")
        assert status == 0
        assert "transducer" in out

    def test_hat_json(self, capsys):
        status, out, _ = run_cli(
            capsys, "-w", FIXTURES, "hat", "--t1", "ex4_t1", "--t2", "ex4_t2", "--format", "json"
        )
        assert status == 0
        doc = json.loads(out)
        assert doc["kind"] == "transducer"
        assert doc["initial"] == "(q0,{p0})"

    def test_product(self, capsys):
        status, out, _ = run_cli(capsys, "-w", FIXTURES, "product", "--t1", "copy_t1", "--t2", "copy_t2")
        assert status == 0
        assert "rules" in out

    def test_build_m_reports(self, capsys):
        status, out, _ = run_cli(
            capsys, "-w", FIXTURES, "build-m", "--t1", "ex4_t1", "--t2", "ex4_t2", "--format", "json"
        )
        assert status == 0
        doc = json.loads(out)
        assert doc["kind"] == "lookahead-transducer"
        assert [r["label"] for r in doc["reports"]] == [
            "domain-automaton",
            "restricted-first",
            "triple-product",
            "look-ahead-automaton",
            "look-ahead-transducer",
        ]

    def test_build_m_then_decompose(self, capsys, tmp_path):
        built = tmp_path / "m.ttc"
        status, _, _ = run_cli(
            capsys, "-w", FIXTURES, "build-m", "--t1", "ex4_t1", "--t2", "ex4_t2", "--output", str(built)
        )
        assert status == 0
        # strip the report prefix lines before reparsing
        lines = built.read_text(encoding="utf-8").splitlines()
        start = next(i for i, line in enumerate(lines) if line.startswith(("transducer ", "# ")))
        cleaned = tmp_path / "m_only.ttc"
        cleaned.write_text("\n".join(lines[start:]) + "\n", encoding="utf-8")
        status, out, _ = run_cli(
            capsys, "-w", str(cleaned), "decompose-la", "--machine", "M_ex4_t1_ex4_t2", "--format", "json"
        )
        assert status == 0
        doc = json.loads(out)
        assert set(doc) == {"relabeling", "reader"}

    def test_fuse(self, capsys):
        status, out, _ = run_cli(capsys, "-w", FIXTURES, "fuse", "--t1", "quadratic", "--t2", "quad_out_id")
        assert status == 0
        assert "transducer" in out

    def test_reduce_requires_three(self, capsys):
        status, _, err = run_cli(capsys, "-w", FIXTURES, "reduce", "--chain", "copying")
        assert status == 2
        assert "three stages" in err


class TestSeededMachines:
    def test_seed_injects_random_machines(self, capsys):
        status, out, _ = run_cli(capsys, "--seed", "7", "check", "--chain", "rnd_pair", "--format", "json")
        assert status in (0, 1)
        assert json.loads(out)["status"] in ("functional-up-to-bound", "not-functional")
        status, out, _ = run_cli(capsys, "--seed", "7", "domaut", "--machine", "rnd_t2")
        assert status == 0 and "transducer" in out

    def test_seed_is_deterministic(self, capsys):
        def normalized(text):
            doc = json.loads(text)
            for report in doc.get("reports", ()):
                report["stats"].pop("elapsed_ms", None)
            return doc

        _, out1, _ = run_cli(capsys, "--seed", "11", "check", "--chain", "rnd_chain3", "--format", "json")
        _, out2, _ = run_cli(capsys, "--seed", "11", "check", "--chain", "rnd_chain3", "--format", "json")
        assert normalized(out1) == normalized(out2)


class TestErrors:
    def test_unknown_machine(self, capsys):
        status, _, err = run_cli(capsys, "-w", FIXTURES, "run", "--machine", "ghost", "--input", "e")
        assert status == 2
        assert "ghost" in err

    def test_syntax_error_in_workspace(self, capsys, tmp_path):
        bad = tmp_path / "bad.ttc"
        bad.write_text("transducer oops {", encoding="utf-8")
        status, _, err = run_cli(capsys, "-w", str(bad), "check", "--chain", "x")
        assert status == 2
        assert "error" in err

    def test_bad_input_tree(self, capsys):
        status, _, err = run_cli(capsys, "-w", FIXTURES, "run", "--machine", "quadratic", "--input", "zz(e)")
        assert status == 2

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "out.json"
        status, out, _ = run_cli(
            capsys,
            "-w",
            FIXTURES,
            "check",
            "--chain",
            "copying",
            "--format",
            "json",
            "--output",
            str(target),
        )
        assert status == 0
        assert out == ""
        assert json.loads(target.read_text())["status"] == "functional-up-to-bound"
