"""File formats and the command-line interface."""

import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from pcover import formats
from pcover.errors import InputError
from pcover.generators import (TreeInstance, corpus_instance,
                               gen_random_descending_paths)
from pcover.model import make_instance


def test_instance_round_trip():
    inst = make_instance([[1, 0], [1, 1]], [F(1, 2), 3], [F(7, 5), 2], F(3, 2))
    text = formats.render_instance(inst)
    assert formats.parse_instance(text) == inst


def test_instance_round_trip_random():
    for seed in range(6):
        inst = corpus_instance(seed)
        assert formats.parse_instance(formats.render_instance(inst)) == inst


def test_parse_rejects_bad_header():
    with pytest.raises(InputError, match="header"):
        formats.parse_instance("NOPE 1\n1 1\n0\n1\n1\n1\n")


def test_parse_reports_line_numbers():
    text = "PCOV 1\n2 2\n1\n1 1\n1 1\n10\n01\n"
    broken = text.replace("10\n01", "12\n01")
    with pytest.raises(InputError) as err:
        formats.parse_instance(broken)
    assert "line 6" in str(err.value)


def test_parse_truncated_file():
    with pytest.raises(InputError, match="unexpected end"):
        formats.parse_instance("PCOV 1\n2 2\n1\n")


def test_decomposition_round_trip():
    _, dec = gen_random_descending_paths(3, 8, 5, 4)
    text = formats.render_decomposition(dec)
    parsed = formats.parse_decomposition(text, 4, 5)
    assert parsed == dec


def test_tree_round_trip():
    tree = TreeInstance((-1, 0, 0, 1), (F(1), F(2), F(1, 2)),
                        ((1, 2, F(3)), (0, 3, F(1))))
    text = formats.render_tree(tree)
    parsed = formats.parse_tree(text)
    assert parsed.parents == tree.parents
    assert parsed.edge_costs == tree.edge_costs
    assert parsed.demands == tree.demands


def run_cli(*args, cwd):
    return subprocess.run([sys.executable, "-m", "pcover.cli", *args],
                          capture_output=True, text=True, cwd=cwd)


@pytest.fixture()
def workdir(tmp_path):
    return tmp_path


def test_cli_generate_and_solve(workdir):
    out = run_cli("generate", "random", "--seed", "7", "--nodes", "9",
                  "--cover-paths", "5", "--demand-paths", "5",
                  "--out", str(workdir / "fix"), cwd=workdir)
    assert out.returncode == 0, out.stderr
    solved = run_cli("solve", "--input", str(workdir / "fix.pcov"),
                     "--k", "3", "--oracle", "--lp",
                     "--output", str(workdir / "report.json"), cwd=workdir)
    assert solved.returncode == 0, solved.stderr
    doc = json.loads((workdir / "report.json").read_text())
    assert doc["schema"] == 1
    payload = doc["payload"]
    assert payload["audits"]["feasible"] is True
    assert payload["oracle_cost"] is not None
    assert "timings" in doc and "timings" not in payload


def test_cli_generate_deterministic_bytes(workdir):
    for name in ("a", "b"):
        out = run_cli("generate", "gap", "--q", "1",
                      "--out", str(workdir / name), cwd=workdir)
        assert out.returncode == 0, out.stderr
    assert (workdir / "a.pcov").read_bytes() == (workdir / "b.pcov").read_bytes()
    assert (workdir / "a.meta.json").read_bytes() == (workdir / "b.meta.json").read_bytes()


def test_cli_solve_gap_with_oracle(workdir):
    run_cli("generate", "gap", "--q", "1", "--out", str(workdir / "gap"), cwd=workdir)
    solved = run_cli("solve", "--input", str(workdir / "gap.pcov"), "--k", "3",
                     "--oracle", "--output", str(workdir / "r.json"), cwd=workdir)
    assert solved.returncode == 0, solved.stderr
    payload = json.loads((workdir / "r.json").read_text())["payload"]
    assert payload["oracle_cost"] == "15"


def test_cli_malformed_file_exit_2(workdir):
    bad = workdir / "bad.pcov"
    bad.write_text("PCOV 1\n2 2\n1\n1 1\n1 1\n12\n01\n")
    out = run_cli("solve", "--input", str(bad), cwd=workdir)
    assert out.returncode == 2
    assert "line 6" in out.stderr


def test_cli_infeasible_exit_3(workdir):
    text = "PCOV 1\n2 1\n3/2\n1\n1 1\n1\n0\n"
    (workdir / "inf.pcov").write_text(text)
    out = run_cli("solve", "--input", str(workdir / "inf.pcov"), cwd=workdir)
    assert out.returncode == 3


def test_cli_size_guard_exit_5(workdir):
    inst = make_instance([[1] * 25], [1] * 25, [1], 1)
    (workdir / "wide.pcov").write_text(formats.render_instance(inst))
    out = run_cli("solve", "--input", str(workdir / "wide.pcov"), "--oracle",
                  cwd=workdir)
    assert out.returncode == 5


def test_cli_solve_with_decomposition(workdir):
    out = run_cli("generate", "multicut", "--seed", "3",
                  "--out", str(workdir / "mc"), cwd=workdir)
    assert out.returncode == 0, out.stderr
    solved = run_cli("solve", "--input", str(workdir / "mc.pcov"),
                     "--decomposition", str(workdir / "mc.dec"),
                     "--output", str(workdir / "mc.json"), cwd=workdir)
    assert solved.returncode == 0, solved.stderr
    payload = json.loads((workdir / "mc.json").read_text())["payload"]
    assert payload["audits"]["feasible_for_original"] is True


def test_cli_solve_with_absorb(workdir):
    run_cli("generate", "multicut", "--seed", "4", "--out", str(workdir / "mc"),
            cwd=workdir)
    solved = run_cli("solve", "--input", str(workdir / "mc.pcov"),
                     "--decomposition", str(workdir / "mc.dec"),
                     "--absorb", "2", "2", "--oracle",
                     "--output", str(workdir / "mc.json"), cwd=workdir)
    assert solved.returncode == 0, solved.stderr
    payload = json.loads((workdir / "mc.json").read_text())["payload"]
    cost = F(payload["cost"])
    assert cost <= 2 * F(payload["oracle_cost"])


def test_cli_verify_commands(workdir):
    run_cli("generate", "random", "--seed", "5", "--nodes", "8",
            "--cover-paths", "5", "--demand-paths", "5",
            "--out", str(workdir / "r"), cwd=workdir)
    for check in ("tb", "sgf", "lp-duality"):
        out = run_cli("verify", check, "--input", str(workdir / "r.pcov"),
                      cwd=workdir)
        assert out.returncode == 0, (check, out.stdout, out.stderr)
    out = run_cli("verify", "equitable", "--q", "2", cwd=workdir)
    assert out.returncode == 0, out.stderr


def test_cli_verify_sgf_fails_on_odd_cycle(workdir):
    inst = make_instance([[1, 1, 0], [0, 1, 1], [1, 0, 1]], [1, 1, 1],
                         [1, 1, 1], 0)
    (workdir / "odd.pcov").write_text(formats.render_instance(inst))
    out = run_cli("verify", "sgf", "--input", str(workdir / "odd.pcov"),
                  cwd=workdir)
    assert out.returncode == 4
    assert "no greedy standard form" in out.stdout


def test_cli_experiment_blackbox(workdir):
    out = run_cli("experiment", "blackbox", "--q", "3", "--alpha", "1", "--tu",
                  "--output", str(workdir / "bb.json"), cwd=workdir)
    assert out.returncode == 0, out.stderr
    assert "ratio=4/3" in out.stdout
    payload = json.loads((workdir / "bb.json").read_text())["payload"]
    assert payload["ratio"] == "4/3"


def test_cli_experiment_gap(workdir):
    out = run_cli("experiment", "gap", "--qmax", "1",
                  "--output", str(workdir / "gap.json"), cwd=workdir)
    assert out.returncode == 0, out.stderr
    payload = json.loads((workdir / "gap.json").read_text())["payload"]
    assert payload["rows"][0]["lp"] == "13"
    assert payload["rows"][0]["ip"] == "15"


def test_report_payload_is_stable():
    payload = {"b": 1, "a": [2, 3]}
    assert formats.render_payload(payload) == formats.render_payload(dict(payload))
    assert formats.render_payload(payload).startswith('{\n  "a"')
