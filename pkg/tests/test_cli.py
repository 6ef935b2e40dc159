"""Command-line behavior: exit codes, determinism, formats, verification."""

from __future__ import annotations

import json

import pytest

from qmaze import verify
from qmaze.circuits import build_gt_comparator
from qmaze.cli import main, parse_config, UsageError
from qmaze.maze import parse_maze


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# generate


def test_generate_round_trips(tmp_path, capsys):
    out = tmp_path / "maze.txt"
    code, _, _ = run_cli(capsys, "generate", "--m", "2", "--seed", "7", "--out", str(out))
    assert code == 0
    maze = parse_maze(out.read_text())
    assert maze.size == 2
    # Writing it again produces the identical file.
    out2 = tmp_path / "maze2.txt"
    run_cli(capsys, "generate", "--m", "2", "--seed", "7", "--out", str(out2))
    assert out.read_bytes() == out2.read_bytes()


def test_generate_rejects_small_m(capsys):
    code, _, err = run_cli(capsys, "generate", "--m", "1")
    assert code == 2
    assert "m must be" in err


def test_generate_16x16_valid(tmp_path, capsys):
    out = tmp_path / "m16.txt"
    code, _, _ = run_cli(capsys, "generate", "--m", "16", "--seed", "3", "--out", str(out))
    assert code == 0
    parse_maze(out.read_text())  # validator is the oracle


# ---------------------------------------------------------------------------
# solve


@pytest.fixture
def example_maze_file(tmp_path):
    path = tmp_path / "example.txt"
    path.write_text("2 0 0 1 1\n61\nc1\n")
    return path


def test_solve_example_maze(example_maze_file, tmp_path, capsys):
    out = tmp_path / "trace.csv"
    code, stdout, _ = run_cli(
        capsys, "solve", "--maze", str(example_maze_file), "--n", "2",
        "--seed", "4", "--cutoff0", "0", "--out", str(out),
    )
    assert code == 0
    assert "best path: SE (|1001>) fitness 4" in stdout
    assert "optimal: yes" in stdout
    lines = out.read_text().splitlines()
    assert lines[0] == "round,cutoff,k,theta,r,outcome_index,outcome_fitness,new_cutoff"
    assert len(lines) >= 2


def test_solve_byte_identical_reruns(example_maze_file, tmp_path, capsys):
    outs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        code, stdout, _ = run_cli(
            capsys, "solve", "--maze", str(example_maze_file), "--n", "2",
            "--seed", "123", "--out", str(out),
        )
        assert code == 0
        outs.append(out.read_bytes() + stdout.encode())
    assert outs[0] == outs[1]


def test_solve_json_byte_identical(example_maze_file, tmp_path, capsys):
    blobs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        code, _, _ = run_cli(
            capsys, "solve", "--maze", str(example_maze_file), "--n", "2",
            "--seed", "9", "--format", "json", "--out", str(out),
        )
        assert code == 0
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]
    doc = json.loads(blobs[0])
    assert doc["status"] == "converged-optimal"
    assert doc["best"]["letters"] == "SE"
    assert doc["best"]["bits"] == "1001"


def test_solve_degenerate_reports_status(example_maze_file, tmp_path, capsys):
    code, stdout, _ = run_cli(
        capsys, "solve", "--maze", str(example_maze_file), "--n", "2",
        "--cutoff0", "4", "--strictness", "strict", "--seed", "1",
        "--out", str(tmp_path / "t.csv"),
    )
    assert code == 0  # degenerate is a status, not an error
    assert "status: degenerate" in stdout


def test_solve_from_generated_maze(tmp_path, capsys):
    code, stdout, _ = run_cli(
        capsys, "solve", "--m", "3", "--n", "4", "--seed", "2",
        "--out", str(tmp_path / "t.csv"),
    )
    assert code == 0
    assert "status:" in stdout


def test_solve_requires_inputs(capsys):
    code, _, err = run_cli(capsys, "solve", "--n", "2")
    assert code == 2
    assert "--maze" in err or "--m" in err


def test_solve_with_config_file(example_maze_file, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        f"maze = {example_maze_file}\nn = 2\nseed = 4\ncutoff0 = 0\n"
        "samples = 3\nformat = csv\n# comment line\n"
    )
    out = tmp_path / "via_config.csv"
    code, stdout, _ = run_cli(capsys, "solve", "--config", str(cfg), "--out", str(out))
    assert code == 0
    direct = tmp_path / "direct.csv"
    run_cli(
        capsys, "solve", "--maze", str(example_maze_file), "--n", "2",
        "--seed", "4", "--cutoff0", "0", "--out", str(direct),
    )
    assert out.read_bytes() == direct.read_bytes()


def test_config_rejects_unknown_key():
    with pytest.raises(UsageError, match="unknown key"):
        parse_config("n = 2\nbogus = 1\n")
    with pytest.raises(UsageError, match="duplicate"):
        parse_config("n = 2\nn = 3\n")
    with pytest.raises(UsageError, match="bad value"):
        parse_config("n = two\n")


def test_solve_missing_maze_file(tmp_path, capsys):
    code, _, err = run_cli(capsys, "solve", "--maze", str(tmp_path / "nope.txt"),
                           "--n", "2", "--out", str(tmp_path / "t.csv"))
    assert code == 2
    assert "cannot read maze" in err


def test_solve_rejects_bad_maze_file(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 0 0 1 1\n63\nc9\n")  # cycle
    code, _, err = run_cli(capsys, "solve", "--maze", str(bad), "--n", "2",
                           "--out", str(tmp_path / "t.csv"))
    assert code == 2
    assert "not a tree" in err


# ---------------------------------------------------------------------------
# dynamics


def test_dynamics_peak_at_optimum(tmp_path, capsys):
    out = tmp_path / "dyn.csv"
    code, _, _ = run_cli(
        capsys, "dynamics", "--n", "2", "--k", "1", "--rmax", "6", "--out", str(out)
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "r,predicted,simulated"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 7
    for _, predicted, simulated in rows:
        assert abs(float(predicted) - float(simulated)) < 1e-9
    probs = [float(p) for _, p, _ in rows]
    # First-period peak sits within one round of the closed-form optimum (2).
    assert max(range(4), key=lambda r: probs[r]) in (2, 3)


def test_dynamics_all_marked(tmp_path, capsys):
    out = tmp_path / "dyn.csv"
    code, _, _ = run_cli(
        capsys, "dynamics", "--n", "1", "--k", "4", "--rmax", "3", "--out", str(out)
    )
    assert code == 0
    for line in out.read_text().strip().splitlines()[1:]:
        assert float(line.split(",")[1]) == pytest.approx(1.0)


def test_dynamics_rejects_bad_k(capsys):
    code, _, err = run_cli(capsys, "dynamics", "--n", "1", "--k", "5")
    assert code == 2
    assert "--k" in err


# ---------------------------------------------------------------------------
# verify


def test_verify_passes_at_small_caps(capsys):
    code, stdout, _ = run_cli(capsys, "verify", "--nmax", "2", "--mmax", "3",
                              "--widthmax", "4")
    assert code == 0
    assert stdout.count("PASS") == 6
    assert "FAIL" not in stdout


def test_verify_cap_exceeded(capsys):
    code, _, err = run_cli(capsys, "verify", "--nmax", "9")
    assert code == 2
    assert "nmax" in err


def test_verify_reports_counterexample_for_corrupted_comparator():
    def corrupted(width, cutoff=None, *, source="constant", variant="prefix"):
        circ = build_gt_comparator(width, cutoff, source=source, variant=variant)
        if width == 3 and cutoff == 2 and source == "constant" and variant == "prefix":
            circ.gates = circ.gates[:-1]  # drop a cleanup gate
        return circ

    result = verify.verify_comparator(width_max=3, builder=corrupted)
    assert not result.passed
    assert result.counterexample is not None
    assert "w=3" in result.counterexample


# ---------------------------------------------------------------------------
# resources and sweep


def test_resources_table(capsys):
    code, stdout, _ = run_cli(capsys, "resources", "--n", "2", "--m", "2")
    assert code == 0
    assert "path" in stdout
    assert "-> PASS" in stdout
    assert "FAIL" not in stdout.replace("-> PASS", "")


def test_resources_json_schema(tmp_path, capsys):
    out = tmp_path / "res.json"
    code, _, _ = run_cli(
        capsys, "resources", "--n", "2", "--m", "2", "--format", "json", "--out", str(out)
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"predicted", "measured", "fits"}
    assert doc["predicted"]["register_widths"] == doc["measured"]["register_widths"]
    assert doc["predicted"]["register_widths"]["path"] == 4
    assert all(fit["passed"] for fit in doc["fits"].values())


def test_sweep_success_fraction(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, stdout, _ = run_cli(
        capsys, "sweep", "--m", "3", "--n", "2", "--runs", "50", "--seed", "1",
        "--epsilon", "0.05", "--out", str(out),
    )
    assert code == 0
    assert "success fraction:" in stdout
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "run,status,rounds_used,best_fitness,f_max,success"
    assert len(lines) == 51
    fraction = float(stdout.split("success fraction: ")[1].split(" ")[0])
    assert fraction >= 1 - 0.05


def test_sweep_deterministic(tmp_path, capsys):
    blobs = []
    for name in ("s1.json", "s2.json"):
        out = tmp_path / name
        code, _, _ = run_cli(
            capsys, "sweep", "--m", "2", "--n", "2", "--runs", "5", "--seed", "3",
            "--format", "json", "--out", str(out),
        )
        assert code == 0
        blobs.append(out.read_bytes())
    assert blobs[0] == blobs[1]
