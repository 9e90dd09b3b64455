"""CLI exit codes, table output, CSV writing, and byte determinism."""

import json
import math

import pytest

from pixelprobe.cli import main, write_results
from pixelprobe.harness import SweepRow, TrialStats


def write_defect_scenario(tmp_path, name="scenario.json"):
    path = tmp_path / name
    path.write_text(
        json.dumps(
            {
                "array": [1.0] * 8,
                "defects": [{"index": 3, "new_value": 0.5}],
                "config": {"epsilon": 0.5, "delta": 0.2, "max_defects": 1, "cq": 1.0},
            }
        )
    )
    return str(path)


def write_rare_scenario(tmp_path, name="rare.json"):
    path = tmp_path / name
    path.write_text(
        json.dumps(
            {
                "array": [0.8] * 64,
                "config": {"delta": 0.1},
                "rare_search": {"prior_p": 0.1, "pattern": "array"},
            }
        )
    )
    return str(path)


def test_missing_scenario_file_exits_2(tmp_path, capsys):
    missing = str(tmp_path / "absent.json")
    code = main(["defect-test", "--scenario", missing, "--trials", "5", "--seed", "1"])
    assert code == 2
    assert missing in capsys.readouterr().err


def test_invalid_scenario_field_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"array": [1.0], "config": {"epsilon": 9}}))
    code = main(["defect-test", "--scenario", str(path), "--trials", "5", "--seed", "1"])
    assert code == 2
    assert "config.epsilon" in capsys.readouterr().err


def test_bad_flag_values_exit_2(tmp_path):
    scenario = write_defect_scenario(tmp_path)
    with pytest.raises(SystemExit) as excinfo:
        main(["defect-test", "--scenario", scenario, "--trials", "0", "--seed", "1"])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit) as excinfo:
        main(["sweep", "--ns", "16,8", "--scenario", scenario, "--trials", "2", "--seed", "1"])
    assert excinfo.value.code == 2


def test_defect_test_runs_and_is_byte_deterministic(tmp_path, capsys):
    scenario = write_defect_scenario(tmp_path)
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    argv = ["defect-test", "--scenario", scenario, "--trials", "40", "--seed", "9"]
    assert main(argv + ["--out", str(out_a)]) == 0
    first_stdout = capsys.readouterr().out
    assert main(argv + ["--out", str(out_b)]) == 0
    second_stdout = capsys.readouterr().out
    assert first_stdout == second_stdout
    assert out_a.read_bytes() == out_b.read_bytes()
    header, row = out_a.read_text().splitlines()
    assert header == "trials,successes,point_estimate,ci_low,ci_high,mean_absorptions"
    assert row.split(",")[0] == "40"


def test_defect_test_classical_flag(tmp_path):
    scenario = write_defect_scenario(tmp_path)
    assert main(
        ["defect-test", "--scenario", scenario, "--trials", "10", "--seed", "3", "--classical"]
    ) == 0


def test_rare_search_completeness_via_cli(tmp_path, capsys):
    scenario = write_rare_scenario(tmp_path)
    out = tmp_path / "rare.csv"
    code = main(
        ["rare-search", "--scenario", scenario, "--trials", "25", "--seed", "4", "--out", str(out)]
    )
    assert code == 0
    row = out.read_text().splitlines()[1].split(",")
    assert row[0] == "25"
    assert row[1] == "25"  # actual equals pattern: always present
    assert main(
        ["rare-search", "--scenario", scenario, "--trials", "10", "--seed", "4", "--classical"]
    ) == 0


def test_sweep_csv_shape_and_determinism(tmp_path):
    scenario = write_defect_scenario(tmp_path)
    out_a = tmp_path / "sweep_a.csv"
    out_b = tmp_path / "sweep_b.csv"
    argv = ["sweep", "--ns", "8,16", "--scenario", scenario, "--trials", "10", "--seed", "2"]
    assert main(argv + ["--out", str(out_a)]) == 0
    assert main(argv + ["--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    lines = out_a.read_text().splitlines()
    assert lines[0] == "n,quantum_absorptions,classical_absorptions,ratio,rounds,shots"
    assert len(lines) == 3
    assert lines[1].split(",")[0] == "8"
    assert lines[2].split(",")[0] == "16"


def test_overlap_tail_cli(tmp_path):
    out_a = tmp_path / "tail_a.csv"
    out_b = tmp_path / "tail_b.csv"
    argv = ["overlap-tail", "--n", "4", "--samples", "2000", "--seed", "5"]
    assert main(argv + ["--out", str(out_a)]) == 0
    assert main(argv + ["--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    assert main(["overlap-tail", "--n", "1", "--samples", "100", "--seed", "5"]) == 0


def test_validate_oracle_cli(tmp_path, capsys):
    out = tmp_path / "oracle.csv"
    code = main(
        ["validate-oracle", "--n", "4", "--samples", "20000", "--seed", "7", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "outcome,probability,frequency,z_score"
    assert len(lines) == 1 + 2 * 4 + 1  # absorb per pixel, proj1, beam per pixel
    capsys.readouterr()


def test_validate_oracle_mismatch_exits_1(monkeypatch, capsys):
    import numpy as np

    import pixelprobe.cli as cli

    def biased_codes(theoretical, actual, rounds, rng):
        return np.zeros(rounds, dtype=np.int64)  # every round "absorbed at pixel 0"

    monkeypatch.setattr(cli, "sample_round_codes", biased_codes)
    code = main(["validate-oracle", "--n", "4", "--samples", "5000", "--seed", "1"])
    assert code == 1
    assert "4 sigma" in capsys.readouterr().err


def test_nonterminating_run_exits_1(tmp_path, monkeypatch, capsys):
    import pixelprobe.cli as cli

    def hangs(*args, **kwargs):
        raise RuntimeError("rare search did not settle within 10 rounds (0/3 successes)")

    monkeypatch.setattr(cli, "run_trials", hangs)
    scenario = write_rare_scenario(tmp_path)
    code = main(["rare-search", "--scenario", scenario, "--trials", "5", "--seed", "1"])
    assert code == 1
    assert "did not settle" in capsys.readouterr().err


def test_write_results_round_trip_and_edges(tmp_path):
    stats = TrialStats(
        trials=40,
        successes=13,
        point_estimate=13 / 40,
        ci_low=0.19492,
        ci_high=0.48033,
        mean_absorptions=123.456789012345,
        absorption_ci=(100.0, 150.0),
        confidence=0.95,
    )
    path = tmp_path / "stats.csv"
    write_results([stats], path)
    header, row = path.read_text().splitlines()
    assert header.startswith("trials,")
    parsed = row.split(",")
    assert int(parsed[0]) == 40
    assert float(parsed[5]) == pytest.approx(stats.mean_absorptions, rel=1e-11)

    sweep_path = tmp_path / "sweep.csv"
    write_results([], sweep_path, kind="sweep")
    assert sweep_path.read_text() == "n,quantum_absorptions,classical_absorptions,ratio,rounds,shots\n"
    one_row = SweepRow(8, 1.5, 3.0, 0.5, 100, 200)
    write_results([one_row], sweep_path, kind="sweep")
    assert len(sweep_path.read_text().splitlines()) == 2

    with pytest.raises(ValueError):
        write_results([], tmp_path / "x.csv")
    with pytest.raises(ValueError):
        write_results([one_row], tmp_path / "x.csv", kind="mystery")


def test_write_results_twelve_significant_digits(tmp_path):
    value = math.pi * 1e-3
    row = SweepRow(8, value, 3.0, value / 3.0, 100, 200)
    path = tmp_path / "digits.csv"
    write_results([row], path, kind="sweep")
    text = path.read_text().splitlines()[1]
    reread = float(text.split(",")[1])
    assert reread == pytest.approx(value, rel=1e-11)
