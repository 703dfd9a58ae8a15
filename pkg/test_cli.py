"""
test_cli.py
命令行测试：synth -> build -> slice -> persistence -> distance -> baseline 全流程与退出码。
"""
import json

import pytest

from eedag import main
from ingestion.csv_parser import load_dataset, save_dataset
from ingestion.synthetic import phase_locked_specs, synthesize_collection


@pytest.fixture
def sine_csv(tmp_path):
    path = tmp_path / "sine.csv"
    assert main(["synth", "--kind", "sine", "--points", "257", "--seed", "1", "--out", str(path)]) == 0
    return path


@pytest.fixture
def noisy_csv(tmp_path):
    path = tmp_path / "noisy.csv"
    argv = ["synth", "--kind", "sine", "--points", "257", "--noise", "0.05", "--bumps", "2",
            "--seed", "2", "--out", str(path)]
    assert main(argv) == 0
    return path


@pytest.fixture
def phase_csv(tmp_path):
    path = tmp_path / "phase.csv"
    save_dataset(synthesize_collection(phase_locked_specs(n_series=4, n_points=65), seed=0), str(path))
    return path


@pytest.fixture
def phase_noisy_csv(tmp_path):
    path = tmp_path / "phase_noisy.csv"
    specs = phase_locked_specs(n_series=4, n_points=65, noise_amplitude=0.02, n_noise_bumps=1)
    save_dataset(synthesize_collection(specs, seed=3), str(path))
    return path


def test_synth_writes_loadable_csv(sine_csv):
    ds = load_dataset(str(sine_csv))
    assert ds.names == ["sine"]
    assert len(ds.grid) == 257


def test_synth_to_stdout(capsys):
    assert main(["synth", "--kind", "cosine", "--points", "16", "--series", "c"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "time,c"
    assert len(out.splitlines()) == 17


def test_synth_dense_noise_follows_seed(capsys):
    outputs = []
    for seed in ("1", "2"):
        assert main(["synth", "--points", "32", "--noise", "0.3", "--seed", seed]) == 0
        outputs.append(capsys.readouterr().out)
    assert main(["synth", "--points", "32"]) == 0
    clean = capsys.readouterr().out
    assert outputs[0] != outputs[1]
    assert clean not in outputs


def test_build_and_slice(tmp_path, sine_csv):
    dag_json, dag_dot = tmp_path / "dag.json", tmp_path / "dag.dot"
    assert main(["build", str(sine_csv), "--json", str(dag_json), "--dot", str(dag_dot)]) == 0
    data = json.loads(dag_json.read_text(encoding="utf-8"))
    assert data["series"] == ["sine"]
    assert len(data["vertices"]) == 4
    assert dag_dot.read_text(encoding="utf-8").startswith("digraph")

    slice_dot, slice_json = tmp_path / "slice.dot", tmp_path / "slice.json"
    argv = ["slice", str(dag_json), "--epsilon", "0.75", "--mode", "comparable",
            "--dot", str(slice_dot), "--json", str(slice_json)]
    assert main(argv) == 0
    sliced = json.loads(slice_json.read_text(encoding="utf-8"))
    # 只有两个内部极值的寿命 ≈ 1 超过 0.75
    assert len(sliced["vertices"]) == 2


def test_build_with_normalize_to_stdout(capsys, sine_csv):
    assert main(["build", str(sine_csv), "--normalize", "0,1"]) == 0
    data = json.loads(capsys.readouterr().out)
    weights = [v["weight"] for v in data["vertices"]]
    assert max(weights) == pytest.approx(0.5, abs=1e-3)


def test_persistence_csv(tmp_path, sine_csv):
    out = tmp_path / "pd.csv"
    assert main(["persistence", str(sine_csv), "--series", "sine", "--csv", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "birth,death,index"
    assert len(lines) == 3
    # 全局极小值 (3π/2) 是本质点
    assert [line.split(",")[1] for line in lines[1:]].count("inf") == 1


def test_distance_report(tmp_path, sine_csv, noisy_csv):
    report = tmp_path / "d.json"
    assert main(["distance", str(sine_csv), str(noisy_csv), "--report", str(report), "--cap", "16"]) == 0
    data = json.loads(report.read_text(encoding="utf-8"))
    assert data["total"] > 0
    assert data["total"] == pytest.approx(data["node_term"] + data["edge_term"])
    assert set(data["alignments"]) == {"sine"}


def test_baseline_report_is_byte_identical(tmp_path, sine_csv, noisy_csv):
    outputs = []
    for k in range(2):
        report = tmp_path / f"b{k}.json"
        argv = ["baseline", str(sine_csv), str(noisy_csv), "--samples", "4", "--seed", "5",
                "--shift", "--report", str(report)]
        assert main(argv) == 0
        outputs.append(report.read_bytes())
    assert outputs[0] == outputs[1]
    data = json.loads(outputs[0])
    assert len(data["samples"]) == 4
    assert data["config"]["permute"] is False


def test_distance_swap_applies_before_series_subset(tmp_path, phase_csv):
    totals = {}
    for swap in ("s1,s3", "s3,s4"):
        report = tmp_path / f"swap-{swap}.json"
        argv = ["distance", str(phase_csv), str(phase_csv), "--swap", swap, "--series", "s1,s2",
                "--tie-policy", "diagonal-first", "--report", str(report)]
        assert main(argv) == 0
        data = json.loads(report.read_text(encoding="utf-8"))
        assert set(data["alignments"]) == {"s1", "s2"}
        totals[swap] = data["total"]
    # s3 的数据换进子集后距离变大；子集外的交换不影响
    assert totals["s1,s3"] > 0
    assert totals["s3,s4"] == 0


@pytest.mark.parametrize("extra", [["--swap", "s1"], ["--swap", "s1,missing"], ["--series", "s1,s9"], ["--series", ","]])
def test_distance_bad_name_options_exit_with_one(phase_csv, extra):
    assert main(["distance", str(phase_csv), str(phase_csv)] + extra) == 1


def test_baseline_subset_report(tmp_path, phase_csv, phase_noisy_csv):
    report = tmp_path / "subset.json"
    argv = ["baseline", str(phase_csv), str(phase_noisy_csv), "--samples", "3", "--seed", "1",
            "--subset-size", "2", "--report", str(report)]
    assert main(argv) == 0
    data = json.loads(report.read_text(encoding="utf-8"))
    assert len(data["reference"]) == len(data["scrambled"]) == 3
    assert all(len(names) == 2 for names in data["subsets"])
    assert {"t_statistic", "p_value"} <= set(data)
    assert data["config"]["subset_size"] == 2


def test_baseline_subset_larger_than_dataset_exits_with_one(phase_csv):
    argv = ["baseline", str(phase_csv), str(phase_csv), "--samples", "2", "--seed", "0", "--subset-size", "5"]
    assert main(argv) == 1


def test_baseline_single_series_cannot_permute(sine_csv):
    argv = ["baseline", str(sine_csv), str(sine_csv), "--samples", "2", "--seed", "0"]
    assert main(argv) == 1


@pytest.mark.parametrize("argv", [
    ["build", "does-not-exist.csv"],
    ["build", "__CSV__", "--normalize", "1"],
    ["persistence", "__CSV__", "--series", "missing"],
    ["synth", "--points", "4"],
])
def test_bad_input_exits_with_one(argv, sine_csv):
    argv = [str(sine_csv) if a == "__CSV__" else a for a in argv]
    assert main(argv) == 1


def test_non_utf8_input_exits_with_one(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_bytes(b"time,s\n0,\xff\xfe\n1,2\n")
    assert main(["build", str(path)]) == 1
    assert main(["distance", str(path), str(path)]) == 1


def test_no_command_prints_help(capsys):
    assert main([]) == 0
    assert "eedag" in capsys.readouterr().out
