import csv

import numpy as np
import pytest

from constants.kernel_sources import LENNARD_JONES
from main import main

LIQUID = """
mode = simulate
n_per_side = 6
density = 0.8442
temperature = 1.0
steps = 20
sample_interval = 5
snapshot_interval = 10
"""

FCC = """
mode = analyze-boa
lattice = fcc
n_per_side = 3
density = 1.0
"""


def write_config(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def read_rows(path):
    with path.open() as handle:
        return list(csv.reader(handle))


@pytest.fixture(autouse=True)
def run_in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def test_simulate_writes_thermo_trajectory_and_final_frame(tmp_path):
    config = write_config(tmp_path, "liquid.cfg", LIQUID)
    out = tmp_path / "liquid"
    assert main(["simulate", "--config", str(config), "--out", str(out)]) == 0

    thermo = read_rows(out / "thermo.csv")
    assert [row[0] for row in thermo[1:]] == ["0", "5", "10", "15", "20"]
    assert len((out / "traj.xyz").read_text().splitlines()) == 3 * (216 + 2)
    assert (out / "final.xyz").read_text().startswith("216\nstep=20 ")
    assert (out / "pairgenie.log").is_file()


def test_simulate_with_kernel_file_matches_native(tmp_path):
    kernel = tmp_path / "lj.k"
    kernel.write_text(LENNARD_JONES.code)
    native = write_config(tmp_path, "native.cfg", LIQUID.replace("steps = 20", "steps = 2"))
    dsl = write_config(
        tmp_path, "dsl.cfg", native.read_text() + f"force_kernel = {str(kernel)}\n"
    )
    assert main(["simulate", "--config", str(native), "--out", "native"]) == 0
    assert main(["simulate", "--config", str(dsl), "--out", "dsl"]) == 0

    native_rows = read_rows(tmp_path / "native" / "thermo.csv")
    dsl_rows = read_rows(tmp_path / "dsl" / "thermo.csv")
    assert len(native_rows) == len(dsl_rows)
    for a, b in zip(native_rows[1:], dsl_rows[1:]):
        np.testing.assert_allclose(
            [float(v) for v in a[2:5]], [float(v) for v in b[2:5]], rtol=1e-10
        )


def test_analyze_boa_on_fcc(tmp_path):
    config = write_config(tmp_path, "boa.cfg", FCC)
    assert main(["analyze-boa", "--config", str(config), "--out", "boa"]) == 0

    rows = read_rows(tmp_path / "boa" / "boa.csv")
    assert rows[0] == ["id", "x", "y", "z", "Q_4", "Q_6"]
    assert len(rows) == 108 + 1
    summary = read_rows(tmp_path / "boa" / "boa_summary.csv")
    means = {row[0]: float(row[1]) for row in summary[1:]}
    assert means["4"] == pytest.approx(0.19094, abs=1e-4)
    assert means["6"] == pytest.approx(0.57452, abs=1e-4)


def test_analyze_cna_on_fcc(tmp_path):
    config = write_config(tmp_path, "cna.cfg", FCC.replace("analyze-boa", "analyze-cna"))
    assert main(["analyze-cna", "--config", str(config), "--out", "cna"]) == 0

    counts = {row[0]: row[1] for row in read_rows(tmp_path / "cna" / "cna_summary.csv")[1:]}
    assert counts["fcc"] == "108"
    assert counts["unclassified"] == "0"
    rows = read_rows(tmp_path / "cna" / "cna.csv")
    assert {row[-1] for row in rows[1:]} == {"fcc"}


def test_analyze_final_frame_of_a_run(tmp_path):
    simulate = write_config(tmp_path, "liquid.cfg", LIQUID)
    assert main(["simulate", "--config", str(simulate), "--out", "run"]) == 0
    analyze = write_config(
        tmp_path, "frame.cfg", "mode = analyze-boa\ninput = run/final.xyz\nboa_rc = 1.5\n"
    )
    assert main(["analyze-boa", "--config", str(analyze), "--out", "frame"]) == 0
    assert len(read_rows(tmp_path / "frame" / "boa.csv")) == 216 + 1


def test_bench_writes_table(tmp_path):
    config = write_config(
        tmp_path,
        "bench.cfg",
        "mode = bench\nn_per_side = 6\ndensity = 0.8442\nbench_sizes = 216\n"
        "bench_backends = cell_list\nbench_workers = 1, 2\nbench_steps = 2\n",
    )
    assert main(["bench", "--config", str(config), "--out", "bench"]) == 0
    rows = read_rows(tmp_path / "bench" / "bench.csv")
    assert [row[:3] for row in rows[1:]] == [["cell_list", "1", "216"], ["cell_list", "2", "216"]]


def test_config_error_exits_with_one(tmp_path, capsys):
    config = write_config(tmp_path, "bad.cfg", "mode = simulate\nn_per_side = 4\ndensity = 0.8\nrc = -1\n")
    assert main(["simulate", "--config", str(config)]) == 1
    assert "rc" in capsys.readouterr().err


def test_snapshot_without_density_needs_a_cutoff(tmp_path, capsys):
    simulate = write_config(tmp_path, "liquid.cfg", LIQUID.replace("steps = 20", "steps = 1"))
    assert main(["simulate", "--config", str(simulate), "--out", "run"]) == 0
    analyze = write_config(tmp_path, "frame.cfg", "mode = analyze-cna\ninput = run/final.xyz\n")
    assert main(["analyze-cna", "--config", str(analyze)]) == 1
    assert "cna_rc" in capsys.readouterr().err


def test_missing_config_exits_with_one(tmp_path):
    assert main(["bench", "--config", str(tmp_path / "nope.cfg")]) == 1
