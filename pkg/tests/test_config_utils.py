from pathlib import Path

import pytest

from custom_types.backend import Backend
from custom_types.errors import ConfigError
from custom_types.lattice_type import LatticeType
from custom_types.run_mode import RunMode

BENCHMARK = """
# 10^6 particle Lennard-Jones liquid
mode = simulate
npart = 1000000
density = 0.8442
rc = 2.5
delta = 0.25
reuse = 20
steps = 10000
"""


def test_benchmark_configuration(config_utils):
    config = config_utils.parse_config(BENCHMARK)
    assert config.mode_enum is RunMode.SIMULATE
    assert config.n_per_side == 100
    assert config.npart == 1000000
    assert config.density == 0.8442
    assert (config.rc, config.delta, config.reuse, config.steps) == (2.5, 0.25, 20, 10000)
    assert config.lattice_enum is LatticeType.SC
    assert config.backend_enum is Backend.NEIGHBOUR_LIST
    assert config.seed == 12345
    assert config.output_dir == Path("out")


def test_integrator_range_and_params(config_utils):
    config = config_utils.parse_config(BENCHMARK)
    ir = config_utils.integrator_range(config, steps=5)
    assert (ir.n_max, ir.dt, ir.reuse_limit, ir.delta) == (5, 0.005, 20, 0.25)
    assert config_utils.lj_params(config).r_c == 2.5
    assert config_utils.thermostat_params(config) is None


def test_empty_file_lists_missing_keys(config_utils):
    with pytest.raises(ConfigError) as e:
        config_utils.parse_config("")
    assert "mode" in str(e.value)


def test_lattice_mode_needs_density_and_size(config_utils):
    with pytest.raises(ConfigError) as e:
        config_utils.parse_config("mode = simulate\n")
    assert "density" in str(e.value)
    assert "n_per_side or npart" in str(e.value)


def test_input_snapshot_replaces_lattice(config_utils):
    config = config_utils.parse_config("mode = analyze-boa\ninput = frame.xyz\n")
    assert config.input == Path("frame.xyz")
    assert config.n_per_side is None


def test_negative_cutoff_reports_line(config_utils):
    with pytest.raises(ConfigError) as e:
        config_utils.parse_config("mode = simulate\nn_per_side = 4\ndensity = 0.8\nrc = -1\n")
    assert e.value.line == 4
    assert "rc" in str(e.value)


def test_cutoff_must_exceed_sigma(config_utils):
    with pytest.raises(ConfigError):
        config_utils.parse_config("mode = simulate\nn_per_side = 4\ndensity = 0.8\nrc = 0.9\n")


@pytest.mark.parametrize(
    "line, fragment",
    [
        ("colour = blue", "unknown key"),
        ("steps = ten", "malformed value"),
        ("steps", "key = value"),
        ("steps =", "no value"),
        ("lattice = diamond", "malformed value"),
        ("thermostat = maybe", "malformed value"),
    ],
)
def test_bad_lines(config_utils, line, fragment):
    with pytest.raises(ConfigError) as e:
        config_utils.parse_config(f"mode = simulate\nn_per_side = 4\ndensity = 0.8\n{line}\n")
    assert fragment in str(e.value)
    assert e.value.line == 4


def test_duplicate_key(config_utils):
    with pytest.raises(ConfigError) as e:
        config_utils.parse_config("mode = simulate\nmode = bench\n")
    assert e.value.line == 2


def test_npart_must_fill_the_lattice(config_utils):
    with pytest.raises(ConfigError):
        config_utils.parse_config("mode = simulate\nnpart = 1001\ndensity = 0.8\n")
    config = config_utils.parse_config("mode = simulate\nlattice = fcc\nnpart = 500\ndensity = 1.0\n")
    assert config.n_per_side == 5


def test_random_seed_is_drawn(config_utils):
    config = config_utils.parse_config("mode = simulate\nn_per_side = 4\ndensity = 0.8\nseed = random\n")
    assert isinstance(config.seed, int)
    assert config.seed >= 0


def test_overrides_replace_file_values(config_utils):
    overrides = config_utils.overrides_from_flags(workers=4, backend="cell-list", output_dir="run1")
    config = config_utils.parse_config(BENCHMARK + "workers = 2\n", overrides)
    assert config.workers == 4
    assert config.backend_enum is Backend.CELL_LIST
    assert config.output_dir == Path("run1")


def test_unknown_override_rejected(config_utils):
    with pytest.raises(ConfigError):
        config_utils.parse_config(BENCHMARK, {"colour": "blue"})


def test_thermostat_probability_checked(config_utils):
    text = "mode = simulate\nn_per_side = 4\ndensity = 0.8\nthermostat = yes\nthermostat_frequency = 300\n"
    with pytest.raises(ConfigError):
        config_utils.parse_config(text)
    config = config_utils.parse_config(text.replace("300", "2"))
    params = config_utils.thermostat_params(config)
    assert params.collision_frequency == 2.0
    assert params.rng_seed == config.seed


def test_boa_settings(config_utils):
    config = config_utils.parse_config(
        "mode = analyze-boa\nlattice = fcc\nn_per_side = 3\ndensity = 1.0\nboa_l = 4, 5, 6\n"
    )
    assert config.boa_l == (4, 5, 6)
    assert config_utils.boa_config(config, 1.3).r_c == 1.3
    with pytest.raises(ConfigError):
        config_utils.parse_config("mode = analyze-boa\ninput = a.xyz\nboa_l = 4, 4\n")


def test_bench_lists(config_utils):
    config = config_utils.parse_config(
        "mode = bench\nn_per_side = 4\ndensity = 0.8\nbench_sizes = 64, 125\n"
        "bench_backends = cell_list\nbench_workers = 1, 2\n"
    )
    assert config.bench_sizes == (64, 125)
    assert config.bench_backend_enums == (Backend.CELL_LIST,)
    assert config.bench_workers == (1, 2)
    with pytest.raises(ConfigError):
        config_utils.parse_config("mode = bench\nn_per_side = 4\ndensity = 0.8\nbench_backends = fast\n")
