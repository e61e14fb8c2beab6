from pathlib import Path

import numpy as np
import pytest

from base import Base
from constants.dat_names import FORCE, MASS, VELOCITY
from custom_types.state import State


@pytest.fixture
def base(tmp_path: Path) -> Base:
    base = Base(cwd=tmp_path)
    yield base
    base.loop_utils.close()


@pytest.fixture
def logging(base):
    return base.logging


@pytest.fixture
def state_utils(base):
    return base.state_utils


@pytest.fixture
def cell_utils(base):
    return base.cell_utils


@pytest.fixture
def kernel_utils(base):
    return base.kernel_utils


@pytest.fixture
def loop_utils(base):
    return base.loop_utils


@pytest.fixture
def integrator_utils(base):
    return base.integrator_utils


@pytest.fixture
def lattice_utils(base):
    return base.lattice_utils


@pytest.fixture
def boa_utils(base):
    return base.boa_utils


@pytest.fixture
def cna_utils(base):
    return base.cna_utils


@pytest.fixture
def analysis_utils(base):
    return base.analysis_utils


@pytest.fixture
def config_utils(base):
    return base.config_utils


@pytest.fixture
def snapshot_utils(base):
    return base.snapshot_utils


@pytest.fixture
def bench_utils(base):
    return base.bench_utils


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def make_state(state_utils):
    """State factory: positions in a box, with v, F and m attached."""

    def make(positions, extents=(10.0, 10.0, 10.0), velocities=None, mass=1.0) -> State:
        positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
        state = state_utils.create_state(len(positions), extents, positions)
        v = state_utils.ensure_dat(state, VELOCITY, 3)
        if velocities is not None:
            v.values[:] = velocities
        state_utils.ensure_dat(state, FORCE, 3)
        state_utils.ensure_dat(state, MASS, 1, initial_value=mass)
        return state

    return make


@pytest.fixture
def brute_pairs():
    """Ordered pairs (i, j) within cutoff under the minimum image."""

    def pairs_within(positions, extents, cutoff: float, strict: bool = False):
        positions = np.asarray(positions)
        extents = np.asarray(extents, dtype=np.float64)
        pairs = set()
        for i in range(len(positions)):
            d = positions[i] - positions
            d -= np.rint(d / extents) * extents
            dist_sq = np.sum(d * d, axis=1)
            within = dist_sq < cutoff * cutoff if strict else dist_sq <= cutoff * cutoff
            pairs.update((i, int(j)) for j in np.flatnonzero(within) if j != i)
        return pairs

    return pairs_within
