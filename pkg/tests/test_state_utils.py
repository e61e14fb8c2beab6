import numpy as np
import pytest

from custom_types.access_binding import AccessBinding
from custom_types.access_mode import AccessMode
from custom_types.dat_type import DatType
from custom_types.errors import NonFiniteError
from custom_types.vector_kernel import VectorKernel


def test_create_dat_fills_initial_value(state_utils):
    v = state_utils.create_dat("v", 2, 3, DatType.FLOAT64, 0.0)
    assert v.shape == (2, 3)
    np.testing.assert_array_equal(v.values, np.zeros((2, 3)))

    q = state_utils.create_dat("q", 3, 13, "float64", 1.5)
    assert q.values.size == 39
    assert np.all(q.values == 1.5)


def test_create_dat_with_no_particles(state_utils):
    s = state_utils.create_dat("S", 0, 1, DatType.INT64, 0)
    assert s.values.shape == (0, 1)
    assert s.values.dtype == np.int64


@pytest.mark.parametrize("npart, ncomp", [(-1, 1), (2, 0)])
def test_create_dat_rejects_bad_shape(state_utils, npart, ncomp):
    with pytest.raises(ValueError):
        state_utils.create_dat("bad", npart, ncomp)


def test_create_dat_rejects_unknown_dtype(state_utils):
    with pytest.raises(ValueError):
        state_utils.create_dat("bad", 1, 1, "complex128")


def test_set_element_marks_dirty(state_utils):
    dat = state_utils.create_dat("x", 2, 3)
    state_utils.set_element(dat, 0, 2, 7.0)
    assert dat[0, 2] == 7.0
    assert dat.dirty

    state_utils.set_element(dat, 0, 2, 1.0)
    state_utils.set_element(dat, 0, 2, 3.0)
    assert dat[0, 2] == 3.0


def test_set_element_out_of_range(state_utils):
    dat = state_utils.create_dat("x", 2, 3)
    with pytest.raises(IndexError):
        state_utils.set_element(dat, 2, 0, 1.0)
    with pytest.raises(IndexError):
        state_utils.set_element(dat, 0, 3, 1.0)


def test_loop_sync_clears_dirty(state_utils, loop_utils):
    state = state_utils.create_state(2, (10.0, 10.0, 10.0))
    dat = state_utils.ensure_dat(state, "x", 1)
    state_utils.set_element(dat, 1, 0, 4.0)
    assert dat.dirty

    def read(ctx):
        ctx["x"].i

    loop_utils.particle_loop(
        state, VectorKernel("read", read), [AccessBinding("x", dat, AccessMode.READ)]
    )
    assert not dat.dirty


def test_attach_and_lookup(state_utils):
    state = state_utils.create_state(2, (10.0, 10.0, 10.0))
    v = state_utils.create_dat("v", 2, 3)
    state_utils.attach(state, "v", v)
    assert state["v"] is v
    assert v.state is state
    assert state.owns(v)


def test_attach_rejects_wrong_length(state_utils):
    state = state_utils.create_state(2, (10.0, 10.0, 10.0))
    with pytest.raises(ValueError):
        state_utils.attach(state, "v", state_utils.create_dat("v", 3, 3))


def test_attach_rejects_second_position_dat(state_utils):
    state = state_utils.create_state(2, (10.0, 10.0, 10.0))
    with pytest.raises(ValueError):
        state_utils.attach(state, "r2", state_utils.create_position_dat(2, "r2"))


def test_attach_rejects_duplicate_name(state_utils):
    state = state_utils.create_state(2, (10.0, 10.0, 10.0))
    state_utils.attach(state, "v", state_utils.create_dat("v", 2, 3))
    with pytest.raises(ValueError):
        state_utils.attach(state, "v", state_utils.create_dat("v", 2, 3))


def test_create_state_rejects_bad_box(state_utils):
    with pytest.raises(ValueError):
        state_utils.create_state(1, (10.0, 0.0, 10.0))


@pytest.mark.parametrize("x, expected", [(-0.25, 9.75), (10.0, 0.0), (23.5, 3.5)])
def test_wrap_positions(state_utils, x, expected):
    state = state_utils.create_state(1, (10.0, 10.0, 10.0), [[x, 1.0, 2.0]])
    state_utils.wrap_positions(state)
    assert state.positions[0, 0] == expected
    assert state.positions.dirty


def test_wrap_positions_tiny_negative_stays_in_box(state_utils):
    state = state_utils.create_state(1, (10.0, 10.0, 10.0), [[-1e-18, 0.0, 0.0]])
    state_utils.wrap_positions(state)
    assert 0.0 <= state.positions[0, 0] < 10.0


def test_wrap_positions_non_finite(state_utils):
    state = state_utils.create_state(2, (10.0, 10.0, 10.0), [[0.0, 0.0, 0.0], [np.nan, 0.0, 0.0]])
    with pytest.raises(NonFiniteError) as e:
        state_utils.wrap_positions(state)
    assert e.value.indices == [1]


def test_ensure_dat_reuses_matching_dat(state_utils):
    state = state_utils.create_state(2, (10.0, 10.0, 10.0))
    first = state_utils.ensure_dat(state, "n", 1, DatType.INT64)
    assert state_utils.ensure_dat(state, "n", 1, DatType.INT64) is first
    with pytest.raises(ValueError):
        state_utils.ensure_dat(state, "n", 2, DatType.INT64)
