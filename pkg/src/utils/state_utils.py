from typing import Optional, Sequence, Union

import numpy as np

from constants.dat_names import GLOBAL_ID, POSITION
from custom_types.dat_type import DatType
from custom_types.domain import Domain
from custom_types.errors import NonFiniteError
from custom_types.log_level import LogLevel
from custom_types.particle_dat import ParticleDat, PositionDat
from custom_types.scalar_array import ScalarArray
from custom_types.state import State
from utils.logging import Logging


class StateUtils:
    def __init__(self, logging: Logging):
        self.logging = logging

    def _resolve_dtype(self, dtype: Union[str, DatType, type]) -> DatType:
        try:
            return DatType.from_value(dtype)
        except ValueError:
            error_msg = f"Unknown dat dtype '{dtype}', expected float64 or int64"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)

    def create_dat(
        self,
        name: str,
        npart: int,
        ncomp: int,
        dtype: Union[str, DatType, type] = DatType.FLOAT64,
        initial_value: Union[int, float] = 0,
        debug: bool = False,
    ) -> ParticleDat:
        dat_type = self._resolve_dtype(dtype)
        if npart < 0 or ncomp < 1:
            error_msg = f"Cannot create '{name}' with npart={npart}, ncomp={ncomp}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        values = np.full((npart, ncomp), initial_value, dtype=dat_type.numpy_dtype)
        if debug:
            self.logging.log(
                [f"Name: {name}", f"Shape: {values.shape}", f"Dtype: {dat_type.value}"],
                LogLevel.DEBUG,
            )
        return ParticleDat(name=name, npart=npart, ncomp=ncomp, dtype=dat_type, values=values)

    def create_position_dat(self, npart: int, name: str = POSITION) -> PositionDat:
        return PositionDat(
            name=name,
            npart=npart,
            ncomp=3,
            dtype=DatType.FLOAT64,
            values=np.zeros((npart, 3), dtype=np.float64),
        )

    def create_scalar_array(
        self,
        name: str,
        ncomp: int = 1,
        dtype: Union[str, DatType, type] = DatType.FLOAT64,
        initial_value: Union[int, float] = 0,
    ) -> ScalarArray:
        dat_type = self._resolve_dtype(dtype)
        if ncomp < 1:
            error_msg = f"Cannot create scalar array '{name}' with ncomp={ncomp}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        values = np.full(ncomp, initial_value, dtype=dat_type.numpy_dtype)
        return ScalarArray(name=name, ncomp=ncomp, dtype=dat_type, values=values)

    def create_state(
        self,
        npart: int,
        extents: Sequence[float],
        positions: Optional[np.ndarray] = None,
        position_name: str = POSITION,
        debug: bool = False,
    ) -> State:
        try:
            domain = Domain(extents=tuple(float(e) for e in extents))
        except ValueError as e:
            error_msg = f"Invalid domain: {e}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        position_dat = self.create_position_dat(npart, position_name)
        if positions is not None:
            positions = np.asarray(positions, dtype=np.float64)
            if positions.shape != (npart, 3):
                error_msg = f"Positions have shape {positions.shape}, expected {(npart, 3)}"
                self.logging.log(error_msg, LogLevel.ERROR)
                raise ValueError(error_msg)
            position_dat.values[:] = positions
        global_ids = self.create_dat(GLOBAL_ID, npart, 1, DatType.INT64)
        global_ids.values[:, 0] = np.arange(npart)
        state = State(
            npart=npart, domain=domain, positions=position_dat, global_ids=global_ids
        )
        state.properties[position_name] = position_dat
        position_dat.state = state
        state.properties[GLOBAL_ID] = global_ids
        global_ids.state = state
        if debug:
            self.logging.log(
                [f"Particles: {npart}", f"Extents: {domain.extents}"], LogLevel.DEBUG
            )
        return state

    def set_element(
        self, dat: ParticleDat, i: int, r: int, x: Union[int, float]
    ) -> None:
        if not (0 <= i < dat.npart and 0 <= r < dat.ncomp):
            error_msg = (
                f"Index ({i}, {r}) out of range for '{dat.name}' of shape {dat.shape}"
            )
            self.logging.log(error_msg, LogLevel.ERROR)
            raise IndexError(error_msg)
        dat[i, r] = x

    def attach(self, state: State, name: str, dat: ParticleDat) -> None:
        if dat.npart != state.npart:
            error_msg = (
                f"Cannot attach '{name}' with {dat.npart} rows to a state of {state.npart} particles"
            )
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        if name in state.properties:
            error_msg = f"State already has a property named '{name}'"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        if isinstance(dat, PositionDat):
            error_msg = f"State already has PositionDat '{state.positions.name}'"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        if dat.state is not None and dat.state is not state:
            error_msg = f"'{dat.name}' is already attached to another state"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        dat.state = state
        state.properties[name] = dat

    def ensure_dat(
        self,
        state: State,
        name: str,
        ncomp: int,
        dtype: Union[str, DatType, type] = DatType.FLOAT64,
        initial_value: Union[int, float] = 0,
    ) -> ParticleDat:
        dat_type = self._resolve_dtype(dtype)
        existing = state.properties.get(name)
        if existing is not None:
            if existing.ncomp != ncomp or existing.dtype is not dat_type:
                error_msg = (
                    f"Property '{name}' exists with ncomp={existing.ncomp}, "
                    f"dtype={existing.dtype.value}; requested ncomp={ncomp}, dtype={dat_type.value}"
                )
                self.logging.log(error_msg, LogLevel.ERROR)
                raise ValueError(error_msg)
            return existing
        dat = self.create_dat(name, state.npart, ncomp, dat_type, initial_value)
        self.attach(state, name, dat)
        return dat

    def wrap_positions(self, state: State) -> None:
        positions = state.positions.values
        finite = np.isfinite(positions).all(axis=1)
        if not finite.all():
            bad = np.flatnonzero(~finite).tolist()
            error_msg = "Non-finite positions"
            self.logging.log(f"{error_msg}: {bad}", LogLevel.ERROR)
            raise NonFiniteError(error_msg, bad)
        extents = state.domain.extents_array
        wrapped = np.mod(positions, extents)
        # mod of a tiny negative number rounds up to L
        wrapped = np.where(wrapped >= extents, 0.0, wrapped)
        positions[:] = wrapped
        # cached candidate shifts refer to the unwrapped coordinates
        state.positions.dirty = True
