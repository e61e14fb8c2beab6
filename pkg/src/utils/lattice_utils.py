from typing import Sequence, Tuple, Union

import numpy as np

from constants.dat_names import FORCE, MASS, VELOCITY
from constants.lattice_references import (
    LATTICE_ASPECT,
    LATTICE_BASIS,
    SHELL_CUTOFF_FACTORS,
)
from custom_types.lattice_type import LatticeType
from custom_types.log_level import LogLevel
from custom_types.state import State
from utils.common_utils import VELOCITY_STREAM, CommonUtils
from utils.logging import Logging
from utils.state_utils import StateUtils


class LatticeUtils:
    def __init__(self, state_utils: StateUtils, common_utils: CommonUtils, logging: Logging):
        self.state_utils = state_utils
        self.common_utils = common_utils
        self.logging = logging

    def _cell_counts(self, cells: Union[int, Sequence[int]]) -> Tuple[int, int, int]:
        counts = (cells, cells, cells) if isinstance(cells, (int, np.integer)) else tuple(cells)
        if len(counts) != 3 or any(int(c) < 1 for c in counts):
            error_msg = f"Lattice needs three positive cell counts, got {cells}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        return (int(counts[0]), int(counts[1]), int(counts[2]))

    def lattice_constant(self, lattice: LatticeType, density: float) -> float:
        if not density > 0:
            error_msg = f"Density must be positive, got {density}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        basis_size = len(LATTICE_BASIS[lattice])
        return (basis_size / (density * float(np.prod(LATTICE_ASPECT[lattice])))) ** (1.0 / 3.0)

    def shell_cutoff(self, lattice: LatticeType, density: float) -> float:
        """Cutoff midway between the neighbour shells used for classification:
        first and second for sc, fcc and hcp, second and third for bcc."""
        return SHELL_CUTOFF_FACTORS[lattice] * self.lattice_constant(lattice, density)

    def generate_lattice(
        self,
        lattice: LatticeType,
        cells: Union[int, Sequence[int]],
        density: float,
        debug: bool = False,
    ) -> Tuple[np.ndarray, Tuple[float, float, float]]:
        counts = self._cell_counts(cells)
        a = self.lattice_constant(lattice, density)
        cell_edges = np.asarray(LATTICE_ASPECT[lattice]) * a
        basis = np.asarray(LATTICE_BASIS[lattice])
        grid = np.stack(
            np.meshgrid(*(np.arange(c) for c in counts), indexing="ij"), axis=-1
        ).reshape(-1, 3)
        positions = ((grid[:, None, :] + basis[None, :, :]) * cell_edges).reshape(-1, 3)
        extents = tuple(float(e) for e in np.asarray(counts) * cell_edges)
        if debug:
            self.logging.log(
                [
                    f"Lattice: {lattice.value}",
                    f"Cells: {counts}",
                    f"Lattice constant: {a}",
                    f"Particles: {len(positions)}",
                    f"Extents: {extents}",
                ],
                LogLevel.DEBUG,
            )
        return positions, extents

    def init_lattice_and_velocities(
        self,
        n_per_side: int,
        density: float,
        temperature: float,
        seed: int,
        lattice: LatticeType = LatticeType.SC,
        mass: float = 1.0,
        debug: bool = False,
    ) -> State:
        if temperature < 0:
            error_msg = f"Temperature must be non-negative, got {temperature}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        if not mass > 0:
            error_msg = f"Mass must be positive, got {mass}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        positions, extents = self.generate_lattice(lattice, n_per_side, density, debug=debug)
        npart = len(positions)
        state = self.state_utils.create_state(npart, extents, positions)
        velocities = self.state_utils.ensure_dat(state, VELOCITY, 3)
        self.state_utils.ensure_dat(state, FORCE, 3)
        self.state_utils.ensure_dat(state, MASS, 1, initial_value=mass)
        rng = self.common_utils.generator_for(seed, VELOCITY_STREAM)
        sampled = rng.standard_normal((npart, 3)) * np.sqrt(temperature / mass)
        if npart:
            # equal masses, so removing the mean velocity zeroes the momentum
            sampled -= sampled.mean(axis=0)
        velocities.values[:] = sampled
        if debug:
            self.logging.log(
                [
                    f"Particles: {npart}",
                    f"Seed: {seed}",
                    f"Mean |v|^2: {float(np.mean(np.sum(sampled**2, axis=1))) if npart else 0.0}",
                ],
                LogLevel.DEBUG,
            )
        return state
