from dataclasses import dataclass, field
from typing import List

import numpy as np

from custom_types.pair_candidates import PairCandidates


@dataclass
class NeighbourStructure:
    r_c: float
    delta: float
    candidates: PairCandidates
    build_positions: np.ndarray = field(repr=False)
    steps_since_build: int = 0
    reuse_limit: int = 20

    @property
    def extended_cutoff(self) -> float:
        return self.r_c + self.delta

    @property
    def neighbours(self) -> List[np.ndarray]:
        return [self.candidates.neighbours_of(i) for i in range(self.candidates.npart)]

    def neighbours_of(self, i: int) -> np.ndarray:
        return self.candidates.neighbours_of(i)

    def max_displacement(self, positions: np.ndarray) -> float:
        """Largest distance any particle has moved since the build, or inf
        when the particle count no longer matches."""
        if positions.shape != self.build_positions.shape:
            return float("inf")
        if not len(positions):
            return 0.0
        return float(np.sqrt(((positions - self.build_positions) ** 2).sum(axis=1).max()))

    def covers(self, positions: np.ndarray) -> bool:
        # a pair inside r_c stays inside r_c + delta while nobody moved more than delta/2
        return 2.0 * self.max_displacement(positions) <= self.delta
