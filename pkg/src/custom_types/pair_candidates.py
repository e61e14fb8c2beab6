from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PairCandidates:
    """Ordered pairs in CSR form: the j's of particle i are
    indices[offsets[i]:offsets[i + 1]], sorted ascending, and the periodic
    image of j seen from i sits at positions[j] + shifts[p] * extents."""

    cutoff: float
    offsets: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    shifts: np.ndarray = field(repr=False)

    @property
    def npart(self) -> int:
        return len(self.offsets) - 1

    @property
    def npairs(self) -> int:
        return int(self.offsets[-1])

    def neighbours_of(self, i: int) -> np.ndarray:
        return self.indices[self.offsets[i] : self.offsets[i + 1]]
