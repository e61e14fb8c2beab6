from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np


@dataclass(frozen=True)
class CellList:
    cell_counts: Tuple[int, int, int]
    cell_widths: Tuple[float, float, float]
    cell_coords: np.ndarray = field(repr=False)
    cell_of: np.ndarray = field(repr=False)
    order: np.ndarray = field(repr=False)
    cell_start: np.ndarray = field(repr=False)

    @property
    def ncells(self) -> int:
        return int(np.prod(self.cell_counts))

    def members(self, cell: int) -> np.ndarray:
        return self.order[self.cell_start[cell] : self.cell_start[cell + 1]]

    @property
    def membership(self) -> List[np.ndarray]:
        return [self.members(cell) for cell in range(self.ncells)]
