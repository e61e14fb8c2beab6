from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np


@dataclass
class Snapshot:
    step: int
    time: float
    extents: Tuple[float, float, float]
    ids: np.ndarray = field(repr=False)
    positions: np.ndarray = field(repr=False)
    velocities: Optional[np.ndarray] = field(default=None, repr=False)
    columns: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        n = len(self.ids)
        lengths = {"positions": len(self.positions)}
        if self.velocities is not None:
            lengths["velocities"] = len(self.velocities)
        lengths.update({name: len(column) for name, column in self.columns.items()})
        mismatched = [name for name, length in lengths.items() if length != n]
        if mismatched:
            raise ValueError(f"Snapshot columns {mismatched} do not have {n} rows")

    @property
    def npart(self) -> int:
        return len(self.ids)
