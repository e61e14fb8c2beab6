from dataclasses import dataclass
from typing import Tuple

import numpy as np

from custom_types.boundary_type import BoundaryType


@dataclass(frozen=True)
class Domain:
    extents: Tuple[float, float, float]
    boundary: BoundaryType = BoundaryType.PERIODIC

    def __post_init__(self):
        if len(self.extents) != 3:
            raise ValueError(f"Domain needs three extents, got {len(self.extents)}")
        if not all(np.isfinite(e) and e > 0 for e in self.extents):
            raise ValueError(f"Domain extents must be strictly positive, got {self.extents}")

    @property
    def extents_array(self) -> np.ndarray:
        return np.asarray(self.extents, dtype=np.float64)

    @property
    def volume(self) -> float:
        return float(np.prod(self.extents))
