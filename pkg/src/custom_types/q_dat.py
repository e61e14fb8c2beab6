from dataclasses import dataclass
from typing import Dict

import numpy as np

from custom_types.particle_dat import ParticleDat


@dataclass(frozen=True)
class QDat:
    q: Dict[int, ParticleDat]

    def values(self, l: int) -> np.ndarray:
        return self.q[l].values[:, 0]

    @property
    def l_values(self):
        return tuple(sorted(self.q))
