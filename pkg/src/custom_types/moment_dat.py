from dataclasses import dataclass
from typing import Dict

import numpy as np

from custom_types.particle_dat import ParticleDat


@dataclass(frozen=True)
class MomentDat:
    """Per l, 2(2l+1) interleaved re/im components ordered m = -l..l."""

    moments: Dict[int, ParticleDat]
    nu_nb: ParticleDat

    def complex_moments(self, l: int) -> np.ndarray:
        values = self.moments[l].values
        return values[:, 0::2] + 1j * values[:, 1::2]

    @property
    def neighbour_counts(self) -> np.ndarray:
        return self.nu_nb.values[:, 0]
