from dataclasses import dataclass
from typing import List, Tuple

from custom_types.particle_dat import ParticleDat


@dataclass(frozen=True)
class CNAEnvironment:
    bonds: ParticleDat
    nu_nb: ParticleDat
    nu_b: ParticleDat

    def direct_bonds(self, i: int) -> List[Tuple[int, int]]:
        row = self.bonds.values[i]
        n = int(self.nu_nb.values[i, 0])
        return [(int(row[2 * k]), int(row[2 * k + 1])) for k in range(n)]

    def environment_bonds(self, i: int) -> List[Tuple[int, int]]:
        row = self.bonds.values[i]
        start = int(self.nu_nb.values[i, 0])
        stop = int(self.nu_b.values[i, 0])
        return [(int(row[2 * k]), int(row[2 * k + 1])) for k in range(start, stop)]
