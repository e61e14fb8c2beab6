from dataclasses import dataclass
from typing import List, Tuple

from custom_types.particle_dat import ParticleDat


@dataclass(frozen=True)
class TripletDat:
    triplets: ParticleDat
    count: ParticleDat

    def of(self, i: int) -> List[Tuple[int, int, int]]:
        row = self.triplets.values[i]
        n = int(self.count.values[i, 0])
        return [(int(row[3 * t]), int(row[3 * t + 1]), int(row[3 * t + 2])) for t in range(n)]
