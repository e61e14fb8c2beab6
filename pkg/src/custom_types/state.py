from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Optional

from custom_types.domain import Domain
from custom_types.particle_dat import ParticleDat, PositionDat

if TYPE_CHECKING:
    from custom_types.neighbour_structure import NeighbourStructure


@dataclass(eq=False)
class State:
    npart: int
    domain: Domain
    positions: PositionDat
    global_ids: ParticleDat
    properties: Dict[str, ParticleDat] = field(default_factory=dict)
    neighbour_structure: Optional["NeighbourStructure"] = None

    def __getitem__(self, name: str) -> ParticleDat:
        return self.properties[name]

    def __contains__(self, name: str) -> bool:
        return name in self.properties

    def owns(self, dat: ParticleDat) -> bool:
        return any(dat is attached for attached in self.properties.values())
