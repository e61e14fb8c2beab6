from dataclasses import dataclass
from typing import Dict, Tuple

from custom_types.structure_type import StructureType


@dataclass(frozen=True)
class StructureClassification:
    structures: Tuple[StructureType, ...]
    counts: Dict[StructureType, int]

    def fraction(self, structure: StructureType) -> float:
        total = len(self.structures)
        return self.counts.get(structure, 0) / total if total else 0.0
