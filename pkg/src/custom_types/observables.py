from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple


@dataclass(frozen=True)
class Observables:
    step: int
    time: float
    kinetic: float
    potential: Optional[float]
    temperature: float
    momentum: Tuple[float, float, float]
    rebuilds: int
    q_means: Dict[int, float] = field(default_factory=dict)

    @property
    def total(self) -> Optional[float]:
        if self.potential is None:
            return None
        return self.kinetic + self.potential
