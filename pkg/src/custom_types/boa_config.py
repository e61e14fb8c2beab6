from dataclasses import dataclass
from typing import Tuple


@dataclass(frozen=True)
class BOAConfig:
    l_values: Tuple[int, ...] = (4, 6)
    r_c: float = 1.5

    def __post_init__(self):
        if self.r_c <= 0:
            raise ValueError(f"BOA cutoff must be positive, got {self.r_c}")
        if not self.l_values or any(l < 0 for l in self.l_values):
            raise ValueError(f"BOA degrees must be non-negative, got {self.l_values}")
        if len(set(self.l_values)) != len(self.l_values):
            raise ValueError(f"BOA degrees must be distinct, got {self.l_values}")
