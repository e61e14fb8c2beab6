from dataclasses import dataclass, field
from typing import Any

import numpy as np

from custom_types.dat_type import DatType


@dataclass(eq=False)
class ScalarArray:
    name: str
    ncomp: int
    dtype: DatType
    values: np.ndarray = field(repr=False)

    def __getitem__(self, key: int) -> Any:
        return self.values[key]

    def __setitem__(self, key: int, value: Any) -> None:
        self.values[key] = value

    @property
    def value(self) -> Any:
        return self.values[0].item()
