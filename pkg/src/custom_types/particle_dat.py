from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Optional, Tuple

import numpy as np

from custom_types.dat_type import DatType

if TYPE_CHECKING:
    from custom_types.state import State


@dataclass(eq=False)
class ParticleDat:
    name: str
    npart: int
    ncomp: int
    dtype: DatType
    values: np.ndarray = field(repr=False)
    dirty: bool = False
    state: Optional["State"] = field(default=None, repr=False)

    def __setattr__(self, name: str, value: Any) -> None:
        # Storage is fixed for the lifetime of the dat.
        if name == "values" and "values" in self.__dict__:
            if np.shape(value) != self.values.shape:
                raise ValueError(
                    f"Cannot resize '{self.name}' from {self.values.shape} to {np.shape(value)}"
                )
        super().__setattr__(name, value)

    def __getitem__(self, key: Tuple[int, int]) -> Any:
        return self.values[key]

    def __setitem__(self, key: Tuple[int, int], value: Any) -> None:
        self.values[key] = value
        self.dirty = True

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.npart, self.ncomp)


@dataclass(eq=False)
class PositionDat(ParticleDat):
    pass
