from dataclasses import dataclass
from typing import Union

from custom_types.access_mode import AccessMode
from custom_types.particle_dat import ParticleDat
from custom_types.scalar_array import ScalarArray


@dataclass(frozen=True, eq=False)
class AccessBinding:
    label: str
    target: Union[ParticleDat, ScalarArray]
    mode: AccessMode

    def __post_init__(self):
        if not self.label.isidentifier():
            raise ValueError(f"Binding label '{self.label}' is not an identifier")

    @property
    def is_global(self) -> bool:
        return isinstance(self.target, ScalarArray)
