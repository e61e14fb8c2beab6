from dataclasses import dataclass, field
from typing import Tuple

from custom_types.constant import Constant


@dataclass(frozen=True)
class KernelSource:
    name: str
    code: str
    constants: Tuple[Constant, ...] = field(default_factory=tuple)

    def with_constants(self, *constants: Constant) -> "KernelSource":
        return KernelSource(self.name, self.code, tuple(self.constants) + constants)
