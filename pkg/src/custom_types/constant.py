from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Constant:
    label: str
    value: Union[int, float]

    def __post_init__(self):
        if not self.label.isidentifier():
            raise ValueError(f"Constant label '{self.label}' is not an identifier")
        if isinstance(self.value, bool) or not isinstance(self.value, (int, float)):
            raise ValueError(
                f"Constant '{self.label}' must be a float or int, got {type(self.value).__name__}"
            )
