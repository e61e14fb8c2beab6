from enum import Enum
from typing import Union

import numpy as np


class DatType(Enum):
    FLOAT64 = "float64"
    INT64 = "int64"

    @property
    def numpy_dtype(self) -> np.dtype:
        return np.dtype(self.value)

    @classmethod
    def from_value(cls, value: Union[str, "DatType", type, np.dtype]) -> "DatType":
        if isinstance(value, DatType):
            return value
        if not isinstance(value, str):
            try:
                value = np.dtype(value).name
            except TypeError:
                raise ValueError(f"No matching enum member for value '{value}'")
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"No matching enum member for value '{value}'")
