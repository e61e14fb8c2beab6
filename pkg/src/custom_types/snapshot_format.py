from enum import Enum


class SnapshotFormat(Enum):
    XYZ = "xyz"
    CSV = "csv"

    @classmethod
    def from_value(cls, value: str) -> "SnapshotFormat":
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"No matching enum member for value '{value}'")
