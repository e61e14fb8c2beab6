from enum import Enum


class AccessMode(Enum):
    READ = "read"
    WRITE = "write"
    RW = "rw"
    INC = "inc"
    INC_ZERO = "inc_zero"

    @property
    def is_increment(self) -> bool:
        return self in (AccessMode.INC, AccessMode.INC_ZERO)

    @property
    def writes(self) -> bool:
        return self is not AccessMode.READ

    @classmethod
    def from_value(cls, value: str) -> "AccessMode":
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"No matching enum member for value '{value}'")
