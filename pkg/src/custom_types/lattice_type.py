from enum import Enum


class LatticeType(Enum):
    SC = "sc"
    FCC = "fcc"
    BCC = "bcc"
    HCP = "hcp"

    @classmethod
    def from_value(cls, value: str) -> "LatticeType":
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"No matching enum member for value '{value}'")
