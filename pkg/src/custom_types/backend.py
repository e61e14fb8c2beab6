from enum import Enum


class Backend(Enum):
    ALL_PAIRS = "all_pairs"
    CELL_LIST = "cell_list"
    NEIGHBOUR_LIST = "neighbour_list"

    @property
    def uses_cells(self) -> bool:
        return self is not Backend.ALL_PAIRS

    @classmethod
    def from_value(cls, value: str) -> "Backend":
        normalized = value.strip().lower().replace("-", "_")
        for member in cls:
            if member.value == normalized:
                return member
        raise ValueError(f"No matching enum member for value '{value}'")
