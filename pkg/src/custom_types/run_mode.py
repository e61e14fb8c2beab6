from enum import Enum


class RunMode(Enum):
    SIMULATE = "simulate"
    ANALYZE_BOA = "analyze-boa"
    ANALYZE_CNA = "analyze-cna"
    BENCH = "bench"

    @classmethod
    def from_value(cls, value: str) -> "RunMode":
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"No matching enum member for value '{value}'")
