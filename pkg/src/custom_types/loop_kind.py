from enum import Enum


class LoopKind(Enum):
    PARTICLE = "particle"
    PAIR = "pair"
