from enum import Enum


class AccessScope(Enum):
    I = "i"
    J = "j"
    GLOBAL = "global"
