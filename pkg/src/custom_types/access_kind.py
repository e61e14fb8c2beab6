from enum import Enum


class AccessKind(Enum):
    READ = "read"
    WRITE = "write"
    INCREMENT = "increment"

    @property
    def writes(self) -> bool:
        return self is not AccessKind.READ
