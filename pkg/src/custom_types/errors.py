from typing import Optional, Sequence


class AccessViolationError(RuntimeError):
    def __init__(self, label: str, mode: str, detail: str) -> None:
        self.label = label
        self.mode = mode
        super().__init__(f"Access violation on '{label}' ({mode}): {detail}")


class KernelSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class KernelCompileError(ValueError):
    pass


class KernelRuntimeError(RuntimeError):
    def __init__(self, label: str, index: object, detail: str) -> None:
        self.label = label
        self.index = index
        super().__init__(f"Kernel runtime error on '{label}' index {index}: {detail}")


class CapacityError(RuntimeError):
    def __init__(self, particle_id: int, capacity: int, what: str) -> None:
        self.particle_id = particle_id
        self.capacity = capacity
        super().__init__(
            f"Particle {particle_id} exceeded {what} capacity of {capacity}"
        )


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonFiniteError(ValueError):
    def __init__(self, message: str, indices: Sequence[int]) -> None:
        self.indices = list(indices)
        super().__init__(f"{message}: particles {self.indices}")
