from dataclasses import dataclass


@dataclass
class IntegratorRange:
    n_max: int
    dt: float = 0.005
    reuse_limit: int = 20
    delta: float = 0.25
    v_max_tracker: float = 0.0
    steps_since_build: int = 0
    rebuilds: int = 0
    forced_rebuilds: int = 0

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError(f"n_max must be non-negative, got {self.n_max}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.reuse_limit < 1:
            raise ValueError(f"reuse_limit must be at least 1, got {self.reuse_limit}")
        if self.delta < 0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")

    def observe_speed(self, speed: float) -> None:
        self.v_max_tracker = max(self.v_max_tracker, speed)

    def mark_rebuilt(self, forced: bool = False) -> None:
        self.v_max_tracker = 0.0
        self.steps_since_build = 0
        self.rebuilds += 1
        if forced:
            self.forced_rebuilds += 1
