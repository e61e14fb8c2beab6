from dataclasses import dataclass


@dataclass(frozen=True)
class ThermostatParams:
    target_temperature: float
    collision_frequency: float = 1.0
    rng_seed: int = 12345

    def __post_init__(self):
        if self.target_temperature < 0:
            raise ValueError(
                f"Target temperature must be non-negative, got {self.target_temperature}"
            )
        if self.collision_frequency < 0:
            raise ValueError(
                f"Collision frequency must be non-negative, got {self.collision_frequency}"
            )
