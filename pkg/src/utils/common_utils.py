from typing import List

import numpy as np

from custom_types.log_level import LogLevel
from utils.logging import Logging

# Stream indices of a run's spawned generators.
VELOCITY_STREAM = 0
THERMOSTAT_STREAM = 1
STREAM_COUNT = 2


class CommonUtils:
    def __init__(self, logging: Logging) -> None:
        self.logging = logging

    def spawn_generators(
        self, seed: int, count: int = STREAM_COUNT, debug: bool = False
    ) -> List[np.random.Generator]:
        if seed < 0:
            error_msg = f"Seed must be non-negative, got {seed}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        children = np.random.SeedSequence(seed).spawn(count)
        if debug:
            self.logging.log(
                [f"Seed: {seed}", f"Streams: {count}"],
                LogLevel.DEBUG,
            )
        return [np.random.default_rng(child) for child in children]

    def generator_for(self, seed: int, stream: int) -> np.random.Generator:
        return self.spawn_generators(seed, max(STREAM_COUNT, stream + 1))[stream]

    def draw_seed(self) -> int:
        seed = int(np.random.SeedSequence().generate_state(1, dtype=np.uint32)[0])
        self.logging.log(f"Drew random seed {seed}", LogLevel.INFO)
        return seed

    @staticmethod
    def format_float(value: float) -> str:
        return "%.17g" % value
