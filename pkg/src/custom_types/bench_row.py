from dataclasses import dataclass

from custom_types.backend import Backend


@dataclass(frozen=True)
class BenchRow:
    backend: Backend
    workers: int
    npart: int
    steps: int
    seconds: float
    pair_visits: int
