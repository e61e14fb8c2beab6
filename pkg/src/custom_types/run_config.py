from dataclasses import InitVar, dataclass, field
from pathlib import Path
from typing import Optional, Tuple

from custom_types.backend import Backend
from custom_types.lattice_type import LatticeType
from custom_types.run_mode import RunMode
from custom_types.snapshot_format import SnapshotFormat

LATTICE_BASIS_SIZES = {
    LatticeType.SC: 1,
    LatticeType.FCC: 4,
    LatticeType.BCC: 2,
    LatticeType.HCP: 4,
}


@dataclass
class RunConfig:
    mode: InitVar[str]
    lattice: InitVar[str]
    backend: InitVar[str]
    output_format: InitVar[str]
    bench_backends: InitVar[Tuple[str, ...]]
    n_per_side: Optional[int]
    density: Optional[float]
    temperature: float
    mass: float
    epsilon: float
    sigma: float
    rc: float
    delta: float
    dt: float
    steps: int
    reuse: int
    thermostat: bool
    thermostat_temperature: float
    thermostat_frequency: float
    workers: int
    seed: int
    force_kernel: Optional[Path]
    output_dir: Path
    sample_interval: int
    snapshot_interval: int
    boa_interval: int
    boa_l: Tuple[int, ...]
    boa_rc: Optional[float]
    cna_rc: Optional[float]
    nu_nb_max: int
    nu_b_max: int
    input: Optional[Path]
    box: Optional[Tuple[float, float, float]]
    bench_sizes: Tuple[int, ...]
    bench_workers: Tuple[int, ...]
    bench_steps: int
    mode_enum: RunMode = field(init=False)
    lattice_enum: LatticeType = field(init=False)
    backend_enum: Backend = field(init=False)
    output_format_enum: SnapshotFormat = field(init=False)
    bench_backend_enums: Tuple[Backend, ...] = field(init=False)

    def __post_init__(
        self,
        mode: str,
        lattice: str,
        backend: str,
        output_format: str,
        bench_backends: Tuple[str, ...],
    ):
        self.mode_enum = RunMode.from_value(mode)
        self.lattice_enum = LatticeType.from_value(lattice)
        self.backend_enum = Backend.from_value(backend)
        self.output_format_enum = SnapshotFormat.from_value(output_format)
        self.bench_backend_enums = tuple(Backend.from_value(b) for b in bench_backends)

    @property
    def npart(self) -> Optional[int]:
        if self.n_per_side is None:
            return None
        return LATTICE_BASIS_SIZES[self.lattice_enum] * self.n_per_side**3
