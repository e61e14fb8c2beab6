from pathlib import Path
from time import perf_counter
from typing import List, Sequence

import numpy as np

from constants.dat_names import FORCE
from custom_types.backend import Backend
from custom_types.bench_row import BenchRow
from custom_types.log_level import LogLevel
from custom_types.run_config import LATTICE_BASIS_SIZES, RunConfig
from custom_types.state import State
from utils.config_utils import ConfigUtils
from utils.integrator_utils import IntegratorUtils
from utils.lattice_utils import LatticeUtils
from utils.logging import Logging
from utils.loop_utils import LoopUtils
from utils.snapshot_utils import SnapshotUtils

BENCH_COLUMNS = ("backend", "workers", "N", "steps", "seconds", "pair_visits")


class BenchUtils:
    def __init__(
        self,
        lattice_utils: LatticeUtils,
        integrator_utils: IntegratorUtils,
        loop_utils: LoopUtils,
        config_utils: ConfigUtils,
        snapshot_utils: SnapshotUtils,
        logging: Logging,
    ):
        self.lattice_utils = lattice_utils
        self.integrator_utils = integrator_utils
        self.loop_utils = loop_utils
        self.config_utils = config_utils
        self.snapshot_utils = snapshot_utils
        self.logging = logging

    def side_for(self, config: RunConfig, npart: int) -> int:
        """Lattice cells per side whose particle count is closest to npart."""
        basis = LATTICE_BASIS_SIZES[config.lattice_enum]
        side = max(1, round((npart / basis) ** (1.0 / 3.0)))
        if basis * side**3 != npart:
            self.logging.log(
                f"Bench size {npart} is not {basis} x n^3, using N = {basis * side**3}",
                LogLevel.WARN,
            )
        return side

    def _state(self, config: RunConfig, n_per_side: int) -> State:
        return self.lattice_utils.init_lattice_and_velocities(
            n_per_side,
            config.density,
            config.temperature,
            config.seed,
            config.lattice_enum,
            config.mass,
        )

    def _run(
        self,
        state: State,
        config: RunConfig,
        backend: Backend,
        workers: int,
        steps: int,
        debug: bool = False,
    ) -> None:
        previous = self.loop_utils.workers
        self.loop_utils.set_workers(workers)
        try:
            for _ in self.integrator_utils.run_nve(
                state,
                self.config_utils.lj_params(config),
                self.config_utils.integrator_range(config, steps),
                sample_interval=max(steps, 1),
                backend=backend,
                debug=debug,
            ):
                pass
        finally:
            self.loop_utils.set_workers(previous)

    def propagate(
        self,
        config: RunConfig,
        n_per_side: int,
        backend: Backend,
        workers: int,
        steps: int,
        debug: bool = False,
    ) -> State:
        state = self._state(config, n_per_side)
        self._run(state, config, backend, workers, steps, debug)
        return state

    def bench(self, config: RunConfig, debug: bool = False) -> List[BenchRow]:
        """Times bench_steps velocity Verlet steps for every backend, worker
        count and size of the grid."""
        rows: List[BenchRow] = []
        for backend in config.bench_backend_enums:
            for workers in config.bench_workers:
                for size in config.bench_sizes:
                    side = self.side_for(config, size)
                    state = self._state(config, side)
                    self.loop_utils.pair_visits = 0
                    start = perf_counter()
                    self._run(state, config, backend, workers, config.bench_steps)
                    seconds = perf_counter() - start
                    row = BenchRow(
                        backend=backend,
                        workers=workers,
                        npart=state.npart,
                        steps=config.bench_steps,
                        seconds=seconds,
                        pair_visits=self.loop_utils.pair_visits,
                    )
                    self.logging.log(
                        f"{backend.value} workers={workers} N={state.npart}: {seconds:.3f} s",
                        LogLevel.INFO,
                    )
                    if debug:
                        self.logging.log([f"Row: {row}"], LogLevel.DEBUG)
                    rows.append(row)
        return rows

    def cross_check(self, config: RunConfig, workers: int = 0, debug: bool = False) -> bool:
        """Propagates the configured lattice with one worker and with `workers`
        workers (default: the largest configured count, at least 2) and
        compares positions and forces bitwise."""
        workers = workers or max(2, config.workers, *config.bench_workers)
        side = config.n_per_side or self.side_for(config, config.bench_sizes[0])
        steps = config.bench_steps
        serial = self.propagate(config, side, config.backend_enum, 1, steps)
        parallel = self.propagate(config, side, config.backend_enum, workers, steps)
        same_positions = np.array_equal(serial.positions.values, parallel.positions.values)
        same_forces = np.array_equal(serial[FORCE].values, parallel[FORCE].values)
        if not (same_positions and same_forces):
            self.logging.log(
                f"1 worker and {workers} workers diverged after {steps} steps "
                f"(positions equal: {same_positions}, forces equal: {same_forces})",
                LogLevel.ERROR,
            )
        elif debug:
            self.logging.log(
                [f"Workers: 1 vs {workers}", f"Steps: {steps}", "Bitwise equal"], LogLevel.DEBUG
            )
        return same_positions and same_forces

    def write_bench(self, rows: Sequence[BenchRow], path: Path) -> Path:
        return self.snapshot_utils.write_table(
            path,
            BENCH_COLUMNS,
            (
                (row.backend.value, row.workers, row.npart, row.steps, row.seconds, row.pair_visits)
                for row in rows
            ),
        )
