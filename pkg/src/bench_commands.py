from pathlib import Path
from typing import List, Mapping, Optional

from base import Base
from custom_types.bench_row import BenchRow
from custom_types.log_level import LogLevel

BENCH_FILE = "bench.csv"


class BenchCommands(Base):
    def __init__(self, cwd: Optional[Path] = None, level: LogLevel = LogLevel.INFO) -> None:
        super().__init__(cwd=cwd, level=level)

    def bench(
        self,
        config_path: Path,
        overrides: Optional[Mapping[str, str]] = None,
        debug: bool = False,
    ) -> List[BenchRow]:
        config = self.prepare_run(config_path, overrides, debug)
        rows = self.bench_utils.bench(config, debug=debug)
        self.bench_utils.write_bench(rows, config.output_dir.joinpath(BENCH_FILE))
        for row in rows:
            self.logging.echo(
                f"{row.backend.value:>14} workers={row.workers} N={row.npart}: "
                f"{row.seconds / max(row.steps, 1):.4f} s/step, {row.pair_visits} pair visits"
            )
        if max(config.workers, *config.bench_workers) > 1:
            identical = self.bench_utils.cross_check(config, debug=debug)
            self.logging.echo(
                f"Worker cross-check: {'identical' if identical else 'DIVERGED'}"
            )
            if not identical:
                error_msg = "Multi-worker run is not bitwise identical to the single-worker run"
                self.logging.log(error_msg, LogLevel.ERROR)
                raise RuntimeError(error_msg)
        return rows
