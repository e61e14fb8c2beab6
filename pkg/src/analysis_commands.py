from pathlib import Path
from typing import Dict, Mapping, Optional

import numpy as np

from base import Base
from custom_types.errors import ConfigError
from custom_types.log_level import LogLevel
from custom_types.q_summary import QSummary
from custom_types.run_config import RunConfig
from custom_types.snapshot_format import SnapshotFormat
from custom_types.state import State
from custom_types.structure_classification import StructureClassification

BOA_FILE = "boa.csv"
BOA_SUMMARY_FILE = "boa_summary.csv"
CNA_FILE = "cna.csv"
CNA_SUMMARY_FILE = "cna_summary.csv"


class AnalysisCommands(Base):
    def __init__(self, cwd: Optional[Path] = None, level: LogLevel = LogLevel.INFO) -> None:
        super().__init__(cwd=cwd, level=level)

    def load_state(self, config: RunConfig) -> State:
        if config.input is None:
            positions, extents = self.lattice_utils.generate_lattice(
                config.lattice_enum, config.n_per_side, config.density, debug=self.debug
            )
            return self.state_utils.create_state(len(positions), extents, positions)
        snapshot = self.snapshot_utils.read_snapshot(
            self.path_utils.resolve(config.input), config.box, debug=self.debug
        )
        return self.snapshot_utils.state_from_snapshot(snapshot, debug=self.debug)

    def _cutoff(self, config: RunConfig, explicit: Optional[float], key: str) -> float:
        if explicit is not None:
            return explicit
        if config.density is None:
            error_msg = f"'{key}' is required when analysing an input snapshot without a density"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ConfigError(error_msg)
        return self.lattice_utils.shell_cutoff(config.lattice_enum, config.density)

    def analyze_boa(
        self,
        config_path: Path,
        overrides: Optional[Mapping[str, str]] = None,
        debug: bool = False,
    ) -> Dict[int, QSummary]:
        config = self.prepare_run(config_path, overrides, debug)
        state = self.load_state(config)
        boa = self.config_utils.boa_config(config, self._cutoff(config, config.boa_rc, "boa_rc"))
        moments = self.boa_utils.boa_moments(state, boa, config.backend_enum, debug=debug)
        qdat = self.boa_utils.boa_finalize(moments, debug=debug)
        summary = self.analysis_utils.q_summary(qdat, debug=debug)
        columns = {f"Q_{l}": qdat.values(l).copy() for l in qdat.l_values}
        self.snapshot_utils.write_snapshot(
            self.snapshot_utils.snapshot_from_state(state, columns=columns, with_velocities=False),
            config.output_dir.joinpath(BOA_FILE),
            SnapshotFormat.CSV,
            debug=debug,
        )
        bins = len(next(iter(summary.values())).histogram) if summary else 0
        self.snapshot_utils.write_table(
            config.output_dir.joinpath(BOA_SUMMARY_FILE),
            ["l", "mean", "count", "undefined", *(f"bin_{b}" for b in range(bins))],
            (
                [entry.l, entry.mean, entry.count, entry.undefined, *entry.histogram.tolist()]
                for entry in summary.values()
            ),
        )
        if config.input is None:
            matches = self.analysis_utils.match_reference(summary, config.lattice_enum)
            self.logging.log(
                [f"Q_{l} matches {config.lattice_enum.value} reference: {m}" for l, m in matches.items()],
                LogLevel.INFO,
            )
        for entry in summary.values():
            self.logging.echo(f"Q_{entry.l}: mean = {entry.mean} over {entry.count} particles")
        return summary

    def analyze_cna(
        self,
        config_path: Path,
        overrides: Optional[Mapping[str, str]] = None,
        debug: bool = False,
    ) -> StructureClassification:
        config = self.prepare_run(config_path, overrides, debug)
        state = self.load_state(config)
        r_c = self._cutoff(config, config.cna_rc, "cna_rc")
        backend = config.backend_enum
        env = self.cna_utils.cna_direct_bonds(state, r_c, config.nu_b_max, backend, debug=debug)
        env = self.cna_utils.cna_environment_bonds(state, env, r_c, backend, debug=debug)
        triplets = self.cna_utils.cna_classify(
            state, env, r_c, config.nu_nb_max, backend, debug=debug
        )
        classification = self.analysis_utils.classify_structures(triplets, debug=debug)
        structures = np.array([s.value for s in classification.structures], dtype=object)
        self.snapshot_utils.write_snapshot(
            self.snapshot_utils.snapshot_from_state(
                state, columns={"structure": structures}, with_velocities=False
            ),
            config.output_dir.joinpath(CNA_FILE),
            SnapshotFormat.CSV,
            debug=debug,
        )
        self.snapshot_utils.write_table(
            config.output_dir.joinpath(CNA_SUMMARY_FILE),
            ["structure", "count"],
            ((structure.value, count) for structure, count in classification.counts.items()),
        )
        for structure, count in classification.counts.items():
            self.logging.echo(f"{structure.value}: {count}")
        return classification
