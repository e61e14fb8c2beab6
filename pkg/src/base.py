from pathlib import Path
from typing import Mapping, Optional

from custom_types.log_level import LogLevel
from custom_types.run_config import RunConfig
from utils.analysis_utils import AnalysisUtils
from utils.bench_utils import BenchUtils
from utils.boa_utils import BoaUtils
from utils.cell_utils import CellUtils
from utils.cna_utils import CnaUtils
from utils.common_utils import CommonUtils
from utils.config_utils import ConfigUtils
from utils.integrator_utils import IntegratorUtils
from utils.kernel_utils import KernelUtils
from utils.lattice_utils import LatticeUtils
from utils.logging import Logging
from utils.loop_utils import LoopUtils
from utils.path_utils import PathUtils
from utils.snapshot_utils import SnapshotUtils
from utils.state_utils import StateUtils
from utils.treesitter_utils import TreesitterUtils


class Base(object):
    def __init__(
        self,
        cwd: Optional[Path] = None,
        log_dir: Optional[Path] = None,
        level: LogLevel = LogLevel.INFO,
    ) -> None:
        self.cwd = (cwd or Path.cwd()).resolve()
        self.debug: bool = False
        self.logging = Logging(log_dir, level)
        self.state_utils = StateUtils(logging=self.logging)
        self.treesitter_utils = TreesitterUtils(logging=self.logging)
        self.kernel_utils = KernelUtils(
            treesitter_utils=self.treesitter_utils, logging=self.logging
        )
        self.cell_utils = CellUtils(logging=self.logging)
        self.loop_utils = LoopUtils(
            cell_utils=self.cell_utils,
            kernel_utils=self.kernel_utils,
            logging=self.logging,
        )
        self.common_utils = CommonUtils(logging=self.logging)
        self.path_utils = PathUtils(cwd=self.cwd, logging=self.logging)
        self.boa_utils = BoaUtils(
            loop_utils=self.loop_utils,
            state_utils=self.state_utils,
            logging=self.logging,
        )
        self.cna_utils = CnaUtils(
            loop_utils=self.loop_utils,
            state_utils=self.state_utils,
            kernel_utils=self.kernel_utils,
            logging=self.logging,
        )
        self.analysis_utils = AnalysisUtils(
            loop_utils=self.loop_utils,
            state_utils=self.state_utils,
            kernel_utils=self.kernel_utils,
            logging=self.logging,
        )
        self.integrator_utils = IntegratorUtils(
            loop_utils=self.loop_utils,
            state_utils=self.state_utils,
            kernel_utils=self.kernel_utils,
            cell_utils=self.cell_utils,
            common_utils=self.common_utils,
            boa_utils=self.boa_utils,
            analysis_utils=self.analysis_utils,
            logging=self.logging,
        )
        self.lattice_utils = LatticeUtils(
            state_utils=self.state_utils,
            common_utils=self.common_utils,
            logging=self.logging,
        )
        self.config_utils = ConfigUtils(common_utils=self.common_utils, logging=self.logging)
        self.snapshot_utils = SnapshotUtils(
            common_utils=self.common_utils,
            state_utils=self.state_utils,
            logging=self.logging,
        )
        self.bench_utils = BenchUtils(
            lattice_utils=self.lattice_utils,
            integrator_utils=self.integrator_utils,
            loop_utils=self.loop_utils,
            config_utils=self.config_utils,
            snapshot_utils=self.snapshot_utils,
            logging=self.logging,
        )

    def prepare_run(
        self,
        config_path: Path,
        overrides: Optional[Mapping[str, str]] = None,
        debug: bool = False,
    ) -> RunConfig:
        """Parses the config, moves the log into the output directory and
        sizes the worker pool."""
        self.debug = debug
        text = self.path_utils.read_text(config_path)
        config = self.config_utils.parse_config(text, overrides, debug=debug)
        config.output_dir = self.path_utils.get_output_dir(config.output_dir, debug=debug)
        self.logging.use_log_dir(config.output_dir)
        self.logging.reset_log_file()
        self.logging.log(self.config_utils.describe(config), LogLevel.INFO)
        self.loop_utils.set_workers(config.workers)
        return config
