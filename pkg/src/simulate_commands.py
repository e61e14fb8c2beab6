from pathlib import Path
from typing import List, Mapping, Optional

from base import Base
from custom_types.log_level import LogLevel
from custom_types.observables import Observables
from custom_types.run_config import RunConfig
from custom_types.state import State

TRAJECTORY_FILE = "traj.xyz"
THERMO_FILE = "thermo.csv"


class SimulateCommands(Base):
    def __init__(self, cwd: Optional[Path] = None, level: LogLevel = LogLevel.INFO) -> None:
        super().__init__(cwd=cwd, level=level)

    def initial_state(self, config: RunConfig) -> State:
        if config.input is None:
            return self.lattice_utils.init_lattice_and_velocities(
                config.n_per_side,
                config.density,
                config.temperature,
                config.seed,
                config.lattice_enum,
                config.mass,
                debug=self.debug,
            )
        snapshot = self.snapshot_utils.read_snapshot(
            self.path_utils.resolve(config.input), config.box, debug=self.debug
        )
        state = self.snapshot_utils.state_from_snapshot(snapshot, debug=self.debug)
        self.integrator_utils.velocity_dat(state)
        self.integrator_utils.force_dat(state)
        self.integrator_utils.mass_dat(state, config.mass)
        return state

    def simulate(
        self,
        config_path: Path,
        overrides: Optional[Mapping[str, str]] = None,
        debug: bool = False,
    ) -> List[Observables]:
        config = self.prepare_run(config_path, overrides, debug)
        state = self.initial_state(config)
        out = config.output_dir
        lj = self.config_utils.lj_params(config)
        ir = self.config_utils.integrator_range(config)
        boa = None
        if config.boa_interval:
            default_rc = (
                self.lattice_utils.shell_cutoff(config.lattice_enum, config.density)
                if config.density is not None
                else lj.r_c
            )
            boa = self.config_utils.boa_config(config, default_rc)
        force_kernel = None
        if config.force_kernel is not None:
            force_kernel = self.path_utils.read_kernel_source(config.force_kernel, debug=debug)
        trajectory = out.joinpath(TRAJECTORY_FILE)
        step_hook = None
        if config.snapshot_interval:
            trajectory.write_text("")
            self.snapshot_utils.append_frame(self.snapshot_utils.snapshot_from_state(state), trajectory)

            def step_hook(step: int, current: State) -> None:
                if step % config.snapshot_interval == 0:
                    self.snapshot_utils.append_frame(
                        self.snapshot_utils.snapshot_from_state(
                            current, step, step * ir.dt, with_velocities=False
                        ),
                        trajectory,
                    )

        self.logging.echo(f"Simulating {state.npart} particles for {ir.n_max} steps")
        observables = self.snapshot_utils.write_observables(
            self.integrator_utils.run_nve(
                state,
                lj,
                ir,
                thermostat=self.config_utils.thermostat_params(config),
                sample_interval=config.sample_interval,
                boa=boa,
                boa_interval=config.boa_interval or None,
                step_hook=step_hook,
                backend=config.backend_enum,
                force_kernel=force_kernel,
                debug=debug,
            ),
            out.joinpath(THERMO_FILE),
            boa.l_values if boa is not None else (),
        )
        final = out.joinpath(f"final.{config.output_format_enum.value}")
        self.snapshot_utils.write_snapshot(
            self.snapshot_utils.snapshot_from_state(state, ir.n_max, ir.n_max * ir.dt),
            final,
            config.output_format_enum,
            debug=debug,
        )
        last = observables[-1]
        self.logging.log(
            [
                f"Final total energy: {last.total}",
                f"Rebuilds: {ir.rebuilds} ({ir.forced_rebuilds} forced)",
            ],
            LogLevel.INFO,
        )
        self.logging.echo(
            f"Done: E = {last.total}, T = {last.temperature}, rebuilds = {ir.rebuilds}, output in {str(out)}"
        )
        return observables
