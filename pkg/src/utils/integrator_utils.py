from typing import Callable, Dict, Iterator, Optional, Tuple

import numpy as np

from constants.dat_names import FORCE, MASS, THERMOSTAT_DRAW, VELOCITY
from custom_types.access_binding import AccessBinding
from custom_types.access_mode import AccessMode
from custom_types.backend import Backend
from custom_types.block_context import BlockContext
from custom_types.boa_config import BOAConfig
from custom_types.compiled_kernel import CompiledKernel
from custom_types.constant import Constant
from custom_types.dat_type import DatType
from custom_types.errors import NonFiniteError
from custom_types.integrator_range import IntegratorRange
from custom_types.kernel_source import KernelSource
from custom_types.lj_params import LJParams
from custom_types.log_level import LogLevel
from custom_types.loop_kind import LoopKind
from custom_types.observables import Observables
from custom_types.particle_dat import ParticleDat
from custom_types.state import State
from custom_types.thermostat_params import ThermostatParams
from custom_types.vector_kernel import VectorKernel
from utils.analysis_utils import AnalysisUtils
from utils.boa_utils import BoaUtils
from utils.cell_utils import CellUtils
from utils.common_utils import THERMOSTAT_STREAM, CommonUtils
from utils.kernel_utils import KernelUtils
from utils.logging import Logging
from utils.loop_utils import LoopUtils
from utils.state_utils import StateUtils

StepHook = Callable[[int, State], None]


def _kick_drift(dt: float, position_label: str) -> VectorKernel:
    def kick_drift(ctx: BlockContext) -> None:
        v = ctx["v"]
        v.inc_i(ctx["F"].i * (dt / (2.0 * ctx["m"].i)))
        ctx[position_label].inc_i(dt * v.i)

    return VectorKernel("velocity_position_update", kick_drift)


def _kick(dt: float) -> VectorKernel:
    def kick(ctx: BlockContext) -> None:
        ctx["v"].inc_i(ctx["F"].i * (dt / (2.0 * ctx["m"].i)))

    return VectorKernel("velocity_update", kick)


def _kinetic_energy(ctx: BlockContext) -> None:
    v = ctx["v"].i
    m = ctx["m"].i[:, 0]
    ctx["KE"].inc(np.sum(0.5 * m * (v[:, 0] * v[:, 0] + v[:, 1] * v[:, 1] + v[:, 2] * v[:, 2])))


def _lennard_jones(params: LJParams, compute_energy: bool) -> VectorKernel:
    sigma2, rc_sq, cv, cf = params.sigma2, params.rc_sq, params.cv, params.cf

    def force(ctx: BlockContext) -> None:
        r = ctx["r"]
        ri, rj = r.i, r.j
        dr0 = ri[:, 0] - rj[:, 0]
        dr1 = ri[:, 1] - rj[:, 1]
        dr2 = ri[:, 2] - rj[:, 2]
        dr_sq = dr0 * dr0 + dr1 * dr1 + dr2 * dr2
        within = dr_sq < rc_sq
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            r_m2 = sigma2 / dr_sq
            r_m4 = r_m2 * r_m2
            r_m6 = r_m4 * r_m2
            r_m8 = r_m4 * r_m4
            if compute_energy:
                ctx["u"].inc(np.sum(np.where(within, cv * ((r_m6 - 1.0) * r_m6 + 0.25), 0.0)))
            f_tmp = cf * (r_m6 - 0.5) * r_m8
            forces = np.where(
                within[:, None], f_tmp[:, None] * np.stack((dr0, dr1, dr2), axis=1), 0.0
            )
        ctx["F"].inc_i(forces)

    return VectorKernel("force", force)


def _andersen(probability: float, temperature: float) -> VectorKernel:
    def andersen(ctx: BlockContext) -> None:
        draws = ctx["draw"].i
        hit = draws[:, 0] < probability
        if not hit.any():
            return
        m = ctx["m"].i[hit]
        ctx["v"].write_i(np.sqrt(temperature / m) * draws[hit, 1:], where=hit)
        ctx["collisions"].inc(int(hit.sum()))

    return VectorKernel("andersen_thermostat", andersen)


class IntegratorUtils:
    def __init__(
        self,
        loop_utils: LoopUtils,
        state_utils: StateUtils,
        kernel_utils: KernelUtils,
        cell_utils: CellUtils,
        common_utils: CommonUtils,
        boa_utils: BoaUtils,
        analysis_utils: AnalysisUtils,
        logging: Logging,
    ):
        self.loop_utils = loop_utils
        self.state_utils = state_utils
        self.kernel_utils = kernel_utils
        self.cell_utils = cell_utils
        self.common_utils = common_utils
        self.boa_utils = boa_utils
        self.analysis_utils = analysis_utils
        self.logging = logging
        self._force_kernels: Dict[Tuple[KernelSource, LJParams], CompiledKernel] = {}

    def velocity_dat(self, state: State) -> ParticleDat:
        return self.state_utils.ensure_dat(state, VELOCITY, 3)

    def force_dat(self, state: State) -> ParticleDat:
        return self.state_utils.ensure_dat(state, FORCE, 3)

    def mass_dat(self, state: State, mass: Optional[float] = None) -> ParticleDat:
        """The per-particle mass dat; a given `mass` overwrites every entry."""
        if mass is not None and not mass > 0:
            error_msg = f"Mass must be positive, got {mass}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        dat = self.state_utils.ensure_dat(
            state, MASS, 1, initial_value=1.0 if mass is None else mass
        )
        if mass is not None:
            dat.values[:] = mass
        return dat

    def vv_first_half(
        self, state: State, dt: float, mass: Optional[float] = None, debug: bool = False
    ) -> None:
        bindings = [
            AccessBinding("v", self.velocity_dat(state), AccessMode.INC),
            AccessBinding(state.positions.name, state.positions, AccessMode.INC),
            AccessBinding("F", self.force_dat(state), AccessMode.READ),
            AccessBinding("m", self.mass_dat(state, mass), AccessMode.READ),
        ]
        self.loop_utils.particle_loop(
            state, _kick_drift(dt, state.positions.name), bindings, debug=debug
        )

    def vv_second_half(
        self, state: State, dt: float, mass: Optional[float] = None, debug: bool = False
    ) -> None:
        bindings = [
            AccessBinding("v", self.velocity_dat(state), AccessMode.INC),
            AccessBinding("F", self.force_dat(state), AccessMode.READ),
            AccessBinding("m", self.mass_dat(state, mass), AccessMode.READ),
        ]
        self.loop_utils.particle_loop(state, _kick(dt), bindings, debug=debug)

    def _compiled_force_kernel(
        self, force_kernel: KernelSource, params: LJParams, bindings
    ) -> CompiledKernel:
        key = (force_kernel, params)
        compiled = self._force_kernels.get(key)
        if compiled is None:
            compiled = self.kernel_utils.compile_kernel(
                force_kernel,
                bindings,
                LoopKind.PAIR,
                constants=(
                    Constant("sigma2", params.sigma2),
                    Constant("rc_sq", params.rc_sq),
                    Constant("CV", params.cv),
                    Constant("CF", params.cf),
                ),
            )
            self._force_kernels[key] = compiled
        return compiled

    def lj_force_energy(
        self,
        state: State,
        params: LJParams,
        compute_energy: bool = True,
        backend: Backend = Backend.NEIGHBOUR_LIST,
        delta: float = 0.0,
        force_kernel: Optional[KernelSource] = None,
        debug: bool = False,
    ) -> Optional[float]:
        """Fills F with Lennard-Jones forces and returns the potential energy
        (half the ordered-pair sum) when `compute_energy` is set."""
        forces = self.force_dat(state)
        u = self.state_utils.create_scalar_array("u")
        bindings = [
            AccessBinding("r", state.positions, AccessMode.READ),
            AccessBinding("F", forces, AccessMode.INC_ZERO),
            AccessBinding("u", u, AccessMode.INC_ZERO),
        ]
        kernel = (
            _lennard_jones(params, compute_energy)
            if force_kernel is None
            else self._compiled_force_kernel(force_kernel, params, bindings)
        )
        self.loop_utils.pair_loop(
            state, kernel, bindings, params.r_c, backend, delta, debug=debug
        )
        finite = np.isfinite(forces.values).all(axis=1)
        if not finite.all():
            bad = np.flatnonzero(~finite).tolist()
            error_msg = "Non-finite forces, particles coincide"
            self.logging.log(f"{error_msg}: {bad}", LogLevel.ERROR)
            raise NonFiniteError(error_msg, bad)
        potential = 0.5 * u.value if compute_energy else None
        if debug:
            self.logging.log(
                [
                    f"Kernel: {kernel.name}",
                    f"Potential: {potential}",
                    f"Max |F|: {np.abs(forces.values).max() if state.npart else 0.0}",
                ],
                LogLevel.DEBUG,
            )
        return potential

    def kinetic_energy(
        self, state: State, mass: Optional[float] = None, debug: bool = False
    ) -> float:
        ke = self.state_utils.create_scalar_array("KE")
        bindings = [
            AccessBinding("v", self.velocity_dat(state), AccessMode.READ),
            AccessBinding("m", self.mass_dat(state, mass), AccessMode.READ),
            AccessBinding("KE", ke, AccessMode.INC_ZERO),
        ]
        self.loop_utils.particle_loop(
            state, VectorKernel("kinetic_energy", _kinetic_energy), bindings, debug=debug
        )
        return float(ke.value)

    def temperature(self, state: State, kinetic: float) -> float:
        # three degrees of freedom go to the fixed total momentum
        dof = 3 * state.npart - 3
        if dof <= 0:
            return 0.0
        return 2.0 * kinetic / dof

    def total_momentum(self, state: State) -> Tuple[float, float, float]:
        momentum = (self.mass_dat(state).values * self.velocity_dat(state).values).sum(axis=0)
        return (float(momentum[0]), float(momentum[1]), float(momentum[2]))

    def max_speed(self, state: State) -> float:
        if state.npart == 0:
            return 0.0
        v = self.velocity_dat(state).values
        return float(np.sqrt(np.einsum("ij,ij->i", v, v).max()))

    def thermostat_generator(self, params: ThermostatParams) -> np.random.Generator:
        return self.common_utils.generator_for(params.rng_seed, THERMOSTAT_STREAM)

    def andersen_thermostat(
        self,
        state: State,
        params: ThermostatParams,
        dt: float,
        rng: Optional[np.random.Generator] = None,
        debug: bool = False,
    ) -> int:
        """Resamples each velocity with probability nu*dt from N(0, T/m) and
        returns the number of collisions. Draws are taken in particle index
        order so the outcome does not depend on the worker count."""
        probability = params.collision_frequency * dt
        if probability > 1.0:
            error_msg = (
                f"Collision probability nu*dt = {probability} exceeds 1 "
                f"(nu={params.collision_frequency}, dt={dt})"
            )
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        if probability == 0.0 or state.npart == 0:
            return 0
        if rng is None:
            rng = self.thermostat_generator(params)
        draws = self.state_utils.ensure_dat(state, THERMOSTAT_DRAW, 4)
        draws.values[:, 0] = rng.random(state.npart)
        draws.values[:, 1:] = rng.standard_normal((state.npart, 3))
        collisions = self.state_utils.create_scalar_array("collisions", dtype=DatType.INT64)
        bindings = [
            AccessBinding("v", self.velocity_dat(state), AccessMode.WRITE),
            AccessBinding("m", self.mass_dat(state), AccessMode.READ),
            AccessBinding("draw", draws, AccessMode.READ),
            AccessBinding("collisions", collisions, AccessMode.INC_ZERO),
        ]
        self.loop_utils.particle_loop(
            state, _andersen(probability, params.target_temperature), bindings, debug=debug
        )
        if debug:
            self.logging.log(
                [f"Probability: {probability}", f"Collisions: {collisions.value}"],
                LogLevel.DEBUG,
            )
        return int(collisions.value)

    def _build_neighbours(self, state: State, lj: LJParams, ir: IntegratorRange) -> None:
        state.neighbour_structure = self.cell_utils.build_neighbour_list(
            state, lj.r_c, ir.delta, reuse_limit=ir.reuse_limit
        )

    def _q_means(self, state: State, boa: BOAConfig, backend: Backend) -> Dict[int, float]:
        if backend is Backend.NEIGHBOUR_LIST:
            # the cached list belongs to the force cutoff
            backend = Backend.CELL_LIST
        moments = self.boa_utils.boa_moments(state, boa, backend)
        summary = self.analysis_utils.q_summary(self.boa_utils.boa_finalize(moments))
        return {l: entry.mean for l, entry in summary.items()}

    def observe(
        self,
        state: State,
        step: int,
        ir: IntegratorRange,
        potential: Optional[float],
        q_means: Optional[Dict[int, float]] = None,
    ) -> Observables:
        kinetic = self.kinetic_energy(state)
        return Observables(
            step=step,
            time=step * ir.dt,
            kinetic=kinetic,
            potential=potential,
            temperature=self.temperature(state, kinetic),
            momentum=self.total_momentum(state),
            rebuilds=ir.rebuilds,
            q_means=dict(q_means or {}),
        )

    def run_nve(
        self,
        state: State,
        lj: LJParams,
        ir: IntegratorRange,
        thermostat: Optional[ThermostatParams] = None,
        sample_interval: int = 10,
        boa: Optional[BOAConfig] = None,
        boa_interval: Optional[int] = None,
        step_hook: Optional[StepHook] = None,
        backend: Backend = Backend.NEIGHBOUR_LIST,
        force_kernel: Optional[KernelSource] = None,
        debug: bool = False,
    ) -> Iterator[Observables]:
        """Velocity Verlet. Yields observables at step 0, every
        `sample_interval` steps and at the last step."""
        if sample_interval < 1:
            error_msg = f"Sample interval must be at least 1, got {sample_interval}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        self.velocity_dat(state)
        self.mass_dat(state)
        rng = self.thermostat_generator(thermostat) if thermostat is not None else None
        backend = self.loop_utils.select_backend(state, lj.r_c, backend, ir.delta)
        use_list = backend is Backend.NEIGHBOUR_LIST
        run_boa = boa is not None and bool(boa_interval)
        ir.v_max_tracker = 0.0
        ir.steps_since_build = 0
        if use_list:
            self._build_neighbours(state, lj, ir)
        potential = self.lj_force_energy(
            state, lj, True, backend, ir.delta, force_kernel, debug=debug
        )
        q_means = self._q_means(state, boa, backend) if run_boa else {}
        yield self.observe(state, 0, ir, potential, q_means)
        for step in range(1, ir.n_max + 1):
            self.vv_first_half(state, ir.dt)
            if use_list:
                ns = state.neighbour_structure
                ir.steps_since_build += 1
                ns.steps_since_build = ir.steps_since_build
                ir.observe_speed(self.max_speed(state))
                if self.cell_utils.needs_rebuild(ns, ir.dt, ir.v_max_tracker):
                    forced = 2.0 * ir.steps_since_build * ir.dt * ir.v_max_tracker >= ir.delta
                    if forced:
                        self.logging.log(
                            f"Step {step}: displacement bound reached after "
                            f"{ir.steps_since_build} steps (v_max={ir.v_max_tracker}), rebuilding",
                            LogLevel.INFO,
                        )
                    self._build_neighbours(state, lj, ir)
                    ir.mark_rebuilt(forced)
            sample = step % sample_interval == 0 or step == ir.n_max
            potential = self.lj_force_energy(
                state, lj, sample, backend, ir.delta, force_kernel
            )
            if step_hook is not None:
                step_hook(step, state)
            self.vv_second_half(state, ir.dt)
            if thermostat is not None:
                self.andersen_thermostat(state, thermostat, ir.dt, rng)
            if run_boa and step % boa_interval == 0:
                q_means = self._q_means(state, boa, backend)
            if sample:
                observables = self.observe(state, step, ir, potential, q_means)
                if debug:
                    self.logging.log(
                        [
                            f"Step: {step}",
                            f"Total energy: {observables.total}",
                            f"Rebuilds: {ir.rebuilds} ({ir.forced_rebuilds} forced)",
                        ],
                        LogLevel.DEBUG,
                    )
                yield observables
