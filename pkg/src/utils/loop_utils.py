from concurrent.futures import ThreadPoolExecutor
from math import isclose
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from custom_types.access_binding import AccessBinding
from custom_types.access_mode import AccessMode
from custom_types.access_view import GlobalView, ParticleView, View
from custom_types.backend import Backend
from custom_types.block_context import BlockContext, BlockGlobalView, BlockView
from custom_types.compiled_kernel import CompiledKernel
from custom_types.kernel_context import KernelContext
from custom_types.log_level import LogLevel
from custom_types.loop_kind import LoopKind
from custom_types.pair_candidates import PairCandidates
from custom_types.particle_dat import ParticleDat
from custom_types.state import State
from custom_types.vector_kernel import VectorKernel
from utils.cell_utils import CellUtils
from utils.kernel_utils import KernelUtils
from utils.logging import Logging

Kernel = Union[CompiledKernel, VectorKernel, Callable[[KernelContext], None]]


class LoopUtils:
    def __init__(
        self,
        cell_utils: CellUtils,
        kernel_utils: KernelUtils,
        logging: Logging,
        workers: int = 1,
    ):
        self.cell_utils = cell_utils
        self.kernel_utils = kernel_utils
        self.logging = logging
        self.workers = 1
        self.pair_visits = 0
        self._executor: Optional[ThreadPoolExecutor] = None
        self.set_workers(workers)

    def set_workers(self, workers: int) -> None:
        if workers < 1:
            error_msg = f"Worker count must be at least 1, got {workers}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        if workers != self.workers:
            self.close()
        self.workers = workers

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def _blocks(self, npart: int) -> List[Tuple[int, int]]:
        if npart == 0:
            return []
        nblocks = min(self.workers, npart)
        bounds = [(npart * w) // nblocks for w in range(nblocks + 1)]
        return [(bounds[w], bounds[w + 1]) for w in range(nblocks)]

    def _validate(
        self,
        state: State,
        kernel: Kernel,
        bindings: Sequence[AccessBinding],
        loop_kind: LoopKind,
    ) -> None:
        labels = [b.label for b in bindings]
        if len(set(labels)) != len(labels):
            error_msg = f"Binding labels are not distinct: {labels}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        for binding in bindings:
            if binding.is_global:
                if binding.mode in (AccessMode.WRITE, AccessMode.RW) and self.workers > 1:
                    error_msg = (
                        f"Global '{binding.label}' bound {binding.mode.name} needs a single "
                        f"worker, got {self.workers}"
                    )
                    self.logging.log(error_msg, LogLevel.ERROR)
                    raise ValueError(error_msg)
            elif not state.owns(binding.target):
                error_msg = f"'{binding.target.name}' bound as '{binding.label}' is not attached to the loop's state"
                self.logging.log(error_msg, LogLevel.ERROR)
                raise ValueError(error_msg)
        if isinstance(kernel, CompiledKernel):
            if kernel.loop_kind is not loop_kind:
                error_msg = (
                    f"Kernel '{kernel.name}' was compiled for a {kernel.loop_kind.value} loop, "
                    f"not a {loop_kind.value} loop"
                )
                self.logging.log(error_msg, LogLevel.ERROR)
                raise ValueError(error_msg)
            self.kernel_utils.check_plan(kernel.name, kernel.access_plan, bindings, loop_kind)

    def _prepare_targets(
        self, bindings: Sequence[AccessBinding], nblocks: int
    ) -> Dict[str, List[np.ndarray]]:
        """Zeroes INC_ZERO targets and returns per-block partial
        accumulators for incremented globals."""
        partials: Dict[str, List[np.ndarray]] = {}
        for binding in bindings:
            if binding.mode is AccessMode.INC_ZERO:
                binding.target.values[...] = 0
            if binding.is_global and binding.mode.is_increment:
                partials[binding.label] = [
                    np.zeros_like(binding.target.values) for _ in range(nblocks)
                ]
        return partials

    def _merge_and_sync(
        self, bindings: Sequence[AccessBinding], partials: Dict[str, List[np.ndarray]]
    ) -> None:
        for binding in bindings:
            if binding.label in partials:
                # block order keeps the sum reproducible for a fixed worker count
                for partial in partials[binding.label]:
                    binding.target.values += partial
            if isinstance(binding.target, ParticleDat):
                binding.target.dirty = False

    def _run_blocks(self, tasks: List[Callable[[], int]]) -> int:
        if len(tasks) <= 1 or self.workers == 1:
            return sum(task() for task in tasks)
        if self._executor is None:
            self._executor = ThreadPoolExecutor(
                max_workers=self.workers, thread_name_prefix="pairgenie-loop"
            )
        futures = [self._executor.submit(task) for task in tasks]
        visits = 0
        first_error: Optional[BaseException] = None
        for future in futures:
            try:
                visits += future.result()
            except BaseException as e:
                if first_error is None:
                    first_error = e
        if first_error is not None:
            self.logging.log(f"Loop block failed: {first_error}", LogLevel.ERROR)
            raise first_error
        return visits

    def _j_snapshots(self, bindings: Sequence[AccessBinding]) -> Dict[str, np.ndarray]:
        """j sides of RW ParticleDats read the values as they were when the
        pair loop started, whatever order the i rows are written in."""
        return {
            binding.label: binding.target.values.copy()
            for binding in bindings
            if not binding.is_global and binding.mode is AccessMode.RW
        }

    def _item_views(
        self,
        bindings: Sequence[AccessBinding],
        partials: Dict[str, List[np.ndarray]],
        block: int,
        pair: bool,
        snapshots: Optional[Dict[str, np.ndarray]] = None,
    ) -> Dict[str, View]:
        snapshots = snapshots or {}
        views: Dict[str, View] = {}
        for binding in bindings:
            if binding.is_global:
                values = (
                    partials[binding.label][block]
                    if binding.label in partials
                    else binding.target.values
                )
                views[binding.label] = GlobalView(binding.label, binding.mode, values)
            else:
                views[binding.label] = ParticleView(
                    binding.label,
                    binding.mode,
                    binding.target.values,
                    pair,
                    snapshots.get(binding.label),
                )
        return views

    def _block_views(
        self,
        state: State,
        bindings: Sequence[AccessBinding],
        partials: Dict[str, List[np.ndarray]],
        block: int,
        span: Tuple[int, int],
        rows_i: Optional[np.ndarray] = None,
        rows_j: Optional[np.ndarray] = None,
        offsets: Optional[np.ndarray] = None,
        snapshots: Optional[Dict[str, np.ndarray]] = None,
    ) -> Dict[str, Union[BlockView, BlockGlobalView]]:
        snapshots = snapshots or {}
        views: Dict[str, Union[BlockView, BlockGlobalView]] = {}
        for binding in bindings:
            if binding.is_global:
                values = (
                    partials[binding.label][block]
                    if binding.label in partials
                    else binding.target.values
                )
                views[binding.label] = BlockGlobalView(binding.label, binding.mode, values)
            else:
                is_position = binding.target is state.positions
                views[binding.label] = BlockView(
                    binding.label,
                    binding.mode,
                    binding.target.values,
                    span,
                    rows_i,
                    rows_j,
                    offsets if is_position else None,
                    snapshots.get(binding.label),
                )
        return views

    def particle_loop(
        self,
        state: State,
        kernel: Kernel,
        bindings: Sequence[AccessBinding],
        debug: bool = False,
    ) -> None:
        self._validate(state, kernel, bindings, LoopKind.PARTICLE)
        blocks = self._blocks(state.npart)
        partials = self._prepare_targets(bindings, len(blocks))

        def make_task(block: int, span: Tuple[int, int]) -> Callable[[], int]:
            def task() -> int:
                start, stop = span
                if isinstance(kernel, VectorKernel):
                    views = self._block_views(state, bindings, partials, block, span)
                    kernel(BlockContext(views, stop - start, span))
                    return stop - start
                ctx = KernelContext(self._item_views(bindings, partials, block, False))
                for i in range(start, stop):
                    ctx.bind_particle(i)
                    kernel(ctx)
                return stop - start

            return task

        tasks = [make_task(b, span) for b, span in enumerate(blocks)]
        invocations = self._run_blocks(tasks)
        self._merge_and_sync(bindings, partials)
        if debug:
            self.logging.log(
                [
                    f"Kernel: {getattr(kernel, 'name', repr(kernel))}",
                    f"Particles: {state.npart}",
                    f"Blocks: {blocks}",
                    f"Invocations: {invocations}",
                ],
                LogLevel.DEBUG,
            )

    def select_backend(
        self, state: State, r_c: float, preferred: Backend, delta: float = 0.0
    ) -> Backend:
        if preferred.uses_cells and not self.cell_utils.cells_feasible(state, r_c + delta):
            self.logging.log(
                f"Box {state.domain.extents} is too small for {preferred.value} at cutoff "
                f"{r_c + delta}, falling back to {Backend.ALL_PAIRS.value}",
                LogLevel.WARN,
            )
            return Backend.ALL_PAIRS
        return preferred

    def pair_candidates(
        self,
        state: State,
        r_c: float,
        backend: Backend,
        delta: float = 0.0,
        debug: bool = False,
    ) -> PairCandidates:
        if not r_c > 0:
            error_msg = f"Pair loop cutoff must be positive, got {r_c}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        if state.positions is None:
            error_msg = "Pair loop needs a state with a PositionDat"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        match backend:
            case Backend.ALL_PAIRS:
                return self.cell_utils.candidates_all_pairs(state, r_c, debug=debug)
            case Backend.CELL_LIST:
                return self.cell_utils.candidates_from_cells(state, r_c + delta, debug=debug)
            case _:
                return self._neighbour_candidates(state, r_c, delta, debug)

    def _neighbour_candidates(
        self, state: State, r_c: float, delta: float, debug: bool
    ) -> PairCandidates:
        structure = state.neighbour_structure
        if structure is not None and (
            state.positions.dirty or not structure.covers(state.positions.values)
        ):
            if debug:
                self.logging.log(
                    [
                        "Positions moved since the neighbour list was built, dropping it",
                        f"Max displacement: {structure.max_displacement(state.positions.values)}",
                        f"Skin: {structure.delta}",
                    ],
                    LogLevel.DEBUG,
                )
            state.neighbour_structure = structure = None
        if structure is not None and isclose(structure.r_c, r_c, rel_tol=1e-12):
            return structure.candidates
        built = self.cell_utils.build_neighbour_list(state, r_c, delta, debug=debug)
        if structure is None:
            state.neighbour_structure = built
        return built.candidates

    def pair_loop(
        self,
        state: State,
        kernel: Kernel,
        bindings: Sequence[AccessBinding],
        r_c: float,
        backend: Backend = Backend.NEIGHBOUR_LIST,
        delta: float = 0.0,
        debug: bool = False,
    ) -> None:
        self._validate(state, kernel, bindings, LoopKind.PAIR)
        candidates = self.pair_candidates(state, r_c, backend, delta, debug=debug)
        blocks = self._blocks(state.npart)
        partials = self._prepare_targets(bindings, len(blocks))
        snapshots = self._j_snapshots(bindings)
        extents = state.domain.extents_array
        position_label = next(
            (b.label for b in bindings if b.target is state.positions), None
        )

        def make_task(block: int, span: Tuple[int, int]) -> Callable[[], int]:
            def task() -> int:
                start, stop = span
                p0, p1 = int(candidates.offsets[start]), int(candidates.offsets[stop])
                offsets = candidates.shifts[p0:p1] * extents
                if isinstance(kernel, VectorKernel):
                    rows_i = np.repeat(
                        np.arange(start, stop, dtype=np.int64),
                        np.diff(candidates.offsets[start : stop + 1]),
                    )
                    views = self._block_views(
                        state,
                        bindings,
                        partials,
                        block,
                        span,
                        rows_i,
                        candidates.indices[p0:p1],
                        offsets,
                        snapshots,
                    )
                    kernel(BlockContext(views, p1 - p0, span))
                    return p1 - p0
                ctx = KernelContext(
                    self._item_views(bindings, partials, block, True, snapshots), position_label
                )
                js = candidates.indices[p0:p1].tolist()
                offset_rows = offsets.tolist()
                row_offsets = candidates.offsets[start : stop + 1].tolist()
                for i in range(start, stop):
                    for p in range(row_offsets[i - start] - p0, row_offsets[i - start + 1] - p0):
                        ctx.bind_pair(i, js[p], offset_rows[p])
                        kernel(ctx)
                return p1 - p0

            return task

        tasks = [make_task(b, span) for b, span in enumerate(blocks)]
        invocations = self._run_blocks(tasks)
        self.pair_visits += invocations
        self._merge_and_sync(bindings, partials)
        if debug:
            self.logging.log(
                [
                    f"Kernel: {getattr(kernel, 'name', repr(kernel))}",
                    f"Backend: {backend.value}",
                    f"Cutoff: {r_c}",
                    f"Candidate pairs: {candidates.npairs}",
                    f"Invocations: {invocations}",
                ],
                LogLevel.DEBUG,
            )
