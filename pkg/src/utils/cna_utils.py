from collections import defaultdict, deque
from typing import Callable, Iterable, Set, Tuple

import numpy as np

from constants.dat_names import (
    CNA_BOND_COUNT,
    CNA_BONDS,
    CNA_DIRECT_COUNT,
    CNA_TRIPLET_COUNT,
    CNA_TRIPLETS,
)
from constants.kernel_sources import CNA_DIRECT_BONDS, CNA_INDIRECT_BONDS
from custom_types.access_binding import AccessBinding
from custom_types.access_mode import AccessMode
from custom_types.backend import Backend
from custom_types.block_context import BlockContext
from custom_types.cna_environment import CNAEnvironment
from custom_types.constant import Constant
from custom_types.dat_type import DatType
from custom_types.errors import CapacityError
from custom_types.log_level import LogLevel
from custom_types.loop_kind import LoopKind
from custom_types.state import State
from custom_types.triplet_dat import TripletDat
from custom_types.vector_kernel import VectorKernel
from utils.kernel_utils import KernelUtils
from utils.logging import Logging
from utils.loop_utils import LoopUtils
from utils.state_utils import StateUtils

DEFAULT_NU_NB_MAX = 32
DEFAULT_NU_B_MAX = 512

Overflow = Callable[[int, int, str], None]


def max_cluster_size(edges: Iterable[Tuple[int, int]]) -> int:
    """Largest number of edges in one connected component, counted by a
    breadth-first traversal that removes every edge it visits."""
    remaining = {tuple(e) for e in edges}
    incident = defaultdict(set)
    for edge in remaining:
        incident[edge[0]].add(edge)
        incident[edge[1]].add(edge)
    largest = 0
    while remaining:
        queue = deque([min(remaining)[0]])
        size = 0
        while queue:
            v = queue.popleft()
            visited = [e for e in incident[v] if e in remaining]
            for edge in visited:
                remaining.discard(edge)
                queue.append(edge[1] if edge[0] == v else edge[0])
            size += len(visited)
        largest = max(largest, size)
    return largest


def _bonded(ctx: BlockContext, rc_sq: float) -> np.ndarray:
    r = ctx["r"]
    ri, rj = r.i, r.j
    dr0 = ri[:, 0] - rj[:, 0]
    dr1 = ri[:, 1] - rj[:, 1]
    dr2 = ri[:, 2] - rj[:, 2]
    return np.flatnonzero(dr0 * dr0 + dr1 * dr1 + dr2 * dr2 < rc_sq)


def _ranks(owner: np.ndarray) -> np.ndarray:
    """Position of each entry inside its run of equal (sorted) owners."""
    if len(owner) == 0:
        return np.zeros(0, dtype=np.int64)
    starts = np.flatnonzero(np.r_[True, owner[1:] != owner[:-1]])
    lengths = np.diff(np.r_[starts, len(owner)])
    return np.arange(len(owner)) - np.repeat(starts, lengths)


def _check_capacity(
    slots: np.ndarray, capacity: int, owner_ids: np.ndarray, what: str, overflow: Overflow
) -> None:
    over = np.flatnonzero(slots >= capacity)
    if len(over):
        overflow(int(owner_ids[over[0]]), capacity, what)


def _direct_bonds_kernel(rc_sq: float, capacity: int, overflow: Overflow) -> VectorKernel:
    def direct_bonds(ctx: BlockContext) -> None:
        bonded = _bonded(ctx, rc_sq)
        if not len(bonded):
            return
        ids_i = ctx["id"].i[bonded, 0]
        ids_j = ctx["id"].j[bonded, 0]
        rank = _ranks(ctx["r"].rows_i[bonded])
        _check_capacity(rank, capacity, ids_i, "bond", overflow)
        bonds = ctx["bond"]
        bonds.scatter_i(bonded, 2 * rank, ids_i)
        bonds.scatter_i(bonded, 2 * rank + 1, ids_j)
        ones = np.ones(len(bonded))
        ctx["n_nb"].inc_i(ones, where=bonded)
        ctx["n_bond"].inc_i(ones, where=bonded)

    return VectorKernel("cna_direct_bonds", direct_bonds)


def _environment_bonds_kernel(rc_sq: float, capacity: int, overflow: Overflow) -> VectorKernel:
    def environment_bonds(ctx: BlockContext) -> None:
        bonded = _bonded(ctx, rc_sq)
        if not len(bonded):
            return
        direct_j = ctx["n_nb"].j[bonded, 0]
        width = int(direct_j.max())
        if width == 0:
            return
        ids_i = ctx["id"].i[bonded, 0]
        bonds_j = ctx["bond"].j_columns(2 * width)[bonded]
        first, second = bonds_j[:, 0::2], bonds_j[:, 1::2]
        keep = (np.arange(width)[None, :] < direct_j[:, None]) & (second != ids_i[:, None])
        pair, k = np.nonzero(keep)
        if not len(pair):
            return
        items = bonded[pair]
        slots = ctx["n_bond"].i[items, 0] + _ranks(ctx["r"].rows_i[items])
        _check_capacity(slots, capacity, ids_i[pair], "bond", overflow)
        bonds = ctx["bond"]
        bonds.scatter_i(items, 2 * slots, first[pair, k])
        bonds.scatter_i(items, 2 * slots + 1, second[pair, k])
        ctx["n_bond"].inc_i(np.ones(len(items)), where=items)

    return VectorKernel("cna_environment_bonds", environment_bonds)


def _classify_kernel(rc_sq: float, capacity: int, overflow: Overflow) -> VectorKernel:
    def classify(ctx: BlockContext) -> None:
        bonded = _bonded(ctx, rc_sq)
        if not len(bonded):
            return
        direct_i = ctx["n_nb"].i[bonded, 0]
        total_i = ctx["n_bond"].i[bonded, 0]
        direct_j = ctx["n_nb"].j[bonded, 0]
        bonds_i = ctx["bond"].i_columns(2 * int(total_i.max()))[bonded]
        bonds_j = ctx["bond"].j_columns(2 * int(direct_j.max()))[bonded]
        triplets = np.empty((len(bonded), 3), dtype=np.int64)
        for p in range(len(bonded)):
            common = set(bonds_i[p, 1 : 2 * direct_i[p] : 2].tolist())
            common &= set(bonds_j[p, 1 : 2 * direct_j[p] : 2].tolist())
            edges: Set[Tuple[int, int]] = set()
            environment = bonds_i[p, 2 * direct_i[p] : 2 * total_i[p]].reshape(-1, 2).tolist()
            for v, w in environment:
                if v in common and w in common:
                    edges.add((v, w) if v < w else (w, v))
            triplets[p] = (len(common), len(edges), max_cluster_size(edges))
        rank = _ranks(ctx["r"].rows_i[bonded])
        _check_capacity(rank, capacity, ctx["id"].i[bonded, 0], "triplet", overflow)
        for c in range(3):
            ctx["T"].scatter_i(bonded, 3 * rank + c, triplets[:, c])
        ctx["t"].inc_i(np.ones(len(bonded)), where=bonded)

    return VectorKernel("cna_classify", classify)


class CnaUtils:
    def __init__(
        self,
        loop_utils: LoopUtils,
        state_utils: StateUtils,
        kernel_utils: KernelUtils,
        logging: Logging,
    ):
        self.loop_utils = loop_utils
        self.state_utils = state_utils
        self.kernel_utils = kernel_utils
        self.logging = logging

    def _overflow(self, particle_id: int, capacity: int, what: str) -> None:
        error = CapacityError(particle_id, capacity, what)
        self.logging.log(str(error), LogLevel.ERROR)
        raise error

    def _check_ids(self, state: State) -> None:
        ids = state.global_ids.values[:, 0]
        unique, counts = np.unique(ids, return_counts=True)
        if len(unique) != len(ids):
            error_msg = f"Global ids are not unique: {unique[counts > 1][:10].tolist()}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)

    def _check_box(self, state: State, r_c: float) -> None:
        # common neighbours are matched by global id, so two images of one
        # particle must never fall inside the same environment
        shortest = min(state.domain.extents)
        if shortest <= 3.0 * r_c:
            error_msg = (
                f"Common neighbour analysis needs every box side above 3 * r_c = {3.0 * r_c}, "
                f"got {shortest}"
            )
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)

    def max_cluster_size(self, edges: Iterable[Tuple[int, int]], debug: bool = False) -> int:
        size = max_cluster_size(edges)
        if debug:
            self.logging.log(f"Largest cluster: {size} edges", LogLevel.DEBUG)
        return size

    def _run(
        self,
        state: State,
        kernel: VectorKernel,
        source,
        bindings,
        r_c: float,
        backend: Backend,
        debug: bool,
    ) -> None:
        if source is not None:
            kernel = self.kernel_utils.compile_kernel(
                source, bindings, LoopKind.PAIR, constants=(Constant("rc_sq", r_c * r_c),)
            )
        backend = self.loop_utils.select_backend(state, r_c, backend)
        self.loop_utils.pair_loop(state, kernel, bindings, r_c, backend, debug=debug)

    def cna_direct_bonds(
        self,
        state: State,
        r_c: float,
        nu_b_max: int = DEFAULT_NU_B_MAX,
        backend: Backend = Backend.CELL_LIST,
        dsl: bool = False,
        debug: bool = False,
    ) -> CNAEnvironment:
        """Stores (G(i), G(j)) for every j within r_c as the first nu_nb
        entries of i's bond list. `dsl` runs the textual kernel instead."""
        self._check_ids(state)
        self._check_box(state, r_c)
        bonds = self.state_utils.ensure_dat(state, CNA_BONDS, 2 * nu_b_max, DatType.INT64, -1)
        nu_nb = self.state_utils.ensure_dat(state, CNA_DIRECT_COUNT, 1, DatType.INT64)
        nu_b = self.state_utils.ensure_dat(state, CNA_BOND_COUNT, 1, DatType.INT64)
        bindings = [
            AccessBinding("r", state.positions, AccessMode.READ),
            AccessBinding("id", state.global_ids, AccessMode.READ),
            AccessBinding("bond", bonds, AccessMode.WRITE),
            AccessBinding("n_nb", nu_nb, AccessMode.INC_ZERO),
            AccessBinding("n_bond", nu_b, AccessMode.INC_ZERO),
        ]
        self._run(
            state,
            _direct_bonds_kernel(r_c * r_c, nu_b_max, self._overflow),
            CNA_DIRECT_BONDS if dsl else None,
            bindings,
            r_c,
            backend,
            debug,
        )
        if debug:
            counts = nu_nb.values[:, 0]
            self.logging.log(
                [
                    f"Cutoff: {r_c}",
                    f"Direct bonds: {int(counts.sum())}",
                    f"Max neighbours: {int(counts.max()) if len(counts) else 0}",
                ],
                LogLevel.DEBUG,
            )
        return CNAEnvironment(bonds=bonds, nu_nb=nu_nb, nu_b=nu_b)

    def cna_environment_bonds(
        self,
        state: State,
        env: CNAEnvironment,
        r_c: float,
        backend: Backend = Backend.CELL_LIST,
        dsl: bool = False,
        debug: bool = False,
    ) -> CNAEnvironment:
        """Appends to i's bond list the direct bonds of each neighbour j that
        do not point back to i."""
        self._check_box(state, r_c)
        bindings = [
            AccessBinding("r", state.positions, AccessMode.READ),
            AccessBinding("id", state.global_ids, AccessMode.READ),
            AccessBinding("bond", env.bonds, AccessMode.RW),
            AccessBinding("n_nb", env.nu_nb, AccessMode.READ),
            AccessBinding("n_bond", env.nu_b, AccessMode.INC),
        ]
        self._run(
            state,
            _environment_bonds_kernel(r_c * r_c, env.bonds.ncomp // 2, self._overflow),
            CNA_INDIRECT_BONDS if dsl else None,
            bindings,
            r_c,
            backend,
            debug,
        )
        if debug:
            self.logging.log(
                [
                    f"Stored bonds: {int(env.nu_b.values.sum())}",
                    f"Max stored: {int(env.nu_b.values.max()) if state.npart else 0}",
                ],
                LogLevel.DEBUG,
            )
        return env

    def cna_classify(
        self,
        state: State,
        env: CNAEnvironment,
        r_c: float,
        nu_nb_max: int = DEFAULT_NU_NB_MAX,
        backend: Backend = Backend.CELL_LIST,
        debug: bool = False,
    ) -> TripletDat:
        self._check_box(state, r_c)
        triplets = self.state_utils.ensure_dat(
            state, CNA_TRIPLETS, 3 * nu_nb_max, DatType.INT64, -1
        )
        count = self.state_utils.ensure_dat(state, CNA_TRIPLET_COUNT, 1, DatType.INT64)
        bindings = [
            AccessBinding("r", state.positions, AccessMode.READ),
            AccessBinding("id", state.global_ids, AccessMode.READ),
            AccessBinding("n_nb", env.nu_nb, AccessMode.READ),
            AccessBinding("n_bond", env.nu_b, AccessMode.READ),
            AccessBinding("bond", env.bonds, AccessMode.READ),
            AccessBinding("T", triplets, AccessMode.WRITE),
            AccessBinding("t", count, AccessMode.INC_ZERO),
        ]
        self._run(
            state,
            _classify_kernel(r_c * r_c, nu_nb_max, self._overflow),
            None,
            bindings,
            r_c,
            backend,
            debug,
        )
        if debug:
            self.logging.log(
                [f"Classified bonds: {int(count.values.sum())}"], LogLevel.DEBUG
            )
        return TripletDat(triplets=triplets, count=count)
