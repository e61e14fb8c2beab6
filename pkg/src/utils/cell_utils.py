from typing import Tuple

import numpy as np
from numba import njit

from custom_types.cell_list import CellList
from custom_types.errors import NonFiniteError
from custom_types.log_level import LogLevel
from custom_types.neighbour_structure import NeighbourStructure
from custom_types.pair_candidates import PairCandidates
from custom_types.state import State
from utils.logging import Logging

# Minimum cells per dimension for an unambiguous 27-cell stencil.
MIN_STENCIL_CELLS = 3
# Upper bound on the (i-chunk x N) distance block of the all-pairs scan.
ALL_PAIRS_CHUNK_ELEMENTS = 1 << 22


@njit(cache=True)
def _scan_stencil(
    wrapped,
    images,
    cell_coords,
    order,
    cell_start,
    counts,
    extents,
    cutoff_sq,
    offsets,
    indices,
    shifts,
    fill,
):
    """Counts (fill=False) or stores (fill=True) every j != i within the
    cutoff found in the 27 cells around i. Stored shifts satisfy
    image(j) = r_j + shift * L in the unwrapped frame."""
    npart = wrapped.shape[0]
    nx, ny, nz = counts[0], counts[1], counts[2]
    for i in range(npart):
        cursor = offsets[i]
        found = 0
        cx, cy, cz = cell_coords[i, 0], cell_coords[i, 1], cell_coords[i, 2]
        for dx in range(-1, 2):
            ox = cx + dx
            fx = 0
            if ox < 0:
                ox += nx
                fx = -1
            elif ox >= nx:
                ox -= nx
                fx = 1
            for dy in range(-1, 2):
                oy = cy + dy
                fy = 0
                if oy < 0:
                    oy += ny
                    fy = -1
                elif oy >= ny:
                    oy -= ny
                    fy = 1
                for dz in range(-1, 2):
                    oz = cz + dz
                    fz = 0
                    if oz < 0:
                        oz += nz
                        fz = -1
                    elif oz >= nz:
                        oz -= nz
                        fz = 1
                    cell = (ox * ny + oy) * nz + oz
                    for p in range(cell_start[cell], cell_start[cell + 1]):
                        j = order[p]
                        if j == i:
                            continue
                        d0 = wrapped[i, 0] - (wrapped[j, 0] + fx * extents[0])
                        d1 = wrapped[i, 1] - (wrapped[j, 1] + fy * extents[1])
                        d2 = wrapped[i, 2] - (wrapped[j, 2] + fz * extents[2])
                        if d0 * d0 + d1 * d1 + d2 * d2 <= cutoff_sq:
                            if fill:
                                indices[cursor + found] = j
                                shifts[cursor + found, 0] = fx + images[i, 0] - images[j, 0]
                                shifts[cursor + found, 1] = fy + images[i, 1] - images[j, 1]
                                shifts[cursor + found, 2] = fz + images[i, 2] - images[j, 2]
                            found += 1
        if not fill:
            offsets[i + 1] = found


@njit(cache=True)
def _sort_rows(offsets, indices, shifts):
    for i in range(offsets.shape[0] - 1):
        start, stop = offsets[i], offsets[i + 1]
        if stop - start < 2:
            continue
        perm = np.argsort(indices[start:stop])
        row = indices[start:stop].copy()
        row_shifts = shifts[start:stop].copy()
        for k in range(stop - start):
            indices[start + k] = row[perm[k]]
            shifts[start + k, 0] = row_shifts[perm[k], 0]
            shifts[start + k, 1] = row_shifts[perm[k], 1]
            shifts[start + k, 2] = row_shifts[perm[k], 2]


class CellUtils:
    def __init__(self, logging: Logging):
        self.logging = logging

    def cell_counts(self, extents: np.ndarray, width: float) -> Tuple[int, int, int]:
        if not width > 0:
            error_msg = f"Cell width must be positive, got {width}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        counts = np.floor(extents / width).astype(np.int64)
        return (int(counts[0]), int(counts[1]), int(counts[2]))

    def cells_feasible(self, state: State, width: float) -> bool:
        counts = self.cell_counts(state.domain.extents_array, width)
        return min(counts) >= MIN_STENCIL_CELLS

    def _wrap_with_images(self, state: State) -> Tuple[np.ndarray, np.ndarray]:
        """Positions folded into [0, L) plus the integer image counts k with
        position = wrapped + k * L. The PositionDat itself is left untouched."""
        positions = state.positions.values
        finite = np.isfinite(positions).all(axis=1)
        if not finite.all():
            bad = np.flatnonzero(~finite).tolist()
            error_msg = "Non-finite positions"
            self.logging.log(f"{error_msg}: {bad}", LogLevel.ERROR)
            raise NonFiniteError(error_msg, bad)
        extents = state.domain.extents_array
        images = np.floor(positions / extents)
        wrapped = positions - images * extents
        over = wrapped >= extents
        wrapped[over] -= extents[np.nonzero(over)[1]]
        images[over] += 1
        under = wrapped < 0.0
        wrapped[under] += extents[np.nonzero(under)[1]]
        images[under] -= 1
        return wrapped, images.astype(np.int64)

    def _bin(
        self, state: State, width: float, allow_single_cell: bool
    ) -> Tuple[CellList, np.ndarray, np.ndarray]:
        extents = state.domain.extents_array
        counts = self.cell_counts(extents, width)
        if min(counts) < 1:
            if not allow_single_cell:
                error_msg = (
                    f"Cell width {width} exceeds the smallest box extent {extents.min()}"
                )
                self.logging.log(error_msg, LogLevel.ERROR)
                raise ValueError(error_msg)
            counts = tuple(max(c, 1) for c in counts)
        counts_array = np.asarray(counts, dtype=np.int64)
        widths = extents / counts_array
        wrapped, images = self._wrap_with_images(state)
        coords = np.floor(wrapped / widths).astype(np.int64)
        # rounding can put a particle just below L into cell n
        np.clip(coords, 0, counts_array - 1, out=coords)
        cell_of = (coords[:, 0] * counts[1] + coords[:, 1]) * counts[2] + coords[:, 2]
        order = np.argsort(cell_of, kind="stable")
        ncells = int(np.prod(counts_array))
        cell_start = np.zeros(ncells + 1, dtype=np.int64)
        np.cumsum(np.bincount(cell_of, minlength=ncells), out=cell_start[1:])
        cell_list = CellList(
            cell_counts=counts,
            cell_widths=(float(widths[0]), float(widths[1]), float(widths[2])),
            cell_coords=coords,
            cell_of=cell_of,
            order=order,
            cell_start=cell_start,
        )
        return cell_list, wrapped, images

    def build_cell_list(
        self,
        state: State,
        width: float,
        allow_single_cell: bool = False,
        debug: bool = False,
    ) -> CellList:
        cell_list, _, _ = self._bin(state, width, allow_single_cell)
        if debug:
            occupancy = np.diff(cell_list.cell_start)
            self.logging.log(
                [
                    f"Cell counts: {cell_list.cell_counts}",
                    f"Cell widths: {cell_list.cell_widths}",
                    f"Max occupancy: {occupancy.max() if len(occupancy) else 0}",
                ],
                LogLevel.DEBUG,
            )
        return cell_list

    def candidates_from_cells(
        self, state: State, cutoff: float, debug: bool = False
    ) -> PairCandidates:
        if not self.cells_feasible(state, cutoff):
            counts = self.cell_counts(state.domain.extents_array, cutoff)
            error_msg = (
                f"Cutoff {cutoff} gives {counts} cells; cell-based pair search needs at "
                f"least {MIN_STENCIL_CELLS} per dimension, use the all_pairs backend"
            )
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        cell_list, wrapped, images = self._bin(state, cutoff, False)
        npart = state.npart
        counts = np.asarray(cell_list.cell_counts, dtype=np.int64)
        extents = state.domain.extents_array
        offsets = np.zeros(npart + 1, dtype=np.int64)
        empty_indices = np.zeros(0, dtype=np.int64)
        empty_shifts = np.zeros((0, 3), dtype=np.int64)
        cutoff_sq = cutoff * cutoff
        _scan_stencil(
            wrapped, images, cell_list.cell_coords, cell_list.order, cell_list.cell_start,
            counts, extents, cutoff_sq, offsets, empty_indices, empty_shifts, False,
        )
        np.cumsum(offsets, out=offsets)
        npairs = int(offsets[-1])
        indices = np.empty(npairs, dtype=np.int64)
        shifts = np.empty((npairs, 3), dtype=np.int64)
        _scan_stencil(
            wrapped, images, cell_list.cell_coords, cell_list.order, cell_list.cell_start,
            counts, extents, cutoff_sq, offsets, indices, shifts, True,
        )
        _sort_rows(offsets, indices, shifts)
        if debug:
            self.logging.log(
                [
                    f"Cutoff: {cutoff}",
                    f"Cells: {cell_list.cell_counts}",
                    f"Candidate pairs: {npairs}",
                ],
                LogLevel.DEBUG,
            )
        return PairCandidates(cutoff=cutoff, offsets=offsets, indices=indices, shifts=shifts)

    def candidates_all_pairs(
        self, state: State, cutoff: float, debug: bool = False
    ) -> PairCandidates:
        positions = state.positions.values
        extents = state.domain.extents_array
        npart = state.npart
        cutoff_sq = cutoff * cutoff
        chunk = max(1, ALL_PAIRS_CHUNK_ELEMENTS // max(npart, 1))
        counts = np.zeros(npart, dtype=np.int64)
        index_blocks = []
        shift_blocks = []
        for start in range(0, npart, chunk):
            stop = min(start + chunk, npart)
            diff = positions[start:stop, None, :] - positions[None, :, :]
            shift = np.rint(diff / extents)
            d = diff - shift * extents
            dist_sq = np.einsum("ijk,ijk->ij", d, d)
            mask = dist_sq <= cutoff_sq
            mask[np.arange(stop - start), np.arange(start, stop)] = False
            rows, cols = np.nonzero(mask)
            counts[start:stop] = np.bincount(rows, minlength=stop - start)
            index_blocks.append(cols.astype(np.int64))
            shift_blocks.append(shift[rows, cols].astype(np.int64))
        offsets = np.zeros(npart + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        indices = np.concatenate(index_blocks) if index_blocks else np.zeros(0, dtype=np.int64)
        shifts = (
            np.concatenate(shift_blocks) if shift_blocks else np.zeros((0, 3), dtype=np.int64)
        )
        if debug:
            self.logging.log(
                [f"Cutoff: {cutoff}", f"Candidate pairs: {int(offsets[-1])}"], LogLevel.DEBUG
            )
        return PairCandidates(cutoff=cutoff, offsets=offsets, indices=indices, shifts=shifts)

    def build_neighbour_list(
        self,
        state: State,
        r_c: float,
        delta: float,
        reuse_limit: int = 20,
        debug: bool = False,
    ) -> NeighbourStructure:
        if not r_c > 0 or delta < 0:
            error_msg = f"Neighbour list needs r_c > 0 and delta >= 0, got r_c={r_c}, delta={delta}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise ValueError(error_msg)
        candidates = self.candidates_from_cells(state, r_c + delta, debug=debug)
        structure = NeighbourStructure(
            r_c=r_c,
            delta=delta,
            candidates=candidates,
            build_positions=state.positions.values.copy(),
            reuse_limit=reuse_limit,
        )
        if debug:
            self.logging.log(
                [
                    f"Extended cutoff: {structure.extended_cutoff}",
                    f"Mean neighbours: {candidates.npairs / max(state.npart, 1):.2f}",
                ],
                LogLevel.DEBUG,
            )
        return structure

    def needs_rebuild(self, ns: NeighbourStructure, dt: float, v_max: float) -> bool:
        steps = ns.steps_since_build
        if steps <= 0:
            return False
        return 2.0 * steps * dt * v_max >= ns.delta or steps >= ns.reuse_limit
