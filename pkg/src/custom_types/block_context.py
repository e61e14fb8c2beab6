from typing import Dict, Optional, Tuple, Union

import numpy as np

from constants.access_rules import GLOBAL_ACCESS_RULES, PARTICLE_ACCESS_RULES
from custom_types.access_kind import AccessKind
from custom_types.access_mode import AccessMode
from custom_types.access_scope import AccessScope
from custom_types.errors import AccessViolationError


class BlockView:
    """Gathered rows of a bound ParticleDat for one worker block.

    Particle loops see rows span[0]:span[1]; pair loops see one row per
    candidate pair, with `rows_i` sorted ascending inside the span. j reads
    come from `values_j`, the loop-start copy for RW bindings."""

    def __init__(
        self,
        label: str,
        mode: AccessMode,
        values: np.ndarray,
        span: Tuple[int, int],
        rows_i: Optional[np.ndarray] = None,
        rows_j: Optional[np.ndarray] = None,
        offsets: Optional[np.ndarray] = None,
        values_j: Optional[np.ndarray] = None,
    ) -> None:
        rules = PARTICLE_ACCESS_RULES[mode]
        self.label = label
        self.mode = mode
        self.values = values
        self.values_j = values if values_j is None else values_j
        self.span = span
        self.rows_i = rows_i
        self.rows_j = rows_j
        self.offsets = offsets
        self.can_read_i = (AccessScope.I, AccessKind.READ) in rules
        self.can_read_j = (AccessScope.J, AccessKind.READ) in rules and rows_j is not None
        self.can_increment = (AccessScope.I, AccessKind.INCREMENT) in rules
        self.can_write = (AccessScope.I, AccessKind.WRITE) in rules

    @property
    def is_pair(self) -> bool:
        return self.rows_i is not None

    def _violation(self, detail: str) -> AccessViolationError:
        return AccessViolationError(self.label, self.mode.name, detail)

    @property
    def i(self) -> np.ndarray:
        if not self.can_read_i:
            raise self._violation(f"read of '{self.label}.i' is not permitted")
        if self.is_pair:
            return self.values[self.rows_i]
        return self.values[self.span[0] : self.span[1]].copy()

    @property
    def j(self) -> np.ndarray:
        if not self.can_read_j:
            raise self._violation(f"read of '{self.label}.j' is not permitted")
        gathered = self.values_j[self.rows_j]
        if self.offsets is not None:
            return gathered + self.offsets
        return gathered

    def i_columns(self, stop: int) -> np.ndarray:
        """Like `i`, restricted to components [0, stop)."""
        if not self.can_read_i:
            raise self._violation(f"read of '{self.label}.i' is not permitted")
        if self.is_pair:
            return self.values[self.rows_i, :stop]
        return self.values[self.span[0] : self.span[1], :stop].copy()

    def j_columns(self, stop: int) -> np.ndarray:
        if not self.can_read_j:
            raise self._violation(f"read of '{self.label}.j' is not permitted")
        if self.offsets is not None:
            return self.values_j[self.rows_j, :stop] + self.offsets[:, :stop]
        return self.values_j[self.rows_j, :stop]

    def write_i(self, new_values: np.ndarray, where: Optional[np.ndarray] = None) -> None:
        if not self.can_write:
            raise self._violation(f"write of '{self.label}.i' is not permitted")
        new_values = np.asarray(new_values).reshape(-1, self.values.shape[1])
        if self.is_pair:
            rows = self.rows_i if where is None else self.rows_i[where]
            self.values[rows] = new_values
        else:
            start, stop = self.span
            if where is None:
                self.values[start:stop] = new_values
            else:
                self.values[start:stop][where] = new_values

    def scatter_i(self, items: np.ndarray, columns: np.ndarray, new_values: np.ndarray) -> None:
        """Element writes: component columns[k] of the i row of item items[k]
        (a pair index in pair loops, a block-local row otherwise)."""
        if not self.can_write:
            raise self._violation(f"write of '{self.label}.i' is not permitted")
        rows = self.rows_i[items] if self.is_pair else self.span[0] + np.asarray(items)
        self.values[rows, columns] = new_values

    def inc_i(self, delta: np.ndarray, where: Optional[np.ndarray] = None) -> None:
        if not self.can_increment:
            raise self._violation(f"increment of '{self.label}.i' is not permitted")
        ncomp = self.values.shape[1]
        delta = np.asarray(delta).reshape(-1, ncomp)
        start, stop = self.span
        if not self.is_pair:
            if where is None:
                self.values[start:stop] += delta.astype(self.values.dtype, copy=False)
            else:
                block = self.values[start:stop]
                block[where] += delta.astype(self.values.dtype, copy=False)
            return
        rows = self.rows_i if where is None else self.rows_i[where]
        local = rows - start
        for k in range(ncomp):
            # bincount sums each row's contributions in pair order
            sums = np.bincount(local, weights=delta[:, k], minlength=stop - start)
            if self.values.dtype.kind == "i":
                self.values[start:stop, k] += np.rint(sums).astype(self.values.dtype)
            else:
                self.values[start:stop, k] += sums


class BlockGlobalView:
    def __init__(self, label: str, mode: AccessMode, values: np.ndarray) -> None:
        rules = GLOBAL_ACCESS_RULES[mode]
        self.label = label
        self.mode = mode
        self.values = values
        self.can_read = AccessKind.READ in rules
        self.can_increment = AccessKind.INCREMENT in rules
        self.can_write = AccessKind.WRITE in rules

    @property
    def value(self) -> np.ndarray:
        if not self.can_read:
            raise AccessViolationError(self.label, self.mode.name, "read is not permitted")
        return self.values.copy()

    def inc(self, delta: Union[float, int, np.ndarray]) -> None:
        if not self.can_increment:
            raise AccessViolationError(
                self.label, self.mode.name, "increment is not permitted"
            )
        self.values += np.asarray(delta, dtype=self.values.dtype)

    def set(self, new_values: Union[float, int, np.ndarray]) -> None:
        if not self.can_write:
            raise AccessViolationError(self.label, self.mode.name, "write is not permitted")
        self.values[:] = new_values


class BlockContext:
    def __init__(
        self,
        views: Dict[str, Union[BlockView, BlockGlobalView]],
        size: int,
        span: Tuple[int, int],
    ) -> None:
        self.views = views
        self.size = size
        self.span = span

    def __getitem__(self, label: str) -> Union[BlockView, BlockGlobalView]:
        try:
            return self.views[label]
        except KeyError:
            raise AccessViolationError(label, "UNBOUND", "label is not bound to this loop")

    def __contains__(self, label: str) -> bool:
        return label in self.views
