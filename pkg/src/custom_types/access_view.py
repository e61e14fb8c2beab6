from typing import Any, List, Optional, Union

import numpy as np

from constants.access_rules import GLOBAL_ACCESS_RULES, PARTICLE_ACCESS_RULES
from custom_types.access_kind import AccessKind
from custom_types.access_mode import AccessMode
from custom_types.access_scope import AccessScope
from custom_types.errors import AccessViolationError, KernelRuntimeError


class SideView:
    """One particle's row of a bound ParticleDat, as seen by a per-item kernel.

    The engine moves `row` (and `offset` for the j side of the PositionDat)
    between invocations; reads return python scalars."""

    __slots__ = (
        "label",
        "mode",
        "side",
        "values",
        "ncomp",
        "row",
        "offset",
        "enabled",
        "can_read",
        "can_set",
        "can_increment",
    )

    def __init__(
        self,
        label: str,
        mode: AccessMode,
        side: AccessScope,
        values: np.ndarray,
        enabled: bool = True,
    ) -> None:
        rules = PARTICLE_ACCESS_RULES[mode]
        self.label = label
        self.mode = mode
        self.side = side
        self.values = values
        self.ncomp = values.shape[1]
        self.row = 0
        self.offset: Optional[List[float]] = None
        self.enabled = enabled
        self.can_read = (side, AccessKind.READ) in rules
        self.can_increment = (side, AccessKind.INCREMENT) in rules
        self.can_set = (side, AccessKind.WRITE) in rules

    def _violation(self, detail: str) -> AccessViolationError:
        if not self.enabled:
            detail = f"'{self.label}.{self.side.value}' is unavailable in a particle loop"
        return AccessViolationError(self.label, self.mode.name, detail)

    def _component(self, k: Any) -> int:
        if isinstance(k, (float, np.floating)):
            if not float(k).is_integer():
                raise KernelRuntimeError(self.label, k, "component index is not integral")
            k = int(k)
        if not 0 <= k < self.ncomp:
            raise KernelRuntimeError(
                self.label, k, f"component index outside [0, {self.ncomp})"
            )
        return int(k)

    def __getitem__(self, k: Any) -> Any:
        if not (self.enabled and self.can_read):
            raise self._violation(f"read of '{self.label}.{self.side.value}' is not permitted")
        k = self._component(k)
        value = self.values.item(self.row, k)
        if self.offset is not None:
            return value + self.offset[k]
        return value

    def __setitem__(self, k: Any, value: Any) -> None:
        if not (self.enabled and self.can_set):
            raise self._violation(f"write of '{self.label}.{self.side.value}' is not permitted")
        self.values[self.row, self._component(k)] = value

    def increment(self, k: Any, value: Any) -> None:
        if not (self.enabled and self.can_increment):
            raise self._violation(
                f"increment of '{self.label}.{self.side.value}' is not permitted"
            )
        k = self._component(k)
        self.values[self.row, k] = self.values.item(self.row, k) + value


class ParticleView:
    __slots__ = ("label", "mode", "i", "j")

    def __init__(
        self,
        label: str,
        mode: AccessMode,
        values: np.ndarray,
        pair: bool,
        j_values: Optional[np.ndarray] = None,
    ) -> None:
        self.label = label
        self.mode = mode
        self.i = SideView(label, mode, AccessScope.I, values)
        self.j = SideView(
            label, mode, AccessScope.J, values if j_values is None else j_values, enabled=pair
        )


class GlobalView:
    """A bound ScalarArray. Under INC/INC_ZERO `values` is the worker's
    private partial accumulator, merged by the engine after the loop."""

    __slots__ = ("label", "mode", "values", "ncomp", "can_read", "can_set", "can_increment")

    def __init__(self, label: str, mode: AccessMode, values: np.ndarray) -> None:
        rules = GLOBAL_ACCESS_RULES[mode]
        self.label = label
        self.mode = mode
        self.values = values
        self.ncomp = len(values)
        self.can_read = AccessKind.READ in rules
        self.can_increment = AccessKind.INCREMENT in rules
        self.can_set = AccessKind.WRITE in rules

    def _component(self, k: Any) -> int:
        if isinstance(k, (float, np.floating)):
            if not float(k).is_integer():
                raise KernelRuntimeError(self.label, k, "component index is not integral")
            k = int(k)
        if not 0 <= k < self.ncomp:
            raise KernelRuntimeError(
                self.label, k, f"component index outside [0, {self.ncomp})"
            )
        return int(k)

    def __getitem__(self, k: Any) -> Any:
        if not self.can_read:
            raise AccessViolationError(self.label, self.mode.name, "read is not permitted")
        return self.values.item(self._component(k))

    def __setitem__(self, k: Any, value: Any) -> None:
        if not self.can_set:
            raise AccessViolationError(self.label, self.mode.name, "write is not permitted")
        self.values[self._component(k)] = value

    def increment(self, k: Any, value: Any) -> None:
        if not self.can_increment:
            raise AccessViolationError(
                self.label, self.mode.name, "increment is not permitted"
            )
        k = self._component(k)
        self.values[k] = self.values.item(k) + value


View = Union[ParticleView, GlobalView]
