from typing import Dict, List, Optional

from custom_types.access_view import GlobalView, ParticleView, SideView, View
from custom_types.errors import AccessViolationError


class KernelContext:
    """Capability views handed to per-item kernels (DSL or python callables)."""

    def __init__(self, views: Dict[str, View], position_label: Optional[str] = None):
        self.views = views
        self._i_sides: List[SideView] = []
        self._j_sides: List[SideView] = []
        self._position_j: Optional[SideView] = None
        for label, view in views.items():
            if isinstance(view, ParticleView):
                self._i_sides.append(view.i)
                self._j_sides.append(view.j)
                if label == position_label:
                    self._position_j = view.j

    def __getitem__(self, label: str) -> View:
        try:
            return self.views[label]
        except KeyError:
            raise AccessViolationError(label, "UNBOUND", "label is not bound to this loop")

    def __contains__(self, label: str) -> bool:
        return label in self.views

    def bind_particle(self, i: int) -> None:
        for side in self._i_sides:
            side.row = i

    def bind_pair(self, i: int, j: int, offset: Optional[List[float]]) -> None:
        for side in self._i_sides:
            side.row = i
        for side in self._j_sides:
            side.row = j
        if self._position_j is not None:
            self._position_j.offset = offset

    def globals(self) -> Dict[str, GlobalView]:
        return {k: v for k, v in self.views.items() if isinstance(v, GlobalView)}
