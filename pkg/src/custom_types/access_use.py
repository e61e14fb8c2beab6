from dataclasses import dataclass

from custom_types.access_kind import AccessKind
from custom_types.access_scope import AccessScope


@dataclass(frozen=True)
class AccessUse:
    label: str
    scope: AccessScope
    kind: AccessKind

    def __str__(self) -> str:
        return f"{self.label}.{self.scope.value}:{self.kind.value}"
