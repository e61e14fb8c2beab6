from custom_types.access_kind import AccessKind
from custom_types.access_mode import AccessMode
from custom_types.access_scope import AccessScope

# (scope, kind) uses each mode permits on a ParticleDat.
PARTICLE_ACCESS_RULES = {
    AccessMode.READ: frozenset(
        {(AccessScope.I, AccessKind.READ), (AccessScope.J, AccessKind.READ)}
    ),
    AccessMode.WRITE: frozenset({(AccessScope.I, AccessKind.WRITE)}),
    AccessMode.RW: frozenset(
        {
            (AccessScope.I, AccessKind.READ),
            (AccessScope.J, AccessKind.READ),
            (AccessScope.I, AccessKind.WRITE),
            (AccessScope.I, AccessKind.INCREMENT),
        }
    ),
    AccessMode.INC: frozenset(
        {(AccessScope.I, AccessKind.INCREMENT), (AccessScope.I, AccessKind.READ)}
    ),
    AccessMode.INC_ZERO: frozenset(
        {(AccessScope.I, AccessKind.INCREMENT), (AccessScope.I, AccessKind.READ)}
    ),
}

GLOBAL_ACCESS_RULES = {
    AccessMode.READ: frozenset({AccessKind.READ}),
    AccessMode.WRITE: frozenset({AccessKind.WRITE}),
    AccessMode.RW: frozenset(
        {AccessKind.READ, AccessKind.WRITE, AccessKind.INCREMENT}
    ),
    AccessMode.INC: frozenset({AccessKind.INCREMENT}),
    AccessMode.INC_ZERO: frozenset({AccessKind.INCREMENT}),
}
