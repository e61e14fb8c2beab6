from dataclasses import dataclass, field
from typing import Callable, FrozenSet

from custom_types.access_use import AccessUse
from custom_types.kernel_ast import KernelAST
from custom_types.kernel_context import KernelContext
from custom_types.loop_kind import LoopKind


@dataclass(frozen=True)
class CompiledKernel:
    name: str
    ast: KernelAST = field(repr=False)
    loop_kind: LoopKind
    access_plan: FrozenSet[AccessUse]
    program: Callable[[KernelContext], None] = field(repr=False, compare=False)

    def __call__(self, ctx: KernelContext) -> None:
        self.program(ctx)
