from dataclasses import dataclass
from typing import Callable

from custom_types.block_context import BlockContext


@dataclass(frozen=True)
class VectorKernel:
    """Native kernel called once per worker block with gathered arrays."""

    name: str
    fn: Callable[[BlockContext], None]

    def __call__(self, ctx: BlockContext) -> None:
        self.fn(ctx)
