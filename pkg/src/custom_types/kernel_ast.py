from dataclasses import dataclass
from typing import Optional, Tuple, Union

from custom_types.access_scope import AccessScope


@dataclass(frozen=True)
class Literal:
    value: Union[int, float]


@dataclass(frozen=True)
class Name:
    identifier: str


@dataclass(frozen=True)
class ParticleAccess:
    label: str
    side: AccessScope
    index: "Expression"


@dataclass(frozen=True)
class GlobalAccess:
    label: str
    index: "Expression"


@dataclass(frozen=True)
class UnaryOp:
    operator: str
    operand: "Expression"


@dataclass(frozen=True)
class BinaryOp:
    operator: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Conditional:
    condition: "Expression"
    consequence: "Expression"
    alternative: "Expression"


@dataclass(frozen=True)
class Call:
    function: str
    arguments: Tuple["Expression", ...]


Expression = Union[
    Literal, Name, ParticleAccess, GlobalAccess, UnaryOp, BinaryOp, Conditional, Call
]
Target = Union[Name, ParticleAccess, GlobalAccess]


@dataclass(frozen=True)
class Declaration:
    ctype: str
    name: str
    initializer: Optional[Expression] = None
    const: bool = False


@dataclass(frozen=True)
class Assignment:
    target: Target
    operator: str
    value: Expression


@dataclass(frozen=True)
class ExpressionStatement:
    expression: Expression


@dataclass(frozen=True)
class ForLoop:
    initializer: Optional["Statement"]
    condition: Expression
    update: Optional["Statement"]
    body: Tuple["Statement", ...]


@dataclass(frozen=True)
class IfStatement:
    condition: Expression
    consequence: Tuple["Statement", ...]
    alternative: Tuple["Statement", ...] = ()


Statement = Union[Declaration, Assignment, ExpressionStatement, ForLoop, IfStatement]


@dataclass(frozen=True)
class KernelAST:
    name: str
    statements: Tuple[Statement, ...]
