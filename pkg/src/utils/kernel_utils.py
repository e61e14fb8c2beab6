import math
import operator
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from tree_sitter import Node

from constants.access_rules import GLOBAL_ACCESS_RULES, PARTICLE_ACCESS_RULES
from constants.kernel_grammar import (
    ASSIGNMENT_OPERATORS,
    BINARY_OPERATORS,
    KERNEL_BUILTINS,
    KERNEL_FUNCTION_NAME,
    KERNEL_TYPES,
    PARTICLE_SIDES,
    UNARY_OPERATORS,
    UPDATE_OPERATORS,
)
from custom_types.access_binding import AccessBinding
from custom_types.access_kind import AccessKind
from custom_types.access_scope import AccessScope
from custom_types.access_use import AccessUse
from custom_types.compiled_kernel import CompiledKernel
from custom_types.constant import Constant
from custom_types.errors import KernelCompileError, KernelRuntimeError, KernelSyntaxError
from custom_types.kernel_ast import (
    Assignment,
    BinaryOp,
    Call,
    Conditional,
    Declaration,
    Expression,
    ExpressionStatement,
    ForLoop,
    GlobalAccess,
    IfStatement,
    KernelAST,
    Literal,
    Name,
    ParticleAccess,
    Statement,
    Target,
    UnaryOp,
)
from custom_types.kernel_context import KernelContext
from custom_types.kernel_source import KernelSource
from custom_types.log_level import LogLevel
from custom_types.loop_kind import LoopKind
from utils.logging import Logging
from utils.treesitter_utils import TreesitterUtils

Number = Union[int, float]
Evaluator = Callable[[KernelContext, List[Any]], Any]
Executor = Callable[[KernelContext, List[Any]], None]


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _divide(a: Number, b: Number) -> Number:
    if _is_int(a) and _is_int(b) and b != 0:
        # C truncates toward zero
        quotient = abs(a) // abs(b)
        return quotient if (a >= 0) == (b >= 0) else -quotient
    try:
        return a / b
    except ZeroDivisionError:
        if a == 0 or math.isnan(a):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)


def _remainder(a: Number, b: Number) -> Number:
    if b == 0:
        return math.nan
    if _is_int(a) and _is_int(b):
        return a - b * _divide(a, b)
    return math.fmod(a, b)


def _sqrt(x: Number) -> float:
    try:
        return math.sqrt(x)
    except ValueError:
        return math.nan


ARITHMETIC = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": _divide,
    "%": _remainder,
}
COMPARISONS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}
BUILTIN_FUNCTIONS = {"sqrt": _sqrt}


@dataclass
class _Local:
    slot: int
    is_int: bool
    const: bool


class _KernelLowering:
    """Resolves names, records the access plan and lowers an AST to closures.

    Every closure takes (ctx, frame); frame is the private list of local
    variable slots of one kernel invocation."""

    def __init__(
        self,
        kernel_name: str,
        global_labels: Iterable[str],
        particle_labels: Iterable[str],
        constants: Sequence[Constant],
    ) -> None:
        self.kernel_name = kernel_name
        self.global_labels = set(global_labels)
        self.particle_labels = set(particle_labels)
        self.scopes: List[Dict[str, _Local]] = [{}]
        self.initial_frame: List[Any] = []
        self.uses: Set[AccessUse] = set()
        self.constant_labels: Set[str] = set()
        for constant in constants:
            local = self._declare(constant.label, _is_int(constant.value), const=True)
            self.initial_frame[local.slot] = constant.value
            self.constant_labels.add(constant.label)

    def _error(self, detail: str) -> KernelCompileError:
        return KernelCompileError(f"Kernel '{self.kernel_name}': {detail}")

    def _declare(self, name: str, is_int: bool, const: bool) -> _Local:
        if name in self.scopes[-1]:
            raise self._error(f"'{name}' is declared twice in the same scope")
        if name in self.global_labels:
            raise self._error(f"local '{name}' shadows the bound label '{name}'")
        if name in self.constant_labels:
            raise self._error(f"local '{name}' shadows a constant")
        local = _Local(slot=len(self.initial_frame), is_int=is_int, const=const)
        self.initial_frame.append(None)
        self.scopes[-1][name] = local
        return local

    def _lookup(self, name: str) -> Optional[_Local]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def _cast(self, local: _Local, name: str) -> Callable[[Any], Number]:
        if not local.is_int:
            return float

        def to_int(value: Any) -> int:
            try:
                return int(value)
            except (OverflowError, ValueError):
                raise KernelRuntimeError(name, None, f"cannot store {value} in an integer local")

        return to_int

    def lower_block(self, statements: Sequence[Statement]) -> Tuple[Executor, ...]:
        self.scopes.append({})
        try:
            return tuple(self.lower_statement(s) for s in statements)
        finally:
            self.scopes.pop()

    def lower_statement(self, statement: Statement) -> Executor:
        if isinstance(statement, Declaration):
            return self._declaration(statement)
        if isinstance(statement, Assignment):
            return self._assignment(statement)
        if isinstance(statement, ExpressionStatement):
            expression = self.lower_expression(statement.expression)

            def run_expression(ctx, frame):
                expression(ctx, frame)

            return run_expression
        if isinstance(statement, ForLoop):
            return self._for_loop(statement)
        if isinstance(statement, IfStatement):
            return self._if_statement(statement)
        raise self._error(f"unsupported statement {type(statement).__name__}")

    def _declaration(self, statement: Declaration) -> Executor:
        if statement.ctype not in KERNEL_TYPES:
            raise self._error(f"unsupported type '{statement.ctype}'")
        is_int = KERNEL_TYPES[statement.ctype]
        initializer = (
            self.lower_expression(statement.initializer)
            if statement.initializer is not None
            else None
        )
        if statement.const and initializer is None:
            raise self._error(f"const local '{statement.name}' has no initializer")
        local = self._declare(statement.name, is_int, statement.const)
        slot = local.slot
        cast = self._cast(local, statement.name)
        if initializer is None:
            zero: Number = 0 if is_int else 0.0

            def run_declaration(ctx, frame):
                frame[slot] = zero

            return run_declaration

        def run_initialized_declaration(ctx, frame):
            frame[slot] = cast(initializer(ctx, frame))

        return run_initialized_declaration

    def _resolve_target(self, target: Target) -> Target:
        if isinstance(target, Name) and target.identifier in self.global_labels:
            if self._lookup(target.identifier) is None:
                return GlobalAccess(target.identifier, Literal(0))
        return target

    def _assignment(self, statement: Assignment) -> Executor:
        if statement.operator not in ASSIGNMENT_OPERATORS:
            raise self._error(f"unsupported assignment operator '{statement.operator}'")
        target = self._resolve_target(statement.target)
        value = self.lower_expression(statement.value)
        op = statement.operator
        if isinstance(target, Name):
            return self._local_assignment(target.identifier, op, value)
        if isinstance(target, ParticleAccess):
            if target.label not in self.particle_labels:
                raise self._error(f"'{target.label}' is not a bound ParticleDat")
            scope = target.side
        elif isinstance(target, GlobalAccess):
            if target.label not in self.global_labels:
                raise self._error(f"'{target.label}' is not a bound ScalarArray")
            scope = AccessScope.GLOBAL
        else:
            raise self._error(f"unsupported assignment target {type(target).__name__}")
        if op == "=":
            kinds = (AccessKind.WRITE,)
        elif op in ("+=", "-="):
            kinds = (AccessKind.INCREMENT,)
        else:
            kinds = (AccessKind.READ, AccessKind.WRITE)
        for kind in kinds:
            self.uses.add(AccessUse(target.label, scope, kind))
        index = self.lower_expression(target.index)
        label = target.label
        side_name = None if scope is AccessScope.GLOBAL else scope.value

        def view_of(ctx):
            view = ctx[label]
            return view if side_name is None else getattr(view, side_name)

        if op == "=":

            def run_write(ctx, frame):
                view_of(ctx)[index(ctx, frame)] = value(ctx, frame)

            return run_write
        if op == "+=":

            def run_increment(ctx, frame):
                view_of(ctx).increment(index(ctx, frame), value(ctx, frame))

            return run_increment
        if op == "-=":

            def run_decrement(ctx, frame):
                view_of(ctx).increment(index(ctx, frame), -value(ctx, frame))

            return run_decrement
        combine = ARITHMETIC[op[0]]

        def run_update(ctx, frame):
            view = view_of(ctx)
            k = index(ctx, frame)
            view[k] = combine(view[k], value(ctx, frame))

        return run_update

    def _local_assignment(self, name: str, op: str, value: Evaluator) -> Executor:
        local = self._lookup(name)
        if local is None:
            if name in self.particle_labels:
                raise self._error(f"'{name}' needs '.i[...]' or '.j[...]'")
            raise self._error(f"assignment to undeclared identifier '{name}'")
        if local.const:
            raise self._error(f"assignment to const '{name}'")
        slot = local.slot
        cast = self._cast(local, name)
        if op == "=":

            def run_store(ctx, frame):
                frame[slot] = cast(value(ctx, frame))

            return run_store
        combine = ARITHMETIC[op[0]]

        def run_compound_store(ctx, frame):
            frame[slot] = cast(combine(frame[slot], value(ctx, frame)))

        return run_compound_store

    def _for_loop(self, statement: ForLoop) -> Executor:
        self.scopes.append({})
        try:
            initializer = (
                self.lower_statement(statement.initializer)
                if statement.initializer is not None
                else None
            )
            condition = self.lower_expression(statement.condition)
            update = (
                self.lower_statement(statement.update)
                if statement.update is not None
                else None
            )
            body = self.lower_block(statement.body)
        finally:
            self.scopes.pop()

        def run_for(ctx, frame):
            if initializer is not None:
                initializer(ctx, frame)
            while condition(ctx, frame):
                for s in body:
                    s(ctx, frame)
                if update is not None:
                    update(ctx, frame)

        return run_for

    def _if_statement(self, statement: IfStatement) -> Executor:
        condition = self.lower_expression(statement.condition)
        consequence = self.lower_block(statement.consequence)
        alternative = self.lower_block(statement.alternative)

        def run_if(ctx, frame):
            for s in consequence if condition(ctx, frame) else alternative:
                s(ctx, frame)

        return run_if

    def lower_expression(self, expression: Expression) -> Evaluator:
        if isinstance(expression, Literal):
            constant = expression.value
            return lambda ctx, frame: constant
        if isinstance(expression, Name):
            return self._name(expression.identifier)
        if isinstance(expression, ParticleAccess):
            if expression.label not in self.particle_labels:
                raise self._error(f"'{expression.label}' is not a bound ParticleDat")
            self.uses.add(AccessUse(expression.label, expression.side, AccessKind.READ))
            return self._read(expression.label, expression.side.value, expression.index)
        if isinstance(expression, GlobalAccess):
            if expression.label not in self.global_labels:
                raise self._error(f"'{expression.label}' is not a bound ScalarArray")
            self.uses.add(AccessUse(expression.label, AccessScope.GLOBAL, AccessKind.READ))
            return self._read(expression.label, None, expression.index)
        if isinstance(expression, UnaryOp):
            return self._unary(expression)
        if isinstance(expression, BinaryOp):
            return self._binary(expression)
        if isinstance(expression, Conditional):
            condition = self.lower_expression(expression.condition)
            consequence = self.lower_expression(expression.consequence)
            alternative = self.lower_expression(expression.alternative)
            return lambda ctx, frame: (
                consequence(ctx, frame) if condition(ctx, frame) else alternative(ctx, frame)
            )
        if isinstance(expression, Call):
            if expression.function not in BUILTIN_FUNCTIONS:
                raise self._error(f"unknown builtin '{expression.function}'")
            function = BUILTIN_FUNCTIONS[expression.function]
            (argument,) = [self.lower_expression(a) for a in expression.arguments]
            return lambda ctx, frame: function(argument(ctx, frame))
        raise self._error(f"unsupported expression {type(expression).__name__}")

    def _name(self, name: str) -> Evaluator:
        local = self._lookup(name)
        if local is not None:
            slot = local.slot
            return lambda ctx, frame: frame[slot]
        if name in self.global_labels:
            return self.lower_expression(GlobalAccess(name, Literal(0)))
        if name in self.particle_labels:
            raise self._error(f"'{name}' needs '.i[...]' or '.j[...]'")
        raise self._error(f"free identifier '{name}'")

    def _read(self, label: str, side_name: Optional[str], index_expr: Expression) -> Evaluator:
        index = self.lower_expression(index_expr)
        if side_name is None:
            return lambda ctx, frame: ctx[label][index(ctx, frame)]
        return lambda ctx, frame: getattr(ctx[label], side_name)[index(ctx, frame)]

    def _unary(self, expression: UnaryOp) -> Evaluator:
        operand = self.lower_expression(expression.operand)
        if expression.operator == "-":
            return lambda ctx, frame: -operand(ctx, frame)
        if expression.operator == "+":
            return operand
        if expression.operator == "!":
            return lambda ctx, frame: 0 if operand(ctx, frame) else 1
        raise self._error(f"unsupported unary operator '{expression.operator}'")

    def _binary(self, expression: BinaryOp) -> Evaluator:
        left = self.lower_expression(expression.left)
        right = self.lower_expression(expression.right)
        op = expression.operator
        if op == "&&":
            return lambda ctx, frame: 1 if (left(ctx, frame) and right(ctx, frame)) else 0
        if op == "||":
            return lambda ctx, frame: 1 if (left(ctx, frame) or right(ctx, frame)) else 0
        if op in COMPARISONS:
            compare = COMPARISONS[op]
            return lambda ctx, frame: 1 if compare(left(ctx, frame), right(ctx, frame)) else 0
        if op in ARITHMETIC:
            combine = ARITHMETIC[op]
            return lambda ctx, frame: combine(left(ctx, frame), right(ctx, frame))
        raise self._error(f"unsupported binary operator '{op}'")


class _KernelParser:
    """Converts the Tree-sitter body of one kernel into AST statements.
    Built fresh by each `KernelUtils.parse` call."""

    def __init__(self, kernel_utils: "KernelUtils", source: KernelSource, nlines: int) -> None:
        self.kernel_utils = kernel_utils
        self.source = source
        self.nlines = nlines

    def _error(self, node: Node, detail: str) -> KernelSyntaxError:
        return self.kernel_utils._syntax_error(self.source, node, detail, self.nlines)

    def _text(self, node: Node) -> str:
        return self.kernel_utils._text(node)

    def _named(self, node: Node) -> List[Node]:
        return self.kernel_utils._named(node)

    def convert_body(self, body: Node) -> Tuple[Statement, ...]:
        return tuple(
            statement
            for child in self._named(body)
            for statement in self._convert_statement(child)
        )

    def _unsupported(self, node: Node, what: str = "construct") -> KernelSyntaxError:
        return self._error(node, f"unsupported {what} '{self._text(node)[:40]}'")

    def _convert_statement(self, node: Node) -> List[Statement]:
        match node.type:
            case "compound_statement":
                return [s for child in self._named(node) for s in self._convert_statement(child)]
            case "declaration":
                return self._convert_declaration(node)
            case "expression_statement":
                children = self._named(node)
                if not children:
                    return []
                return [self._convert_simple_statement(children[0])]
            case "for_statement":
                return [self._convert_for(node)]
            case "if_statement":
                return [self._convert_if(node)]
            case "comment":
                return []
            case _:
                raise self._unsupported(node, "statement")

    def _convert_body(self, node: Optional[Node]) -> Tuple[Statement, ...]:
        if node is None:
            return ()
        return tuple(self._convert_statement(node))

    def _convert_declaration(self, node: Node) -> List[Statement]:
        const = False
        ctype: Optional[str] = None
        declarators: List[Tuple[str, Optional[Expression]]] = []
        for child in self._named(node):
            if child.type == "type_qualifier":
                if self._text(child) != "const":
                    raise self._unsupported(child, "qualifier")
                const = True
            elif child.type in ("primitive_type", "sized_type_specifier"):
                ctype = " ".join(self._text(child).split())
            elif child.type == "init_declarator":
                name_node = child.child_by_field_name("declarator")
                value_node = child.child_by_field_name("value")
                if name_node is None or name_node.type != "identifier" or value_node is None:
                    raise self._unsupported(child, "declarator")
                declarators.append((self._text(name_node), self._convert_expression(value_node)))
            elif child.type == "identifier":
                declarators.append((self._text(child), None))
            else:
                raise self._unsupported(child, "declaration")
        if ctype not in KERNEL_TYPES:
            raise self._unsupported(node, "type")
        return [
            Declaration(ctype=ctype, name=name, initializer=initializer, const=const)
            for name, initializer in declarators
        ]

    def _convert_simple_statement(self, node: Node) -> Statement:
        if node.type == "assignment_expression":
            left = node.child_by_field_name("left")
            right = node.child_by_field_name("right")
            op_node = node.child_by_field_name("operator")
            op = self._text(op_node) if op_node is not None else "="
            if op not in ASSIGNMENT_OPERATORS:
                raise self._unsupported(node, "assignment operator")
            return Assignment(
                target=self._convert_target(left),
                operator=op,
                value=self._convert_expression(right),
            )
        if node.type == "update_expression":
            argument = node.child_by_field_name("argument")
            op_node = node.child_by_field_name("operator")
            op = self._text(op_node) if op_node is not None else ""
            if op not in UPDATE_OPERATORS:
                raise self._unsupported(node, "update operator")
            return Assignment(
                target=self._convert_target(argument),
                operator=UPDATE_OPERATORS[op],
                value=Literal(1),
            )
        return ExpressionStatement(self._convert_expression(node))

    def _convert_for(self, node: Node) -> ForLoop:
        initializer_node = node.child_by_field_name("initializer")
        initializer: Optional[Statement] = None
        if initializer_node is not None:
            if initializer_node.type == "declaration":
                declarations = self._convert_declaration(initializer_node)
                if len(declarations) != 1:
                    raise self._unsupported(initializer_node, "loop initializer")
                initializer = declarations[0]
            else:
                initializer = self._convert_simple_statement(initializer_node)
        condition_node = node.child_by_field_name("condition")
        condition = (
            self._convert_expression(condition_node) if condition_node is not None else Literal(1)
        )
        update_node = node.child_by_field_name("update")
        update = self._convert_simple_statement(update_node) if update_node is not None else None
        return ForLoop(
            initializer=initializer,
            condition=condition,
            update=update,
            body=self._convert_body(node.child_by_field_name("body")),
        )

    def _convert_if(self, node: Node) -> IfStatement:
        alternative = node.child_by_field_name("alternative")
        if alternative is not None and alternative.type == "else_clause":
            inner = self._named(alternative)
            alternative = inner[0] if inner else None
        return IfStatement(
            condition=self._convert_expression(node.child_by_field_name("condition")),
            consequence=self._convert_body(node.child_by_field_name("consequence")),
            alternative=self._convert_body(alternative),
        )

    def _convert_target(self, node: Node) -> Target:
        if node.type == "identifier":
            return Name(self._text(node))
        if node.type == "subscript_expression":
            return self._convert_access(node)
        raise self._unsupported(node, "assignment target")

    def _convert_access(self, node: Node) -> Union[ParticleAccess, GlobalAccess]:
        argument = node.child_by_field_name("argument")
        index_node = node.child_by_field_name("index")
        if index_node is None:
            named = self._named(node)
            index_node = named[1] if len(named) > 1 else None
        if argument is None or index_node is None:
            raise self._unsupported(node, "subscript")
        index = self._convert_expression(index_node)
        if argument.type == "identifier":
            return GlobalAccess(self._text(argument), index)
        if argument.type == "field_expression":
            owner = argument.child_by_field_name("argument")
            field = argument.child_by_field_name("field")
            op_node = argument.child_by_field_name("operator")
            side = self._text(field) if field is not None else ""
            if (
                owner is not None
                and owner.type == "identifier"
                and side in PARTICLE_SIDES
                and (op_node is None or self._text(op_node) == ".")
            ):
                scope = AccessScope.I if side == "i" else AccessScope.J
                return ParticleAccess(self._text(owner), scope, index)
        raise self._unsupported(node, "property access")

    def _convert_expression(self, node: Optional[Node]) -> Expression:
        if node is None:
            raise RuntimeError("Expected an expression node")
        match node.type:
            case "number_literal":
                return Literal(self._number(node))
            case "true":
                return Literal(1)
            case "false":
                return Literal(0)
            case "identifier":
                return Name(self._text(node))
            case "parenthesized_expression":
                inner = self._named(node)
                if len(inner) != 1:
                    raise self._unsupported(node, "expression")
                return self._convert_expression(inner[0])
            case "binary_expression":
                op = self._text(node.child_by_field_name("operator"))
                if op not in BINARY_OPERATORS:
                    raise self._unsupported(node, "operator")
                return BinaryOp(
                    op,
                    self._convert_expression(node.child_by_field_name("left")),
                    self._convert_expression(node.child_by_field_name("right")),
                )
            case "unary_expression":
                op = self._text(node.child_by_field_name("operator"))
                if op not in UNARY_OPERATORS:
                    raise self._unsupported(node, "operator")
                return UnaryOp(op, self._convert_expression(node.child_by_field_name("argument")))
            case "conditional_expression":
                return Conditional(
                    self._convert_expression(node.child_by_field_name("condition")),
                    self._convert_expression(node.child_by_field_name("consequence")),
                    self._convert_expression(node.child_by_field_name("alternative")),
                )
            case "call_expression":
                return self._convert_call(node)
            case "subscript_expression":
                return self._convert_access(node)
            case _:
                raise self._unsupported(node, "expression")

    def _convert_call(self, node: Node) -> Call:
        function = node.child_by_field_name("function")
        arguments = node.child_by_field_name("arguments")
        name = self._text(function) if function is not None else ""
        if function is None or function.type != "identifier" or name not in KERNEL_BUILTINS:
            raise self._error(node, f"unknown builtin '{name}'")
        converted = tuple(
            self._convert_expression(a) for a in (self._named(arguments) if arguments else [])
        )
        if len(converted) != KERNEL_BUILTINS[name]:
            raise self._error(
                node,
                f"'{name}' takes {KERNEL_BUILTINS[name]} argument(s), got {len(converted)}",
            )
        return Call(name, converted)

    def _number(self, node: Node) -> Number:
        text = self._text(node).rstrip("fFlLuU")
        try:
            if text.lower().startswith("0x"):
                return int(text, 16)
            if any(c in text for c in ".eE"):
                return float(text)
            return int(text)
        except ValueError:
            raise self._unsupported(node, "number literal")


class KernelUtils:
    def __init__(self, treesitter_utils: TreesitterUtils, logging: Logging):
        self.treesitter_utils = treesitter_utils
        self.logging = logging

    def _syntax_error(self, source: KernelSource, node: Node, detail: str, nlines: int) -> KernelSyntaxError:
        row, column = node.start_point
        # row 0 is the wrapping function header
        line = min(max(row, 1), max(nlines, 1))
        if row < 1:
            column = 0
        error = KernelSyntaxError(f"Kernel '{source.name}': {detail}", line, column + 1)
        self.logging.log(str(error), LogLevel.ERROR)
        return error

    def _text(self, node: Node) -> str:
        return self.treesitter_utils.get_node_text_as_string(node) or ""

    def _named(self, node: Node) -> List[Node]:
        return [child for child in node.named_children if child.type != "comment"]

    def parse(self, source: KernelSource, debug: bool = False) -> KernelAST:
        nlines = source.code.count("\n") + 1
        wrapped = f"void {KERNEL_FUNCTION_NAME}(void) {{\n{source.code}\n}}\n"
        tree = self.treesitter_utils.convert_bytes_to_tree(
            self.treesitter_utils.convert_string_to_bytes(wrapped)
        )
        error_node = self.treesitter_utils.get_error_node(tree.root_node)
        if error_node is not None:
            if error_node.is_missing:
                detail = f"missing '{error_node.type}'"
            else:
                detail = f"unexpected '{self._text(error_node)[:40]}'"
            raise self._syntax_error(source, error_node, detail, nlines)
        definitions = self._named(tree.root_node)
        if len(definitions) != 1:
            raise self._syntax_error(
                source, definitions[-1], "unbalanced braces in kernel code", nlines
            )
        body = self.treesitter_utils.get_function_body(tree, KERNEL_FUNCTION_NAME)
        statements = _KernelParser(self, source, nlines).convert_body(body)
        ast = KernelAST(name=source.name, statements=statements)
        if debug:
            self.logging.log(
                [f"Kernel: {source.name}", f"Statements: {len(statements)}"],
                LogLevel.DEBUG,
            )
        return ast

    def bind_constants(
        self,
        ast: KernelAST,
        constants: Sequence[Constant],
        binding_labels: Iterable[str] = (),
        debug: bool = False,
    ) -> KernelAST:
        values = self._constant_values(ast.name, constants, binding_labels)
        if not values:
            return ast
        statements = tuple(self._bind_statement(s, values, ast.name) for s in ast.statements)
        if debug:
            self.logging.log(
                [f"Kernel: {ast.name}", f"Constants: {values}"], LogLevel.DEBUG
            )
        return KernelAST(name=ast.name, statements=statements)

    def _constant_values(
        self, kernel_name: str, constants: Sequence[Constant], binding_labels: Iterable[str]
    ) -> Dict[str, Number]:
        values: Dict[str, Number] = {}
        labels = set(binding_labels)
        for constant in constants:
            if constant.label in values:
                error_msg = f"Kernel '{kernel_name}': constant '{constant.label}' is given twice"
                self.logging.log(error_msg, LogLevel.ERROR)
                raise KernelCompileError(error_msg)
            if constant.label in labels:
                error_msg = (
                    f"Kernel '{kernel_name}': constant '{constant.label}' collides with a binding label"
                )
                self.logging.log(error_msg, LogLevel.ERROR)
                raise KernelCompileError(error_msg)
            values[constant.label] = constant.value
        return values

    def _bind_statement(self, statement: Statement, values: Dict[str, Number], kernel_name: str) -> Statement:
        bind = lambda e: self._bind_expression(e, values)
        if isinstance(statement, Declaration):
            if statement.name in values:
                error_msg = f"Kernel '{kernel_name}': local '{statement.name}' shadows a constant"
                self.logging.log(error_msg, LogLevel.ERROR)
                raise KernelCompileError(error_msg)
            initializer = bind(statement.initializer) if statement.initializer is not None else None
            return Declaration(statement.ctype, statement.name, initializer, statement.const)
        if isinstance(statement, Assignment):
            target = statement.target
            if isinstance(target, Name):
                if target.identifier in values:
                    error_msg = f"Kernel '{kernel_name}': assignment to constant '{target.identifier}'"
                    self.logging.log(error_msg, LogLevel.ERROR)
                    raise KernelCompileError(error_msg)
            else:
                target = replace(target, index=bind(target.index))
            return Assignment(target, statement.operator, bind(statement.value))
        if isinstance(statement, ExpressionStatement):
            return ExpressionStatement(bind(statement.expression))
        if isinstance(statement, ForLoop):
            return ForLoop(
                initializer=(
                    self._bind_statement(statement.initializer, values, kernel_name)
                    if statement.initializer is not None
                    else None
                ),
                condition=bind(statement.condition),
                update=(
                    self._bind_statement(statement.update, values, kernel_name)
                    if statement.update is not None
                    else None
                ),
                body=tuple(self._bind_statement(s, values, kernel_name) for s in statement.body),
            )
        if isinstance(statement, IfStatement):
            return IfStatement(
                condition=bind(statement.condition),
                consequence=tuple(
                    self._bind_statement(s, values, kernel_name) for s in statement.consequence
                ),
                alternative=tuple(
                    self._bind_statement(s, values, kernel_name) for s in statement.alternative
                ),
            )
        return statement

    def _bind_expression(self, expression: Expression, values: Dict[str, Number]) -> Expression:
        bind = lambda e: self._bind_expression(e, values)
        if isinstance(expression, Name):
            if expression.identifier in values:
                return Literal(values[expression.identifier])
            return expression
        if isinstance(expression, ParticleAccess):
            return ParticleAccess(expression.label, expression.side, bind(expression.index))
        if isinstance(expression, GlobalAccess):
            return GlobalAccess(expression.label, bind(expression.index))
        if isinstance(expression, UnaryOp):
            return UnaryOp(expression.operator, bind(expression.operand))
        if isinstance(expression, BinaryOp):
            return BinaryOp(expression.operator, bind(expression.left), bind(expression.right))
        if isinstance(expression, Conditional):
            return Conditional(
                bind(expression.condition),
                bind(expression.consequence),
                bind(expression.alternative),
            )
        if isinstance(expression, Call):
            return Call(expression.function, tuple(bind(a) for a in expression.arguments))
        return expression

    def access_plan(
        self,
        ast: KernelAST,
        global_labels: Iterable[str] = (),
        particle_labels: Optional[Iterable[str]] = None,
        constants: Sequence[Constant] = (),
    ) -> FrozenSet[AccessUse]:
        """Static (label, scope, kind) uses of a kernel.

        Without `particle_labels` every property accessed as X.i/X.j counts
        as a particle label."""
        if particle_labels is None:
            particle_labels = self._particle_labels_of(ast)
        lowering = _KernelLowering(ast.name, global_labels, particle_labels, constants)
        try:
            lowering.lower_block(ast.statements)
        except KernelCompileError as e:
            self.logging.log(str(e), LogLevel.ERROR)
            raise
        return frozenset(lowering.uses)

    def _particle_labels_of(self, ast: KernelAST) -> Set[str]:
        labels: Set[str] = set()

        def visit(node: Any) -> None:
            if isinstance(node, ParticleAccess):
                labels.add(node.label)
            if isinstance(node, (tuple, list)):
                for item in node:
                    visit(item)
            elif hasattr(node, "__dataclass_fields__"):
                for name in node.__dataclass_fields__:
                    visit(getattr(node, name))

        visit(ast.statements)
        return labels

    def check_plan(
        self,
        kernel_name: str,
        plan: FrozenSet[AccessUse],
        bindings: Sequence[AccessBinding],
        loop_kind: LoopKind,
    ) -> None:
        by_label = {b.label: b for b in bindings}
        for use in sorted(plan, key=str):
            binding = by_label.get(use.label)
            error_msg: Optional[str] = None
            if binding is None:
                error_msg = f"'{use.label}' is used but not bound"
            elif binding.is_global:
                if use.scope is not AccessScope.GLOBAL:
                    error_msg = f"ScalarArray '{use.label}' is accessed as '{use.label}.{use.scope.value}'"
                elif use.kind not in GLOBAL_ACCESS_RULES[binding.mode]:
                    error_msg = f"{use.kind.value} of '{use.label}' is not permitted under {binding.mode.name}"
            elif use.scope is AccessScope.GLOBAL:
                error_msg = f"ParticleDat '{use.label}' needs '.i[...]' or '.j[...]'"
            elif use.scope is AccessScope.J and loop_kind is LoopKind.PARTICLE:
                error_msg = f"'{use.label}.j' is unavailable in a particle loop"
            elif (use.scope, use.kind) not in PARTICLE_ACCESS_RULES[binding.mode]:
                error_msg = (
                    f"{use.kind.value} of '{use.label}.{use.scope.value}' is not permitted "
                    f"under {binding.mode.name}"
                )
            if error_msg is not None:
                error_msg = f"Kernel '{kernel_name}': {error_msg}"
                self.logging.log(error_msg, LogLevel.ERROR)
                raise KernelCompileError(error_msg)

    def compile_kernel(
        self,
        kernel: Union[KernelSource, KernelAST],
        bindings: Sequence[AccessBinding],
        loop_kind: LoopKind,
        constants: Sequence[Constant] = (),
        substitute_constants: bool = True,
        debug: bool = False,
    ) -> CompiledKernel:
        if isinstance(kernel, KernelSource):
            constants = tuple(kernel.constants) + tuple(constants)
            ast = self.parse(kernel, debug=debug)
        else:
            ast = kernel
        labels = [b.label for b in bindings]
        if len(set(labels)) != len(labels):
            error_msg = f"Kernel '{ast.name}': binding labels are not distinct: {labels}"
            self.logging.log(error_msg, LogLevel.ERROR)
            raise KernelCompileError(error_msg)
        self._constant_values(ast.name, constants, labels)
        frame_constants: Sequence[Constant] = ()
        if substitute_constants:
            ast = self.bind_constants(ast, constants, labels)
        else:
            frame_constants = constants
        lowering = _KernelLowering(
            ast.name,
            [b.label for b in bindings if b.is_global],
            [b.label for b in bindings if not b.is_global],
            frame_constants,
        )
        try:
            statements = lowering.lower_block(ast.statements)
        except KernelCompileError as e:
            self.logging.log(str(e), LogLevel.ERROR)
            raise
        plan = frozenset(lowering.uses)
        self.check_plan(ast.name, plan, bindings, loop_kind)
        initial_frame = list(lowering.initial_frame)

        def program(ctx: KernelContext) -> None:
            frame = initial_frame.copy()
            for statement in statements:
                statement(ctx, frame)

        if debug:
            self.logging.log(
                [
                    f"Kernel: {ast.name}",
                    f"Loop: {loop_kind.value}",
                    f"Access plan: {sorted(str(u) for u in plan)}",
                    f"Frame slots: {len(initial_frame)}",
                ],
                LogLevel.DEBUG,
            )
        return CompiledKernel(
            name=ast.name, ast=ast, loop_kind=loop_kind, access_plan=plan, program=program
        )

    def evaluate(self, kernel: CompiledKernel, ctx: KernelContext, debug: bool = False) -> None:
        if debug:
            self.logging.log(f"Evaluating kernel '{kernel.name}'", LogLevel.DEBUG)
        kernel(ctx)
