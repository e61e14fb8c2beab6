from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from constants.kernel_sources import LENNARD_JONES, SIMPLE_PAIR_OPERATION
from custom_types.access_binding import AccessBinding
from custom_types.access_kind import AccessKind
from custom_types.access_mode import AccessMode
from custom_types.access_scope import AccessScope
from custom_types.access_use import AccessUse
from custom_types.access_view import ParticleView
from custom_types.backend import Backend
from custom_types.constant import Constant
from custom_types.dat_type import DatType
from custom_types.errors import KernelCompileError, KernelRuntimeError, KernelSyntaxError
from custom_types.kernel_ast import BinaryOp, Declaration, ForLoop, Literal, Name
from custom_types.kernel_context import KernelContext
from custom_types.kernel_source import KernelSource
from custom_types.lj_params import LJParams
from custom_types.loop_kind import LoopKind

LJ_CONSTANTS = (
    Constant("sigma2", 1.0),
    Constant("rc_sq", 6.25),
    Constant("CV", 4.0),
    Constant("CF", 48.0),
)


def test_lennard_jones_kernel_parses(kernel_utils):
    ast = kernel_utils.parse(LENNARD_JONES)
    assert ast.name == "force"
    assert len(ast.statements) == 13
    first = ast.statements[0]
    assert isinstance(first, Declaration)
    assert (first.ctype, first.name, first.const) == ("double", "dr0", True)
    assert first.initializer.operator == "-"


def test_lennard_jones_access_plan(kernel_utils):
    ast = kernel_utils.parse(LENNARD_JONES)
    plan = kernel_utils.access_plan(ast, global_labels=["u"], constants=LJ_CONSTANTS)
    assert plan == {
        AccessUse("r", AccessScope.I, AccessKind.READ),
        AccessUse("r", AccessScope.J, AccessKind.READ),
        AccessUse("u", AccessScope.GLOBAL, AccessKind.INCREMENT),
        AccessUse("F", AccessScope.I, AccessKind.INCREMENT),
    }


def test_empty_kernel_has_no_statements(kernel_utils):
    assert kernel_utils.parse(KernelSource("empty", "")).statements == ()
    assert kernel_utils.parse(KernelSource("blank", "\n  // nothing\n")).statements == ()


def test_bind_constants_replaces_loop_bound(kernel_utils):
    ast = kernel_utils.parse(SIMPLE_PAIR_OPERATION)
    loop = ast.statements[1]
    assert isinstance(loop, ForLoop)
    assert loop.condition == BinaryOp("<", Name("r"), Name("dimension"))

    bound = kernel_utils.bind_constants(ast, SIMPLE_PAIR_OPERATION.constants)
    assert bound.statements[1].condition == BinaryOp("<", Name("r"), Literal(3))


def test_bind_without_constants_is_identity(kernel_utils):
    ast = kernel_utils.parse(SIMPLE_PAIR_OPERATION)
    assert kernel_utils.bind_constants(ast, ()) is ast


def test_bind_constant_becomes_literal(kernel_utils):
    ast = kernel_utils.parse(KernelSource("cut", "double within = d < rc_sq;"))
    bound = kernel_utils.bind_constants(ast, (Constant("rc_sq", 6.25),))
    assert bound.statements[0].initializer == BinaryOp("<", Name("d"), Literal(6.25))


def test_constant_colliding_with_binding_label(state_utils, kernel_utils):
    s = state_utils.create_scalar_array("S")
    source = KernelSource("collide", "S[0] += 1.0;", (Constant("S", 2.0),))
    with pytest.raises(KernelCompileError):
        kernel_utils.compile_kernel(
            source, [AccessBinding("S", s, AccessMode.INC)], LoopKind.PARTICLE
        )


def test_assignment_to_constant_rejected(kernel_utils):
    ast = kernel_utils.parse(KernelSource("assign", "dimension = 4;"))
    with pytest.raises(KernelCompileError):
        kernel_utils.bind_constants(ast, (Constant("dimension", 3),))


def test_duplicate_constant_rejected(kernel_utils):
    ast = kernel_utils.parse(SIMPLE_PAIR_OPERATION)
    with pytest.raises(KernelCompileError):
        kernel_utils.bind_constants(ast, (Constant("dimension", 3), Constant("dimension", 2)))


def test_unbound_label_fails_at_compile(kernel_utils):
    source = KernelSource("stray", "x.i[0] = 1.0;")
    with pytest.raises(KernelCompileError):
        kernel_utils.compile_kernel(source, [], LoopKind.PARTICLE)


def test_free_identifier_fails_at_compile(kernel_utils):
    source = KernelSource("free", "double x = y;")
    with pytest.raises(KernelCompileError):
        kernel_utils.compile_kernel(source, [], LoopKind.PARTICLE)


def test_syntax_error_reports_line(kernel_utils):
    source = KernelSource("broken", "double a = 1.0;\nb.i[0] = a +;\n")
    with pytest.raises(KernelSyntaxError) as e:
        kernel_utils.parse(source)
    assert e.value.line == 2
    assert "broken" in str(e.value)


def test_unsupported_statement_rejected(kernel_utils):
    with pytest.raises(KernelSyntaxError):
        kernel_utils.parse(KernelSource("loop", "while (1) { }"))


def test_unknown_builtin_rejected(kernel_utils):
    with pytest.raises(KernelSyntaxError):
        kernel_utils.parse(KernelSource("call", "double x = exp(1.0);"))


def two_particle_pair_run(state_utils, kernel_utils, loop_utils, separation):
    state = state_utils.create_state(
        2, (10.0, 10.0, 10.0), [[1.0, 5.0, 5.0], [1.0 + separation, 5.0, 5.0]]
    )
    forces = state_utils.ensure_dat(state, "F", 3)
    u = state_utils.create_scalar_array("u")
    bindings = [
        AccessBinding("r", state.positions, AccessMode.READ),
        AccessBinding("F", forces, AccessMode.INC_ZERO),
        AccessBinding("u", u, AccessMode.INC_ZERO),
    ]
    kernel = kernel_utils.compile_kernel(
        LENNARD_JONES, bindings, LoopKind.PAIR, constants=LJ_CONSTANTS
    )
    loop_utils.pair_loop(state, kernel, bindings, 4.0, Backend.ALL_PAIRS)
    return forces.values, u.value


def test_lennard_jones_kernel_beyond_cutoff(state_utils, kernel_utils, loop_utils):
    forces, u = two_particle_pair_run(state_utils, kernel_utils, loop_utils, 3.0)
    np.testing.assert_array_equal(forces, np.zeros((2, 3)))
    assert u == 0.0


def test_lennard_jones_kernel_at_minimum(state_utils, kernel_utils, loop_utils):
    forces, u = two_particle_pair_run(state_utils, kernel_utils, loop_utils, 2.0 ** (1.0 / 6.0))
    np.testing.assert_allclose(forces, 0.0, atol=1e-12)
    np.testing.assert_allclose(u, 0.0, atol=1e-12)


def test_lennard_jones_kernel_matches_params(state_utils, kernel_utils, loop_utils):
    params = LJParams()
    assert (params.sigma2, params.rc_sq, params.cv, params.cf) == tuple(
        c.value for c in LJ_CONSTANTS
    )
    forces, _ = two_particle_pair_run(state_utils, kernel_utils, loop_utils, 1.0)
    # repulsive at r = sigma
    assert forces[0, 0] < 0.0 < forces[1, 0]
    np.testing.assert_allclose(forces[0, 0], -24.0)


def test_simple_pair_access_plan(state_utils, kernel_utils):
    state = state_utils.create_state(2, (10.0, 10.0, 10.0))
    a = state_utils.ensure_dat(state, "a", 3)
    a.values[:] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
    b = state_utils.ensure_dat(state, "b", 1)
    s = state_utils.create_scalar_array("S")
    bindings = [
        AccessBinding("a", a, AccessMode.READ),
        AccessBinding("b", b, AccessMode.INC),
        AccessBinding("S", s, AccessMode.INC),
    ]
    kernel = kernel_utils.compile_kernel(SIMPLE_PAIR_OPERATION, bindings, LoopKind.PAIR)
    assert kernel.access_plan == {
        AccessUse("a", AccessScope.I, AccessKind.READ),
        AccessUse("a", AccessScope.J, AccessKind.READ),
        AccessUse("b", AccessScope.I, AccessKind.INCREMENT),
        AccessUse("S", AccessScope.GLOBAL, AccessKind.INCREMENT),
    }


def test_substituted_and_frame_constants_agree(state_utils, kernel_utils, loop_utils, rng):
    positions = rng.random((60, 3)) * 10.0
    results = []
    for substitute in (True, False):
        state = state_utils.create_state(60, (10.0, 10.0, 10.0), positions)
        a = state_utils.ensure_dat(state, "a", 3)
        a.values[:] = positions
        b = state_utils.ensure_dat(state, "b", 1)
        s = state_utils.create_scalar_array("S")
        bindings = [
            AccessBinding("a", a, AccessMode.READ),
            AccessBinding("b", b, AccessMode.INC_ZERO),
            AccessBinding("S", s, AccessMode.INC_ZERO),
        ]
        kernel = kernel_utils.compile_kernel(
            SIMPLE_PAIR_OPERATION, bindings, LoopKind.PAIR, substitute_constants=substitute
        )
        loop_utils.pair_loop(state, kernel, bindings, 2.5, Backend.CELL_LIST)
        results.append((b.values.copy(), s.value))
    np.testing.assert_array_equal(results[0][0], results[1][0])
    assert results[0][1] == results[1][1]


def test_integer_division_truncates(state_utils, kernel_utils, loop_utils):
    state = state_utils.create_state(1, (10.0, 10.0, 10.0))
    n = state_utils.ensure_dat(state, "n", 2, DatType.INT64)
    source = KernelSource("divide", "int k = -7 / 2;\nn.i[0] = k;\nn.i[1] = -7 % 2;")
    bindings = [AccessBinding("n", n, AccessMode.WRITE)]
    kernel = kernel_utils.compile_kernel(source, bindings, LoopKind.PARTICLE)
    loop_utils.particle_loop(state, kernel, bindings)
    np.testing.assert_array_equal(n.values[0], [-3, -1])


def test_constants_carried_by_source(state_utils, kernel_utils, loop_utils):
    source = LENNARD_JONES.with_constants(*LJ_CONSTANTS)
    state = state_utils.create_state(2, (10.0, 10.0, 10.0), [[1.0, 5.0, 5.0], [2.0, 5.0, 5.0]])
    forces = state_utils.ensure_dat(state, "F", 3)
    u = state_utils.create_scalar_array("u")
    bindings = [
        AccessBinding("r", state.positions, AccessMode.READ),
        AccessBinding("F", forces, AccessMode.INC_ZERO),
        AccessBinding("u", u, AccessMode.INC_ZERO),
    ]
    kernel = kernel_utils.compile_kernel(source, bindings, LoopKind.PAIR)
    loop_utils.pair_loop(state, kernel, bindings, 4.0, Backend.ALL_PAIRS)
    np.testing.assert_allclose(forces.values[0, 0], -24.0)
    np.testing.assert_allclose(u.value, 2.0)


def particle_context(values, mode=AccessMode.WRITE):
    ctx = KernelContext({"b": ParticleView("b", mode, values, False)})
    ctx.bind_particle(0)
    return ctx


def test_evaluate_single_particle(state_utils, kernel_utils):
    b = state_utils.create_dat("b", 1, 3)
    values = b.values
    source = KernelSource("fill", "double x = 1.0 / 0.0;\nb.i[0] = x;\nb.i[1] = 0.0 / 0.0;\nb.i[2] = 2.5;")
    kernel = kernel_utils.compile_kernel(
        source, [AccessBinding("b", b, AccessMode.WRITE)], LoopKind.PARTICLE
    )
    kernel_utils.evaluate(kernel, particle_context(values))
    assert values[0, 0] == np.inf
    assert np.isnan(values[0, 1])
    assert values[0, 2] == 2.5


def test_component_out_of_range(state_utils, kernel_utils):
    b = state_utils.create_dat("b", 1, 3)
    values = b.values
    source = KernelSource("overflow", "int k = 3;\nb.i[k] = 1.0;")
    kernel = kernel_utils.compile_kernel(
        source, [AccessBinding("b", b, AccessMode.WRITE)], LoopKind.PARTICLE
    )
    with pytest.raises(KernelRuntimeError) as e:
        kernel_utils.evaluate(kernel, particle_context(values))
    assert (e.value.label, e.value.index) == ("b", 3)


def test_concurrent_parses_report_their_own_errors(kernel_utils):
    def parse_broken(k):
        lines = ["double a = 1.0;"] * k + ["double x = exp(a);"]
        source = KernelSource(f"kernel_{k}", "\n".join(lines))
        try:
            kernel_utils.parse(source)
        except KernelSyntaxError as e:
            return str(e), e.line
        return None, None

    with ThreadPoolExecutor(max_workers=8) as executor:
        results = list(executor.map(parse_broken, range(1, 41)))
    for k, (message, line) in enumerate(results, start=1):
        assert message is not None and f"'kernel_{k}'" in message
        assert line == k + 1


class RecordingSide:
    def __init__(self, label, scope, seen, rng):
        self.label, self.scope, self.seen, self.rng = label, scope, seen, rng

    def __getitem__(self, k):
        self.seen.add(AccessUse(self.label, self.scope, AccessKind.READ))
        return float(self.rng.random())

    def __setitem__(self, k, value):
        self.seen.add(AccessUse(self.label, self.scope, AccessKind.WRITE))

    def increment(self, k, value):
        self.seen.add(AccessUse(self.label, self.scope, AccessKind.INCREMENT))


class RecordingParticle:
    def __init__(self, label, seen, rng):
        self.i = RecordingSide(label, AccessScope.I, seen, rng)
        self.j = RecordingSide(label, AccessScope.J, seen, rng)


STATEMENT_TEMPLATES = (
    "double t{n} = a.i[{k}] - a.j[{k}];",
    "b.i[{k}] = a.i[{k}];",
    "b.i[{k}] += b.j[{k}];",
    "b.i[{k}] *= 2.0;",
    "g[0] += a.j[{k}];",
    "g[0] = b.i[{k}];",
    "if (a.i[{k}] < 0.5) {{ b.i[{k}] -= g[0]; }}",
    "if (b.j[{k}] > 0.5) {{ g[0] += 1.0; }} else {{ b.i[{k}] = a.j[{k}]; }}",
    "for (int q{n} = 0; q{n} < 2; ++q{n}) {{ b.i[q{n}] += a.j[q{n}]; }}",
    "double s{n} = a.i[{k}] > 0.5 ? b.j[{k}] : g[0];",
)


def test_static_access_plan_covers_every_dynamic_access(state_utils, kernel_utils, rng):
    a = state_utils.create_dat("a", 1, 3)
    b = state_utils.create_dat("b", 1, 3)
    g = state_utils.create_scalar_array("g", 1)
    bindings = [
        AccessBinding("a", a, AccessMode.READ),
        AccessBinding("b", b, AccessMode.RW),
        AccessBinding("g", g, AccessMode.RW),
    ]
    for trial in range(60):
        picks = rng.integers(0, len(STATEMENT_TEMPLATES), size=int(rng.integers(1, 7)))
        code = "\n".join(
            STATEMENT_TEMPLATES[p].format(n=n, k=int(rng.integers(0, 3)))
            for n, p in enumerate(picks)
        )
        kernel = kernel_utils.compile_kernel(
            KernelSource(f"random_{trial}", code), bindings, LoopKind.PAIR
        )
        seen = set()
        ctx = KernelContext(
            {
                "a": RecordingParticle("a", seen, rng),
                "b": RecordingParticle("b", seen, rng),
                "g": RecordingSide("g", AccessScope.GLOBAL, seen, rng),
            }
        )
        for _ in range(8):
            kernel(ctx)
        assert seen <= kernel.access_plan, code
