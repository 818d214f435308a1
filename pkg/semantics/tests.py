import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from rest_framework.test import APIClient

from lang import ast
from lang.ast import Kind, Var, VarContext
from lang.parser import parse
from lang.tables import Tables
from lang.typing import typecheck
from linalg import kernel
from linalg.operators import DensityMatrix, apply_kraus, random_density

from .denotational import denote, evaluate, termination_probability
from .exceptions import InvalidOptions, TruncationNotConverged, ZeroTraceState
from .operational import Config, run_operational, step
from .options import EvalOptions, Mode
from .reports import run_program

QUBITS = VarContext(tuple(Var(name, Kind.QBIT) for name in ('q1', 'q2', 'q3')))
PLUS = DensityMatrix(np.full((2, 2), 0.5))


def random_program(rng, names, depth):
    """Random loop-free ying-core command over the qubits ``names``."""
    choices = ['skip', 'init', 'gate', 'gate', 'pair']
    if depth > 0:
        choices += ['seq', 'seq', 'seq', 'measure']
    choice = rng.choice(choices)
    if choice == 'skip':
        return ast.Skip()
    if choice == 'init':
        return ast.InitZero(str(rng.choice(names)))
    if choice == 'pair' and len(names) > 1:
        pair = tuple(str(n) for n in rng.choice(names, size=2, replace=False))
        return ast.ApplyU(pair, str(rng.choice(['CNOT', 'H2'])))
    if choice in ('gate', 'pair'):
        return ast.ApplyU((str(rng.choice(names)),), str(rng.choice(['H', 'X', 'Y', 'Z', 'S'])))
    if choice == 'seq':
        return ast.Seq(random_program(rng, names, depth - 1), random_program(rng, names, depth - 1))
    arms = (random_program(rng, names, depth - 1), random_program(rng, names, depth - 1))
    return ast.MeasureCase('std', (str(rng.choice(names)),), arms)


def random_case(rng):
    size = int(rng.integers(1, 4))
    ctx = VarContext(QUBITS.vars[:size])
    command = random_program(rng, list(ctx.names), int(rng.integers(1, 6)))
    return ctx, command


def program(text):
    ctx, command = parse(text)
    return ctx, command


class DenotationTests(SimpleTestCase):
    def test_skip(self):
        rho = random_density(2, 1)
        k = denote(*program("var q: qbit; skip"))
        np.testing.assert_allclose(apply_kraus(k, rho).mat, rho.mat)

    def test_initialization(self):
        k = denote(*program("var q: qbit; q := 0"))
        np.testing.assert_allclose(k.apply(kernel.outer(1, 1)), kernel.outer(0, 0))
        self.assertTrue(k.is_admissible())

    def test_qunit_initialization(self):
        k = denote(*program("var n: qunit[3]; n := 0"))
        self.assertEqual(len(k), 3)
        np.testing.assert_allclose(k.apply(kernel.outer(2, 2, 3)), kernel.outer(0, 0, 3))

    def test_allocation(self):
        rho = random_density(2, 8)
        k = denote(*program("var r: qbit; new qbit q"))
        self.assertEqual((k.rows, k.cols), (4, 2))
        out = k.apply(rho.mat)
        np.testing.assert_allclose(out[:2, :2], rho.mat)
        np.testing.assert_allclose(out, kernel.kron(kernel.outer(0, 0), rho.mat))

    def test_discard_of_an_inner_variable(self):
        ctx, command = program("var a: qbit, b: qbit; discard b")
        rho_a, rho_b = random_density(2, 1), random_density(2, 2)
        out = denote(ctx, command).apply(kernel.kron(rho_a.mat, rho_b.mat))
        np.testing.assert_allclose(out, rho_a.mat, atol=1e-12)

    def test_loop_denotation_matches_evaluation(self):
        ctx, command = program("var q: qbit; q *= H; while std(q) = 1 do q *= H od")
        rho = random_density(2, 4)
        via_kraus = apply_kraus(denote(ctx, command), rho).mat
        direct = evaluate(ctx, command, rho).state.mat
        self.assertLessEqual(kernel.max_norm(via_kraus - direct), 1e-9)

    def test_exact_mode_refuses_truncation(self):
        ctx, command = program("var q: qbit; while std(q) = 1 do q *= H od")
        opts = EvalOptions.from_settings(loop_max_iters=3, mode=Mode.EXACT_KRAUS)
        with self.assertRaises(TruncationNotConverged):
            denote(ctx, command, opts)

    def test_truncated_mode_reports_error(self):
        ctx, command = program("var q: qbit; while std(q) = 1 do q *= H od")
        opts = EvalOptions.from_settings(loop_max_iters=3)
        with self.assertLogs('semantics', level='WARNING'):
            k = denote(ctx, command, opts)
        self.assertGreater(k.truncation_error, 0.0)
        with self.assertLogs('semantics', level='WARNING'):
            result = evaluate(ctx, command, DensityMatrix.basis(1, 2), opts)
        self.assertAlmostEqual(result.truncation_error + result.state.trace, 1.0, delta=1e-12)


class EvaluationTests(SimpleTestCase):
    def test_assign_bit(self):
        p = 0.3
        result = evaluate(*program("var b: bit; b := 1"), DensityMatrix(np.diag([p, 1 - p])))
        np.testing.assert_allclose(result.state.mat, np.diag([0, 1]), atol=1e-15)

    def test_hadamard(self):
        result = evaluate(*program("var q: qbit; q *= H"), DensityMatrix.basis(0, 2))
        np.testing.assert_allclose(result.state.mat, np.full((2, 2), 0.5), atol=1e-15)

    def test_measure_and_forget(self):
        result = evaluate(*program("var q: qbit; measure std(q) { case 0: skip case 1: skip }"), PLUS)
        np.testing.assert_allclose(result.state.mat, np.diag([0.5, 0.5]), atol=1e-15)

    def test_dimension_mismatch(self):
        from linalg.exceptions import DimensionMismatch
        with self.assertRaises(DimensionMismatch):
            evaluate(*program("var q: qbit; skip"), DensityMatrix.basis(0, 4))

    def test_allocation_then_discard_is_identity(self):
        ctx, command = program("var r: qbit; new qbit q; discard q")
        for seed in range(10):
            rho = random_density(2, seed)
            result = evaluate(ctx, command, rho)
            self.assertEqual(result.ctx, ctx)
            self.assertLessEqual(kernel.max_norm(result.state.mat - rho.mat), 1e-12)

    def test_assign_bit_is_idempotent(self):
        twice = program("var b: bit, q: qbit; b := 0; b := 0")
        once = program("var b: bit, q: qbit; b := 0")
        for seed in range(10):
            rho = random_density(4, seed)
            difference = evaluate(*twice, rho).state.mat - evaluate(*once, rho).state.mat
            self.assertLessEqual(kernel.max_norm(difference), 1e-12)

    def test_measure_if_readout(self):
        ctx, command = program("new bit b; new qbit q; q *= H; measure q then b := 0 else b := 1 fi; discard q")
        result = evaluate(ctx, command, DensityMatrix(np.ones((1, 1))))
        self.assertEqual(result.ctx.names, ('b',))
        np.testing.assert_allclose(result.state.mat, np.diag([0.5, 0.5]), atol=1e-15)

    def test_trace_nonincreasing_and_positive(self):
        rng = np.random.default_rng(99)
        for index in range(500):
            ctx, command = random_case(rng)
            rho = random_density(ctx.total_dim, rng).scaled(float(rng.uniform(0.2, 1.0)))
            with self.subTest(index=index):
                out = evaluate(ctx, command, rho).state
                self.assertLessEqual(out.trace, rho.trace + 1e-10)
                self.assertGreaterEqual(kernel.eig_hermitian(out.mat)[0], -1e-10)

    def test_linearity(self):
        rng = np.random.default_rng(5)
        for index in range(50):
            ctx, command = random_case(rng)
            a, b = 0.25, 0.6
            rho1 = random_density(ctx.total_dim, rng)
            rho2 = random_density(ctx.total_dim, rng)
            mixed = rho1.scaled(a) + rho2.scaled(b)
            lhs = evaluate(ctx, command, mixed).state.mat
            rhs = a * evaluate(ctx, command, rho1).state.mat + b * evaluate(ctx, command, rho2).state.mat
            with self.subTest(index=index):
                self.assertLessEqual(kernel.max_norm(lhs - rhs), 1e-9)

    def test_kraus_and_direct_evaluation_agree(self):
        rng = np.random.default_rng(17)
        exact = EvalOptions.from_settings(mode=Mode.EXACT_KRAUS)
        for index in range(50):
            ctx, command = random_case(rng)
            rho = random_density(ctx.total_dim, rng)
            direct = evaluate(ctx, command, rho).state.mat
            via_kraus = evaluate(ctx, command, rho, exact).state.mat
            with self.subTest(index=index):
                self.assertLessEqual(kernel.max_norm(direct - via_kraus), 1e-9)


class TerminationTests(SimpleTestCase):
    divergent = "var q: qbit; while std(q) = 1 do skip od"

    def test_skip_terminates(self):
        estimate = termination_probability(*program("var q: qbit; skip"), PLUS)
        self.assertAlmostEqual(estimate.probability, 1.0, delta=1e-12)

    def test_pure_divergence_is_reported(self):
        with self.assertLogs('semantics', level='WARNING'):
            estimate = termination_probability(*program(self.divergent), DensityMatrix.basis(1, 2))
        self.assertAlmostEqual(estimate.probability, 0.0, delta=1e-12)
        self.assertAlmostEqual(estimate.truncation_error, 1.0, delta=1e-12)

    def test_half_divergence(self):
        with self.assertLogs('semantics', level='WARNING'):
            estimate = termination_probability(*program(self.divergent), PLUS)
        self.assertAlmostEqual(estimate.probability, 0.5, delta=1e-12)
        self.assertAlmostEqual(estimate.truncation_error, 0.5, delta=1e-12)

    def test_slow_leak_is_not_mistaken_for_divergence(self):
        theta = 1e-5
        rotation = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        tables = Tables.builtins().extended({'matrices': {'R': rotation}})
        ctx, command = program("var q: qbit; while std(q) = 1 do q *= R od")
        opts = EvalOptions.from_settings(loop_max_iters=200)
        with self.assertLogs('semantics', level='WARNING'):
            estimate = termination_probability(ctx, command, DensityMatrix.basis(1, 2), opts, tables)
        self.assertAlmostEqual(estimate.probability + estimate.truncation_error, 1.0, delta=1e-9)
        self.assertGreater(estimate.truncation_error, 0.99)
        with self.assertLogs('semantics', level='WARNING'):
            k = denote(ctx, command, opts, tables)
        self.assertGreater(k.truncation_error, 0.99)
        with self.assertRaises(TruncationNotConverged):
            denote(ctx, command, EvalOptions.from_settings(loop_max_iters=200, mode=Mode.EXACT_KRAUS), tables)

    def test_almost_sure_termination(self):
        estimate = termination_probability(*program("var q: qbit; while std(q) = 1 do q *= H od"),
                                           DensityMatrix.basis(1, 2))
        self.assertAlmostEqual(estimate.probability, 1.0, delta=1e-8)

    def test_zero_trace(self):
        with self.assertRaises(ZeroTraceState):
            termination_probability(*program("var q: qbit; skip"), DensityMatrix(np.zeros((2, 2))))


class StepTests(SimpleTestCase):
    def setUp(self):
        self.ctx = VarContext((Var('q', Kind.QBIT),))

    def test_unit(self):
        rho = random_density(2, 6)
        (nxt,) = step(Config(ast.ApplyU(('q',), 'H'), rho.mat, self.ctx))
        self.assertTrue(nxt.done)
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        np.testing.assert_allclose(nxt.state, h @ rho.mat @ h, atol=1e-15)

    def test_measurement_is_nondeterministic(self):
        command = ast.MeasureCase('std', ('q',), (ast.Skip(), ast.ApplyU(('q',), 'X')))
        successors = step(Config(command, PLUS.mat, self.ctx))
        self.assertEqual(len(successors), 2)
        for nxt in successors:
            self.assertAlmostEqual(nxt.trace, 0.5, delta=1e-15)

    def test_leading_skip(self):
        rest = ast.ApplyU(('q',), 'X')
        (nxt,) = step(Config(ast.Seq(ast.Skip(), rest), PLUS.mat, self.ctx))
        self.assertEqual(nxt.residual, rest)
        np.testing.assert_array_equal(nxt.state, PLUS.mat)

    def test_loop_has_two_successors(self):
        loop = ast.While('std', ('q',), ast.Skip())
        exit_cfg, stay_cfg = step(Config(loop, PLUS.mat, self.ctx))
        self.assertTrue(exit_cfg.done)
        self.assertEqual(stay_cfg.residual, ast.Seq(ast.Skip(), loop))

    def test_terminal_has_no_successors(self):
        self.assertEqual(step(Config(ast.Skip(), PLUS.mat, self.ctx)), [])


class OperationalTests(SimpleTestCase):
    def test_agrees_with_denotation_on_loop_free_programs(self):
        rng = np.random.default_rng(31)
        for index in range(100):
            ctx, command = random_case(rng)
            rho = random_density(ctx.total_dim, rng)
            run = run_operational(ctx, command, rho)
            with self.subTest(index=index):
                self.assertEqual(run.unexplored_mass, 0.0)
                self.assertTrue(run.deterministic)
                total = run.total(ctx.total_dim)
                self.assertLessEqual(kernel.max_norm(total - evaluate(ctx, command, rho).state.mat), 1e-9)

    def test_loop_reset_terminates_after_two_entries(self):
        ctx, command = program("var q: qbit; while std(q) = 1 do q := 0 od")
        run = run_operational(ctx, command, DensityMatrix.basis(1, 2))
        self.assertEqual(run.path_count, 1)
        self.assertEqual(run.max_depth_reached, 3)
        self.assertTrue(run.deterministic)
        np.testing.assert_allclose(run.total(2), kernel.outer(0, 0), atol=1e-15)

    def test_coin_loop_leaves_vanishing_unexplored_mass(self):
        ctx, command = program("var q: qbit; while std(q) = 1 do q *= H od")
        rho = DensityMatrix.basis(1, 2)
        shallow = run_operational(ctx, command, rho, depth_cap=8)
        deep = run_operational(ctx, command, rho, depth_cap=40)
        self.assertFalse(shallow.deterministic)
        self.assertLess(deep.unexplored_mass, shallow.unexplored_mass)
        self.assertLess(deep.unexplored_mass, 1e-4)
        for run in (shallow, deep):
            self.assertAlmostEqual(float(np.trace(run.total(2)).real) + run.unexplored_mass, 1.0, delta=1e-9)

    def test_qpl_programs_step_too(self):
        ctx, command = program("new bit b; new qbit q; q *= H; measure q then b := 0 else b := 1 fi")
        run = run_operational(ctx, command, DensityMatrix(np.ones((1, 1))))
        self.assertEqual(run.path_count, 2)
        expected = evaluate(ctx, command, DensityMatrix(np.ones((1, 1)))).state.mat
        np.testing.assert_allclose(run.total(4), expected, atol=1e-12)

    def test_terminal_start(self):
        rho = random_density(2, 3)
        run = run_operational(*program("var q: qbit; skip; skip"), rho)
        self.assertEqual(run.path_count, 1)
        np.testing.assert_array_equal(run.terminals[0].mat, rho.mat)


class OptionsTests(SimpleTestCase):
    def test_defaults_follow_settings(self):
        opts = EvalOptions.from_settings()
        self.assertEqual(opts.loop_max_iters, 1000)
        self.assertEqual(opts.mode, Mode.TRUNCATED)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(max_value=0.0, allow_nan=False))
    def test_non_positive_overrides_rejected(self, value):
        with self.assertRaises(InvalidOptions):
            EvalOptions.from_settings(loop_mass_eps=value)

    def test_unknown_override(self):
        with self.assertRaises(InvalidOptions):
            EvalOptions.from_settings(depth=3)


class RunReportTests(SimpleTestCase):
    def test_flip(self):
        ctx, command = program("var q: qbit; q *= X")
        report = run_program(typecheck(ctx, command), DensityMatrix.basis(0, 2))
        np.testing.assert_allclose(report.final_state.mat, kernel.outer(1, 1))
        self.assertEqual((report.trace, report.termination_probability), (1.0, 1.0))
        self.assertEqual(report.path_count, 1)
        self.assertTrue(report.deterministic)

    def test_zero_trace_state(self):
        ctx, command = program("var q: qbit; q *= X")
        with self.assertRaises(ZeroTraceState):
            run_program(typecheck(ctx, command), DensityMatrix(np.zeros((2, 2))))

    def test_endpoint(self):
        with self.assertLogs('semantics', level='WARNING'):
            response = APIClient().post("/semantics/run/", {
                'program': "var q: qbit; q *= H; while std(q) = 1 do skip od",
                'rho': {'dim': [2, 2], 're': [[1, 0], [0, 0]]},
            }, format='json')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.data['schema'], 1)
        self.assertAlmostEqual(response.data['termination_probability'], 0.5, delta=1e-12)
        self.assertFalse(response.data['deterministic'])
        self.assertAlmostEqual(response.data['unexplored_mass'], 0.5, delta=1e-12)
        self.assertAlmostEqual(response.data['truncation_error'], 0.5, delta=1e-12)

    def test_endpoint_rejects_bad_state(self):
        response = APIClient().post("/semantics/run/", {
            'program': "var q: qbit; skip",
            'rho': {'dim': [2, 2], 're': [[2, 0], [0, 0]]},
        }, format='json')
        self.assertEqual(response.status_code, 400)
