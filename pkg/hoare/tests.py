from contextlib import nullcontext
from pathlib import Path

import numpy as np
from django.conf import settings as django_settings
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from rest_framework.test import APIClient

from lang import ast
from lang.parser import parse, parse_statement
from lang.tables import Tables
from linalg import kernel
from linalg.exchange import load_library
from linalg.operators import DensityMatrix, QuantumPredicate, random_density, random_predicate
from semantics.denotational import evaluate
from semantics.options import EvalOptions
from semantics.tests import PLUS, random_case

from .assertions import ProbAssertion, eval_assertion
from .exceptions import AssertionFormatError, FixpointNotConverged, OutlineShapeError, UnknownVariable
from .outlines import OutlineStep, ProofOutline, Rule, check_outline, load_outline
from .transformers import weakest, wlp, wp
from .triples import Correctness, HoareTriple, Outcome, check_triple

SAMPLES = Path(django_settings.BASE_DIR) / "samples"

DIVERGENT = "var q: qbit; while std(q) = 1 do skip od"
COIN = "var q: qbit; while std(q) = 1 do q *= H od"

I2 = QuantumPredicate.identity(2)
ZERO2 = QuantumPredicate.zero(2)
P0 = QuantumPredicate(kernel.outer(0, 0))
P1 = QuantumPredicate(kernel.outer(1, 1))
PLUS_PRED = QuantumPredicate(np.full((2, 2), 0.5))
MINUS_PRED = QuantumPredicate(np.array([[0.5, -0.5], [-0.5, 0.5]]))


def expectation(p, rho):
    return kernel.expectation(p.mat, rho.mat)


class WpTests(SimpleTestCase):
    def test_skip(self):
        p = random_predicate(2, 3)
        np.testing.assert_allclose(wp(*parse("var q: qbit; skip"), p).mat, p.mat)

    def test_initialization(self):
        p = random_predicate(2, 4)
        result = wp(*parse("var q: qbit; q := 0"), p)
        np.testing.assert_allclose(result.mat, p.mat[0, 0] * np.eye(2), atol=1e-12)

    def test_hadamard(self):
        np.testing.assert_allclose(wp(*parse("var q: qbit; q *= H"), P0).mat, PLUS_PRED.mat, atol=1e-12)

    def test_measure_then_correct(self):
        ctx, command = parse("var q: qbit; measure std(q) { case 0: skip case 1: q *= X }")
        np.testing.assert_allclose(wp(ctx, command, P0).mat, np.eye(2), atol=1e-12)

    def test_divergent_loop(self):
        np.testing.assert_allclose(wp(*parse(DIVERGENT), I2).mat, P0.mat, atol=1e-12)

    def test_almost_surely_terminating_loop(self):
        np.testing.assert_allclose(wp(*parse(COIN), I2).mat, np.eye(2), atol=1e-8)

    def test_fixpoint_cap(self):
        opts = EvalOptions.from_settings(fix_max_iters=2)
        with self.assertLogs('hoare', level='WARNING'), self.assertRaises(FixpointNotConverged):
            wp(*parse(COIN), I2, opts)

    def test_allocation_needs_output_dimension(self):
        from linalg.exceptions import DimensionMismatch
        ctx, command = parse("var r: qbit; new qbit q")
        with self.assertRaises(DimensionMismatch):
            wp(ctx, command, I2)
        result = wp(ctx, command, QuantumPredicate(kernel.kron(kernel.outer(0, 0), np.eye(2))))
        np.testing.assert_allclose(result.mat, np.eye(2), atol=1e-12)

    def test_reset_of_one_qubit_in_two(self):
        ctx, command = parse("var a: qbit, b: qbit; b := 0")
        p = random_predicate(4, 12)
        resets = [kernel.embed_factor(kernel.outer(0, n), 1, ctx) for n in range(2)]
        expected = sum(kernel.dagger(e) @ p.mat @ e for e in resets)
        np.testing.assert_allclose(wp(ctx, command, p).mat, expected, atol=1e-12)

    def test_identity_is_preserved_without_loops(self):
        rng = np.random.default_rng(41)
        for index in range(100):
            ctx, command = random_case(rng)
            result = wp(ctx, command, QuantumPredicate.identity(ctx.total_dim))
            with self.subTest(index=index):
                self.assertLessEqual(kernel.max_norm(result.mat - np.eye(ctx.total_dim)), 1e-9)
        self.assertGreater(kernel.max_norm(wp(*parse(DIVERGENT), I2).mat - np.eye(2)), 0.5)

    def test_duality_with_evaluation(self):
        rng = np.random.default_rng(2024)
        for index in range(200):
            ctx, command = random_case(rng)
            post = random_predicate(ctx.total_dim, rng)
            pre = wp(ctx, command, post)
            for _ in range(20):
                rho = random_density(ctx.total_dim, rng)
                final = evaluate(ctx, command, rho).state
                with self.subTest(index=index):
                    self.assertAlmostEqual(expectation(pre, rho), expectation(post, final), delta=1e-9)

    def test_duality_through_loops(self):
        for text in (DIVERGENT, COIN, "var q: qbit; while std(q) = 1 do q := 0 od"):
            ctx, command = parse(text)
            post = random_predicate(2, 7)
            pre = wp(ctx, command, post)
            for seed in range(5):
                rho = random_density(2, seed)
                with self.assertLogs('semantics', level='WARNING') if text == DIVERGENT else nullcontext():
                    final = evaluate(ctx, command, rho).state
                with self.subTest(program=text, seed=seed):
                    self.assertAlmostEqual(expectation(pre, rho), expectation(post, final), delta=1e-7)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1), st.floats(min_value=0.0, max_value=1.0))
    def test_monotone(self, seed, s):
        rng = np.random.default_rng(seed)
        ctx, command = random_case(rng)
        low = random_predicate(ctx.total_dim, rng)
        high = QuantumPredicate(low.mat + s * (np.eye(ctx.total_dim) - low.mat))
        self.assertTrue(kernel.loewner_leq(wp(ctx, command, low).mat, wp(ctx, command, high).mat, 1e-9))

    def test_clamp_is_reported(self):
        result = weakest(*parse("var q: qbit; q *= H"), P0)
        self.assertLessEqual(result.clamp, 1e-12)
        self.assertEqual(result.iterations, 0)


class WlpTests(SimpleTestCase):
    def test_divergent_loop(self):
        ctx, command = parse(DIVERGENT)
        np.testing.assert_allclose(wlp(ctx, command, I2).mat, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(wlp(ctx, command, ZERO2).mat, P1.mat, atol=1e-12)

    def test_agrees_with_wp_on_terminating_programs(self):
        rng = np.random.default_rng(8)
        for index in range(50):
            ctx, command = random_case(rng)
            post = random_predicate(ctx.total_dim, rng)
            with self.subTest(index=index):
                gap = wp(ctx, command, post).mat - wlp(ctx, command, post).mat
                self.assertLessEqual(kernel.max_norm(gap), 1e-9)

    def assertLiberalDuality(self, ctx, command, post, rho, delta):
        pre = wlp(ctx, command, post)
        final = evaluate(ctx, command, rho).state
        expected = expectation(post, final) + rho.trace - final.trace
        self.assertAlmostEqual(expectation(pre, rho), expected, delta=delta)

    def test_liberal_duality_with_evaluation(self):
        rng = np.random.default_rng(2025)
        for index in range(200):
            ctx, command = random_case(rng)
            post = random_predicate(ctx.total_dim, rng)
            for _ in range(20):
                rho = random_density(ctx.total_dim, rng).scaled(float(rng.uniform(0.2, 1.0)))
                with self.subTest(index=index):
                    self.assertLiberalDuality(ctx, command, post, rho, 1e-9)

    def test_duality_counts_nontermination(self):
        rng = np.random.default_rng(19)
        ctx, command = parse(DIVERGENT)
        for _ in range(20):
            post = random_predicate(2, rng)
            rho = random_density(2, rng)
            with self.assertLogs('semantics', level='WARNING'):
                self.assertLiberalDuality(ctx, command, post, rho, 1e-9)
        ctx, command = parse(COIN)
        for _ in range(20):
            self.assertLiberalDuality(ctx, command, random_predicate(2, rng), random_density(2, rng), 1e-7)

    def test_wlp_dominates_wp(self):
        ctx, command = parse(DIVERGENT)
        post = random_predicate(2, 23)
        self.assertTrue(kernel.loewner_leq(wp(ctx, command, post).mat, wlp(ctx, command, post).mat, 1e-9))


class TripleTests(SimpleTestCase):
    def test_loop_is_partially_but_not_totally_correct(self):
        ctx, command = parse(DIVERGENT)
        partial = check_triple(HoareTriple(ctx, command, I2, I2, 'par'))
        self.assertEqual(partial.outcome, Outcome.VALID)
        self.assertIsNone(partial.witness)

        total = check_triple(HoareTriple(ctx, command, I2, I2, 'tot'))
        self.assertEqual(total.outcome, Outcome.INVALID)
        self.assertEqual(total.mode, Correctness.TOTAL)
        self.assertAlmostEqual(total.min_eigenvalue, -1.0, delta=1e-12)
        self.assertAlmostEqual(total.residual, 1.0, delta=1e-12)
        np.testing.assert_allclose(total.witness.mat, P1.mat, atol=1e-12)

    def test_witness_violates_the_triple(self):
        ctx, command = parse("var q: qbit; q *= X")
        verdict = check_triple(HoareTriple(ctx, command, I2, ZERO2))
        self.assertFalse(verdict.valid)
        rho = verdict.witness
        final = evaluate(ctx, command, rho).state
        self.assertGreater(expectation(I2, rho), expectation(ZERO2, final))

    def test_zero_precondition_always_holds(self):
        rng = np.random.default_rng(3)
        for index in range(20):
            ctx, command = random_case(rng)
            triple = HoareTriple(ctx, command, QuantumPredicate.zero(ctx.total_dim),
                                 random_predicate(ctx.total_dim, rng))
            with self.subTest(index=index):
                self.assertTrue(check_triple(triple).valid)

    def test_wp_is_the_weakest_precondition(self):
        ctx, command = parse("var q: qbit; q *= H")
        self.assertTrue(check_triple(HoareTriple(ctx, command, PLUS_PRED, P0)).valid)
        stronger = QuantumPredicate(0.99 * PLUS_PRED.mat + 0.01 * np.eye(2))
        self.assertFalse(check_triple(HoareTriple(ctx, command, stronger, P0)).valid)

    def test_non_convergence_is_inconclusive(self):
        ctx, command = parse(COIN)
        opts = EvalOptions.from_settings(fix_max_iters=2)
        with self.assertLogs('hoare', level='WARNING'):
            verdict = check_triple(HoareTriple(ctx, command, I2, I2), opts)
        self.assertEqual(verdict.outcome, Outcome.INCONCLUSIVE)
        self.assertGreater(verdict.residual, 0.0)

    def test_precondition_dimension(self):
        from linalg.exceptions import DimensionMismatch
        ctx, command = parse("var q: qbit; skip")
        with self.assertRaises(DimensionMismatch):
            HoareTriple(ctx, command, QuantumPredicate.identity(4), I2)

    def test_mode_aliases(self):
        self.assertEqual(Correctness.parse('tot'), Correctness.TOTAL)
        self.assertEqual(Correctness.parse('partial'), Correctness.PARTIAL)
        with self.assertRaises(ValueError):
            Correctness.parse('both')


class OutlineTests(SimpleTestCase):
    ctx = parse("var q: qbit; skip")[0]

    def statement(self, text):
        return parse_statement(text, self.ctx)

    def outline(self, program, pre, post, *steps):
        return ProofOutline(self.ctx, self.statement(program), pre, post, tuple(steps))

    def test_deutsch_jozsa_sample(self):
        verdict = check_outline(load_outline(SAMPLES / "dj_outline.json"))
        self.assertTrue(verdict.valid, verdict.message)
        self.assertEqual(len(verdict.steps), 13)
        self.assertTrue(all(step.valid for step in verdict.steps))

    def test_broken_sample(self):
        verdict = check_outline(load_outline(SAMPLES / "dj_outline_broken.json"))
        self.assertFalse(verdict.valid)
        failed = [step.id for step in verdict.steps if not step.valid]
        self.assertIn('s1', failed)

    def test_sample_conclusion_is_a_valid_triple(self):
        outline = load_outline(SAMPLES / "dj_outline.json")
        conclusion = check_outline(outline).conclusion
        triple = HoareTriple(outline.ctx, conclusion.command, QuantumPredicate(conclusion.pre),
                             QuantumPredicate(conclusion.post), 'par', outline.tables)
        self.assertTrue(check_triple(triple).valid)

    def test_unit_with_wrong_precondition(self):
        step = OutlineStep('s1', Rule.UNIT, self.statement("q *= H"), I2, P0)
        verdict = check_outline(self.outline("q *= H", I2, P0, step))
        self.assertFalse(verdict.valid)
        self.assertIn("precondition differs", verdict.steps[0].message)

    def test_unit_with_computed_precondition(self):
        step = OutlineStep('s1', Rule.UNIT, self.statement("q *= H"), post=P0)
        verdict = check_outline(self.outline("q *= H", PLUS_PRED, P0, step))
        self.assertTrue(verdict.valid, verdict.message)

    def test_empty_outline(self):
        self.assertTrue(check_outline(self.outline("skip", P0, P0)).valid)
        self.assertFalse(check_outline(self.outline("skip", I2, P0)).valid)

    def test_measurement_rule(self):
        program = "measure std(q) { case 0: skip case 1: q *= X }"
        verdict = check_outline(self.outline(
            program, I2, P0,
            OutlineStep('zero', Rule.SKIP, post=P0),
            OutlineStep('one', Rule.UNIT, self.statement("q *= X"), P1, P0),
            OutlineStep('m', Rule.MEASURE, self.statement(program), I2, P0, premises=('zero', 'one')),
        ))
        self.assertTrue(verdict.valid, verdict.message)

    def test_measurement_needs_every_outcome(self):
        program = "measure std(q) { case 0: skip case 1: q *= X }"
        with self.assertRaises(OutlineShapeError):
            check_outline(self.outline(
                program, I2, P0,
                OutlineStep('zero', Rule.SKIP, post=P0),
                OutlineStep('m', Rule.MEASURE, self.statement(program), premises=('zero',)),
            ))

    def test_while_rule_and_soundness(self):
        program = "while std(q) = 1 do q *= X od"
        outline = self.outline(
            program, I2, P0,
            OutlineStep('body', Rule.UNIT, self.statement("q *= X"), I2, I2),
            OutlineStep('loop', Rule.WHILE, self.statement(program), post=P0, premises=('body',), invariant=I2),
        )
        verdict = check_outline(outline)
        self.assertTrue(verdict.valid, verdict.message)
        triple = HoareTriple(self.ctx, outline.program, I2, P0, 'par')
        self.assertTrue(check_triple(triple).valid)

    def test_consequence(self):
        half = QuantumPredicate(0.5 * np.eye(2))
        unit = OutlineStep('s1', Rule.UNIT, self.statement("q *= H"), PLUS_PRED, P0)
        weaker = OutlineStep('c', Rule.CONS, pre=QuantumPredicate(0.5 * PLUS_PRED.mat), post=P0, premises=('s1',))
        self.assertTrue(check_outline(self.outline("q *= H", weaker.pre, P0, unit, weaker)).valid)
        wrong = OutlineStep('c', Rule.CONS, pre=half, post=P0, premises=('s1',))
        self.assertFalse(check_outline(self.outline("q *= H", half, P0, unit, wrong)).valid)

    def test_sequence_midpoints_must_chain(self):
        verdict = check_outline(self.outline(
            "q *= H; q *= X", MINUS_PRED, P0,
            OutlineStep('a', Rule.UNIT, self.statement("q *= H"), post=P1),
            OutlineStep('b', Rule.UNIT, self.statement("q *= X"), post=P0),
            OutlineStep('ab', Rule.SEQ, premises=('a', 'b')),
        ))
        self.assertTrue(verdict.valid, verdict.message)
        broken = check_outline(self.outline(
            "q *= H; q *= X", MINUS_PRED, P0,
            OutlineStep('a', Rule.UNIT, self.statement("q *= H"), post=P0),
            OutlineStep('b', Rule.UNIT, self.statement("q *= X"), post=P0),
            OutlineStep('ab', Rule.SEQ, premises=('a', 'b')),
        ))
        self.assertFalse(broken.valid)
        self.assertIn("midpoints", broken.steps[-1].message)

    def test_shape_errors(self):
        with self.assertRaises(OutlineShapeError):
            check_outline(self.outline("skip", P0, P0, OutlineStep('s', Rule.SEQ, premises=('x', 'y'))))
        with self.assertRaises(OutlineShapeError):
            check_outline(self.outline("skip", P0, P0, OutlineStep('s', Rule.SKIP, post=P0),
                                       OutlineStep('s', Rule.SKIP, post=P0)))
        with self.assertRaises(OutlineShapeError):
            check_outline(self.outline("q := 0", P0, P0, OutlineStep('s', Rule.UNIT, self.statement("q := 0"),
                                                                    post=P0)))

    def test_unknown_rule(self):
        with self.assertRaises(ValueError):
            OutlineStep('s', 'Frame')


class AssertionTests(SimpleTestCase):
    def test_probability_on_plus(self):
        result = eval_assertion("Pr(q = 0) = 0.5", parse("var q: qbit; skip")[0], PLUS)
        self.assertTrue(result.holds)
        self.assertAlmostEqual(result.probability, 0.5, delta=1e-12)

    def test_outcomes_sum_to_trace(self):
        ctx = parse("var a: qbit, b: qbit; skip")[0]
        rho = random_density(4, 9).scaled(0.7)
        terms = " + ".join(f"Pr(a = {i} & b = {j})" for i in range(2) for j in range(2))
        result = eval_assertion(f"{terms} = 0.7", ctx, rho)
        self.assertTrue(result.holds)
        self.assertAlmostEqual(result.probability, rho.trace, delta=1e-12)

    def test_conjunction_of_comparisons(self):
        ctx = parse("var q: qbit; skip")[0]
        result = eval_assertion("Pr(q = 0) >= 0.9 and Pr(q = 1) <= 0.1", ctx, DensityMatrix.basis(0, 2))
        self.assertTrue(result.holds)
        self.assertEqual(len(result.probabilities), 2)
        self.assertFalse(eval_assertion("Pr(q = 1) >= 0.5", ctx, DensityMatrix.basis(0, 2)).holds)

    def test_contradictory_event(self):
        ctx = parse("var q: qbit; skip")[0]
        self.assertAlmostEqual(eval_assertion("Pr(q = 0 & q = 1) = 0", ctx, PLUS).probability, 0.0)

    def test_unknown_variable(self):
        with self.assertRaises(UnknownVariable):
            eval_assertion("Pr(r = 0) >= 0", parse("var q: qbit; skip")[0], PLUS)

    def test_format_errors(self):
        for text in ("Pr(q = 0)", "Pr(q = 0) > 1", "Pr(q = 0.5) = 1", "Pr q = 0 = 1", "Pr(q = 0) = 1 extra"):
            with self.subTest(text=text), self.assertRaises(AssertionFormatError):
                ProbAssertion.parse(text)

    def test_printing(self):
        text = "Pr(q1 = 0 & q2 = 0) + Pr(q1 = 1) >= 0.5 and Pr(q2 = 1) <= 0.25"
        self.assertEqual(str(ProbAssertion.parse(text)), text)

    def test_scientific_bound(self):
        ctx = parse("var q: qbit; skip")[0]
        self.assertTrue(eval_assertion("Pr(q = 1) <= 1e-3", ctx, DensityMatrix.basis(0, 2)).holds)
        self.assertFalse(eval_assertion("Pr(q = 0) <= .5", ctx, DensityMatrix.basis(0, 2)).holds)

    def test_outcome_out_of_range(self):
        with self.assertRaises(AssertionFormatError):
            eval_assertion("Pr(q = 2) = 0", parse("var q: qbit; skip")[0], PLUS)


def matrix(m):
    m = np.asarray(m, dtype=float)
    return {'dim': list(m.shape), 're': m.tolist()}


class HoareAPITests(SimpleTestCase):
    def setUp(self):
        self.client = APIClient()

    def test_wp(self):
        response = self.client.post("/hoare/wp/", {
            'program': "var q: qbit; q *= H",
            'post': matrix(np.diag([1, 0])),
        }, format='json')
        self.assertEqual(response.status_code, 200)
        np.testing.assert_allclose(response.data['predicate']['re'], np.full((2, 2), 0.5), atol=1e-12)

    def test_wlp_of_divergence(self):
        response = self.client.post("/hoare/wlp/", {
            'program': DIVERGENT,
            'post': matrix(np.zeros((2, 2))),
        }, format='json')
        self.assertEqual(response.status_code, 200)
        np.testing.assert_allclose(response.data['predicate']['re'], np.diag([0, 1]), atol=1e-12)

    def test_check(self):
        response = self.client.post("/hoare/check/", {
            'program': "var q: qbit; q *= X",
            'pre': matrix(np.eye(2)),
            'post': matrix(np.zeros((2, 2))),
        }, format='json')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.data['verdict'], 'invalid')
        self.assertEqual(response.data['mode'], 'total')
        self.assertIsNotNone(response.data['witness'])

    def test_check_rejects_bad_predicate(self):
        response = self.client.post("/hoare/check/", {
            'program': "var q: qbit; skip",
            'pre': matrix(2 * np.eye(2)),
            'post': matrix(np.eye(2)),
        }, format='json')
        self.assertEqual(response.status_code, 400)

    def test_prove(self):
        response = self.client.post("/hoare/prove/", {
            'program': "var q: qbit; q *= H",
            'matrices': {'matrices': {'P0': matrix(np.diag([1, 0])), 'Plus': matrix(np.full((2, 2), 0.5))}},
            'pre': 'Plus',
            'post': 'P0',
            'steps': [{'id': 's1', 'rule': 'Unit', 'command': "q *= H", 'post': 'P0'}],
        }, format='json')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.data['verdict'], 'valid')
        self.assertEqual(response.data['steps'][0]['rule'], 'Unit')

    def test_prove_with_unknown_matrix(self):
        response = self.client.post("/hoare/prove/", {
            'program': "var q: qbit; q *= H",
            'pre': 'Plus',
            'post': 'P0',
        }, format='json')
        self.assertEqual(response.status_code, 400)

    def test_assert(self):
        response = self.client.post("/hoare/assert/", {
            'program': "var q: qbit; q *= H",
            'rho': matrix(np.diag([1, 0])),
            'expr': "Pr(q = 0) = 0.5",
        }, format='json')
        self.assertEqual(response.status_code, 200)
        self.assertTrue(response.data['holds'])
        self.assertEqual(response.data['assertion'], "Pr(q = 0) = 0.5")


class LibraryTests(SimpleTestCase):
    def test_outline_matrices_are_predicates(self):
        library = load_library(SAMPLES / "dj_outline_matrices.json")
        for name, m in library['matrices'].items():
            with self.subTest(name=name):
                QuantumPredicate(m)

    def test_sample_gate_tables(self):
        tables = Tables.builtins().extended(load_library(SAMPLES / "uf_const1.json"))
        self.assertTrue(kernel.is_unitary(tables.gates.resolve('Uf', 8)))
        ctx, command = parse((SAMPLES / "dj.qpl").read_text())
        target = load_library(SAMPLES / "dj_outline_matrices.json")['matrices']['T']
        result = wp(ctx, command, QuantumPredicate(target), tables=tables)
        np.testing.assert_allclose(result.mat, np.eye(8), atol=1e-9)
        self.assertIsInstance(command, ast.Seq)
