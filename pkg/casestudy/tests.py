import numpy as np
from django.test import SimpleTestCase, override_settings
from rest_framework.test import APIClient

from hoare.assertions import eval_assertion
from hoare.outlines import check_outline
from hoare.transformers import wp
from lang import ast
from lang.ast import Dialect, infer_dialect
from lang.exceptions import TypeCheckError
from lang.tables import HADAMARD
from lang.typing import typecheck
from linalg import kernel
from linalg.operators import DensityMatrix, QuantumPredicate
from semantics.denotational import evaluate

from .deutsch_jozsa import (BooleanOracle, OracleClass, all_oracles, build_hadamard, build_uf, dj_intermediate_predicate,
                            dj_outline, dj_program, dj_qpl_verify, dj_tables, dj_target, dj_verify, expected_p00)
from .exceptions import InvalidOracle


def final_state(f):
    ctx, program = dj_program(f)
    return evaluate(ctx, program, DensityMatrix.basis(0, ctx.total_dim), tables=dj_tables(f))


class OracleTests(SimpleTestCase):
    def test_parse(self):
        self.assertEqual(BooleanOracle.parse("constant1", 2).table, (1, 1, 1, 1))
        self.assertEqual(BooleanOracle.parse("balanced:0110").k, 2)
        self.assertEqual(str(BooleanOracle.parse("balanced:0011", 2)), "balanced:0011")
        self.assertEqual(str(BooleanOracle.parse("constant0", 3)), "constant0")

    def test_parse_errors(self):
        for text, k in (("constant1", None), ("balanced:0111", None), ("balanced:011", None),
                        ("balanced:0011", 3), ("balanced:01a0", None), ("majority", 2)):
            with self.subTest(text=text, k=k), self.assertRaises(InvalidOracle):
                BooleanOracle.parse(text, k)

    def test_classes(self):
        self.assertIs(BooleanOracle(2, (0, 0, 0, 0)).kind, OracleClass.CONSTANT)
        self.assertIs(BooleanOracle(2, (0, 1, 1, 0)).kind, OracleClass.BALANCED)
        self.assertIs(BooleanOracle(2, (0, 1, 1, 1)).kind, OracleClass.OTHER)
        with self.assertRaises(InvalidOracle):
            BooleanOracle(2, (0, 1, 2, 0))

    def test_enumeration(self):
        oracles = list(all_oracles(2))
        self.assertEqual(len(oracles), 8)
        self.assertEqual(len(set(oracles)), 8)
        self.assertEqual(sum(f.kind is OracleClass.BALANCED for f in oracles), 6)

    def test_unbalanced_oracle_is_rejected(self):
        with self.assertRaises(InvalidOracle):
            dj_program(BooleanOracle(2, (0, 1, 1, 1)))

    @override_settings(QHL_DJ_MAX_K=3)
    def test_size_cap(self):
        with self.assertRaises(InvalidOracle):
            dj_verify(BooleanOracle.parse("constant0", 4))


class OracleMatrixTests(SimpleTestCase):
    def test_every_two_bit_oracle_is_a_permutation(self):
        for f in all_oracles(2):
            uf = build_uf(f)
            with self.subTest(oracle=str(f)):
                self.assertTrue(kernel.is_unitary(uf))
                for x in range(4):
                    for b in (0, 1):
                        column = uf @ kernel.ket(2 * x + b, 8)
                        np.testing.assert_array_equal(column, kernel.ket(2 * x + (b ^ f(x)), 8))

    def test_constant_one_flips_the_ancilla(self):
        uf = build_uf(BooleanOracle.parse("constant1", 2))
        np.testing.assert_array_equal(uf, kernel.kron(np.eye(4), np.array([[0, 1], [1, 0]])))

    def test_expanded_hadamard(self):
        h3 = build_hadamard(3)
        self.assertTrue(kernel.is_unitary(h3))
        np.testing.assert_allclose(h3, kernel.kron(HADAMARD, kernel.kron(HADAMARD, HADAMARD)), atol=1e-15)

    def test_expanded_hadamard_matches_single_gates(self):
        ctx, whole = dj_program(BooleanOracle.parse("constant0", 2))
        singles = ast.seq(*(ast.ApplyU((name,), 'H') for name in ctx.names))
        rho = DensityMatrix.basis(5, 8)
        once = evaluate(ctx, ast.ApplyU(ctx.names, 'H3'), rho).state.mat
        stepwise = evaluate(ctx, singles, rho).state.mat
        np.testing.assert_allclose(once, stepwise, atol=1e-12)
        self.assertIsInstance(whole, ast.Seq)


class ProgramTests(SimpleTestCase):
    def test_ying_core_form(self):
        ctx, program = dj_program(BooleanOracle.parse("constant0", 2))
        self.assertEqual(ctx.names, ('q1', 'q2', 'qe'))
        statements = ast.flatten(program)
        self.assertEqual(len(statements), 7)
        self.assertEqual(statements[-1], ast.ApplyU(('q1', 'q2'), 'H2'))
        self.assertIs(infer_dialect(ctx, program), Dialect.YING)

    def test_qpl_form(self):
        f = BooleanOracle.parse("balanced:0110")
        ctx, program = dj_program(f, Dialect.QPL)
        tables = dj_tables(f)
        typed = typecheck(ctx, program, Dialect.QPL, tables)
        self.assertEqual(typed.out_ctx.names, ('b1', 'b2', 'q1', 'q2'))
        with self.assertRaises(TypeCheckError):
            typecheck(ctx, program, Dialect.YING, tables)
        measures = [s for s in ast.flatten(program) if isinstance(s, ast.MeasureIf)]
        self.assertEqual(len(measures), 2)

    def test_target_and_intermediate(self):
        target = dj_target(2)
        np.testing.assert_array_equal(np.diag(target).real, [1, 1, 0, 0, 0, 0, 0, 0])
        middle = dj_intermediate_predicate(2)
        pattern = np.array([[0.25 if (i + j) % 2 == 0 else 0.0 for j in range(8)] for i in range(8)])
        np.testing.assert_allclose(middle, pattern, atol=1e-12)


class VerificationTests(SimpleTestCase):
    def test_two_bit_oracles(self):
        for f in all_oracles(2):
            report = dj_verify(f)
            with self.subTest(oracle=str(f)):
                self.assertTrue(report.correct)
                self.assertAlmostEqual(report.p00, expected_p00(f), delta=1e-9)
                self.assertAlmostEqual(report.p00, 1.0 if f.kind is OracleClass.CONSTANT else 0.0, delta=1e-9)

    def test_constant_oracles_up_to_three_bits(self):
        for k in (1, 2, 3):
            for value in (0, 1):
                report = dj_verify(BooleanOracle.parse(f"constant{value}", k))
                with self.subTest(k=k, value=value):
                    self.assertAlmostEqual(report.p00, 1.0, delta=1e-9)
                    self.assertIs(report.classification, OracleClass.CONSTANT)

    def test_first_bit_oracle(self):
        # f(x) = x1 with q1 the most significant input bit
        final = final_state(BooleanOracle.parse("balanced:0011"))
        self.assertAlmostEqual(eval_assertion("Pr(q1 = 1 & q2 = 0) = 1", final.ctx, final.state).probability,
                               1.0, delta=1e-9)

    def test_parity_oracle(self):
        for text in ("balanced:0110", "balanced:1001"):
            final = final_state(BooleanOracle.parse(text))
            with self.subTest(oracle=text):
                self.assertTrue(eval_assertion("Pr(q1 = 1 & q2 = 1) >= 1", final.ctx, final.state).holds)

    def test_qpl_form_agrees(self):
        for f in all_oracles(2):
            report = dj_qpl_verify(f)
            with self.subTest(oracle=str(f)):
                self.assertTrue(report.correct)
                self.assertAlmostEqual(report.p00, dj_verify(f).p00, delta=1e-9)

    def test_weakest_precondition(self):
        for f in all_oracles(2):
            ctx, program = dj_program(f)
            pre = wp(ctx, program, QuantumPredicate(dj_target(2)), tables=dj_tables(f))
            expected = np.eye(8) if f.kind is OracleClass.CONSTANT else np.zeros((8, 8))
            with self.subTest(oracle=str(f)):
                np.testing.assert_allclose(pre.mat, expected, atol=1e-9)


class OutlineTests(SimpleTestCase):
    def test_outlines_check(self):
        for text in ("constant0", "constant1", "balanced:0011", "balanced:0110"):
            verdict = check_outline(dj_outline(BooleanOracle.parse(text, 2)))
            with self.subTest(oracle=text):
                self.assertTrue(verdict.valid, verdict.message)
                self.assertEqual(verdict.steps[-1].id, 'cons')
                self.assertEqual(len(verdict.steps), 7 + 6 + 1)

    def test_outline_annotations(self):
        outline = dj_outline(BooleanOracle.parse("constant1", 2))
        steps = {step.id: step for step in outline.steps}
        np.testing.assert_allclose(steps['s7'].pre.mat, dj_intermediate_predicate(2), atol=1e-12)
        np.testing.assert_allclose(steps['s1'].pre.mat, np.eye(8), atol=1e-12)
        np.testing.assert_allclose(outline.pre.mat, np.eye(8))

    def test_outline_for_three_bits(self):
        self.assertTrue(check_outline(dj_outline(BooleanOracle.parse("balanced:00001111"))).valid)


class DeutschJozsaAPITests(SimpleTestCase):
    def setUp(self):
        self.client = APIClient()

    def test_constant(self):
        response = self.client.post("/casestudy/dj/", {'k': 2, 'f': "constant1"}, format='json')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.data['schema'], 1)
        self.assertEqual(response.data['classification'], 'constant')
        self.assertAlmostEqual(response.data['p00'], 1.0, delta=1e-9)
        self.assertTrue(response.data['correct'])

    def test_balanced_in_qpl(self):
        response = self.client.post("/casestudy/dj/", {'f': "balanced:0101", 'dialect': 'qpl'}, format='json')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.data['classification'], 'balanced')
        self.assertEqual(response.data['k'], 2)

    def test_bad_oracle(self):
        response = self.client.post("/casestudy/dj/", {'f': "balanced:0111"}, format='json')
        self.assertEqual(response.status_code, 400)
        self.assertIn('f', response.data)
