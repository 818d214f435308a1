from pathlib import Path

import numpy as np
from django.conf import settings as django_settings
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st
from rest_framework.test import APIClient

from linalg import kernel
from linalg.exceptions import QuantumVerificationError
from linalg.operators import random_density
from semantics.denotational import Evaluator, evaluate
from semantics.options import EvalOptions

from . import ast
from .ast import Dialect, Kind, Var, VarContext
from .exceptions import DuplicateDeclaration, LexicalError, ParseError, TableError, TypeCheckError
from .lexer import Token, tokenize
from .parser import parse, parse_statement
from .printer import print_program
from .tables import BUILTIN_GATES, HADAMARD, Tables, expanded_hadamard
from .typing import typecheck

SAMPLES = Path(django_settings.BASE_DIR) / "samples"

ROUND_TRIP_CTX = VarContext((
    Var('q1', Kind.QBIT), Var('q2', Kind.QBIT), Var('n', Kind.QUNIT, 3), Var('b', Kind.BIT),
))


def random_command(rng, depth, fresh):
    """Syntactically valid command over ``ROUND_TRIP_CTX``; not necessarily well-typed."""
    leaves = ['skip', 'init', 'assign', 'apply', 'new', 'discard']
    nodes = ['seq', 'if', 'measure-if', 'case', 'while'] if depth > 0 else []
    choice = rng.choice(leaves + nodes * 2)
    quantum = ['q1', 'q2', 'n']
    if choice == 'skip':
        return ast.Skip()
    if choice == 'init':
        return ast.InitZero(str(rng.choice(quantum)))
    if choice == 'assign':
        return ast.AssignBit('b', int(rng.integers(2)))
    if choice == 'apply':
        count = int(rng.integers(1, 3))
        targets = tuple(str(v) for v in rng.choice(quantum, size=count, replace=False))
        return ast.ApplyU(targets, str(rng.choice(['H', 'X', 'CNOT', 'H2', 'Uf'])))
    if choice == 'new':
        name = f"a{len(fresh)}"
        fresh.append(name)
        return ast.NewQbit(name) if rng.integers(2) else ast.NewBit(name)
    if choice == 'discard':
        return ast.Discard(str(rng.choice(quantum + ['b'])))
    if choice == 'seq':
        return ast.Seq(random_command(rng, depth - 1, fresh), random_command(rng, depth - 1, fresh))
    if choice == 'if':
        return ast.IfBit('b', random_command(rng, depth - 1, fresh), random_command(rng, depth - 1, fresh))
    if choice == 'measure-if':
        return ast.MeasureIf('q1', random_command(rng, depth - 1, fresh), random_command(rng, depth - 1, fresh))
    if choice == 'case':
        arms = tuple(random_command(rng, depth - 1, fresh) for _ in range(int(rng.integers(1, 4))))
        return ast.MeasureCase('std', ('q2',), arms)
    return ast.While('std', ('q1',), random_command(rng, depth - 1, fresh))


class ParseTests(SimpleTestCase):
    def test_smallest_program(self):
        ctx, command = parse("var q: qbit; q := 0")
        self.assertEqual(ctx, VarContext((Var('q', Kind.QBIT),)))
        self.assertEqual(command, ast.InitZero('q'))

    def test_deutsch_jozsa_listing(self):
        ctx, command = parse((SAMPLES / "dj.qpl").read_text())
        self.assertEqual(ctx.names, ('q1', 'q2', 'qe'))
        statements = ast.flatten(command)
        self.assertEqual(len(statements), 7)
        self.assertTrue(all(isinstance(s, ast.InitZero) for s in statements[:3]))
        self.assertTrue(all(isinstance(s, ast.ApplyU) for s in statements[3:]))
        self.assertEqual(statements[4], ast.ApplyU(('q1', 'q2', 'qe'), 'H3'))
        self.assertIsInstance(command.second, ast.Seq)

    def test_undeclared_variable_is_located(self):
        with self.assertRaises(ParseError) as caught:
            parse("var r: qbit;\nwhile std(q) = 1 do skip od")
        self.assertIn("'q'", str(caught.exception))
        self.assertEqual((caught.exception.line, caught.exception.column), (2, 11))

    def test_lexical_error(self):
        with self.assertRaises(LexicalError) as caught:
            parse("var q: qbit; q *= H $")
        self.assertEqual(caught.exception.column, 21)

    def test_assertion_tokens(self):
        tokens = tokenize("Pr(q1 = 0 & q2 = 1) + Pr(n = 2) >= 2.5e-1")
        kinds = [t.kind for t in tokens]
        self.assertEqual(kinds.count('IDENT'), 5)
        self.assertEqual([t.text for t in tokens if t.kind == 'PUNCT' and t.text in "&+"], ['&', '+'])
        self.assertEqual(tokens[-3:-1], [Token('COMPARE', '>=', 1, 33), Token('REAL', '2.5e-1', 1, 36)])

    def test_assertion_operators_are_not_program_syntax(self):
        with self.assertRaises(ParseError):
            parse("var q: qbit; q *= H + X")

    def test_duplicate_declaration(self):
        with self.assertRaises(DuplicateDeclaration):
            parse("var q: qbit, q: bit; skip")

    def test_syntax_error(self):
        with self.assertRaises(ParseError) as caught:
            parse("var q: qbit; if q then skip fi")
        self.assertIn("'else'", str(caught.exception))

    def test_assignment_resolution(self):
        _, command = parse("var b: bit, q: qbit; b := 0; q := 0; b := 1")
        self.assertEqual(ast.flatten(command), [ast.AssignBit('b', 0), ast.InitZero('q'), ast.AssignBit('b', 1)])

    def test_qunit_dimension(self):
        ctx, _ = parse("var n: qunit[5], m: qunit; skip")
        self.assertEqual(ctx.dims, (5, django_settings.QHL_QUNIT_DIM))

    def test_measure_cases_must_be_numbered(self):
        with self.assertRaises(ParseError):
            parse("var q: qbit; measure std(q) { case 0: skip case 2: skip }")

    def test_optional_header(self):
        ctx, command = parse("new qbit q; q *= H; discard q")
        self.assertEqual(len(ctx), 0)
        self.assertEqual(ast.statement_count(command), 3)

    def test_trailing_separator(self):
        _, command = parse("var q: qbit; q := 0; skip;")
        self.assertEqual(command, ast.Seq(ast.InitZero('q'), ast.Skip()))

    def test_comments(self):
        _, command = parse("# header\nvar q: qbit; # declare\nq *= H # gate\n")
        self.assertEqual(command, ast.ApplyU(('q',), 'H'))

    def test_statement_in_context(self):
        command = parse_statement("q1, q2 *= CNOT", ROUND_TRIP_CTX)
        self.assertEqual(command, ast.ApplyU(('q1', 'q2'), 'CNOT'))


class PrintTests(SimpleTestCase):
    def test_skip(self):
        self.assertEqual(print_program(VarContext(), ast.Skip()), "skip\n")

    def test_nested_sequence_reparses_right_leaning(self):
        ctx = VarContext((Var('q', Kind.QBIT),))
        left = ast.Seq(ast.Seq(ast.InitZero('q'), ast.ApplyU(('q',), 'H')), ast.Skip())
        text = print_program(ctx, left)
        self.assertEqual(text, "var q: qbit;\nq := 0;\nq *= H;\nskip\n")
        self.assertEqual(parse(text), (ctx, ast.normalize(left)))

    def test_samples_round_trip(self):
        for path in sorted(SAMPLES.glob("*.qpl")):
            with self.subTest(path=path.name):
                ctx, command = parse(path.read_text())
                self.assertEqual(parse(print_program(ctx, command)), (ctx, command))

    def test_random_round_trips(self):
        rng = np.random.default_rng(2024)
        for index in range(500):
            command = random_command(rng, int(rng.integers(0, 7)), [])
            text = print_program(ROUND_TRIP_CTX, command)
            with self.subTest(index=index):
                self.assertEqual(parse(text), (ROUND_TRIP_CTX, ast.normalize(command)), text)


class TypecheckTests(SimpleTestCase):
    def kinds(self, text, dialect=Dialect.QPL):
        ctx, command = parse(text)
        with self.assertRaises(TypeCheckError) as caught:
            typecheck(ctx, command, dialect)
        return caught.exception.kinds()

    def test_if_needs_a_bit(self):
        self.assertEqual(self.kinds("var q: qbit; if q then skip else skip fi"), ['kind-mismatch'])

    def test_use_after_discard(self):
        self.assertEqual(self.kinds("new qbit q; discard q; q *= H"), ['use-after-discard'])

    def test_gate_arity(self):
        self.assertEqual(self.kinds("var q1: qbit, q2: qbit; q1, q2 *= H", Dialect.YING), ['arity-mismatch'])

    def test_gate_on_bit(self):
        self.assertEqual(self.kinds("var b: bit; b *= X"), ['kind-mismatch'])

    def test_measure_if_needs_a_qbit(self):
        self.assertEqual(self.kinds("var b: bit; measure b then skip else skip fi"), ['kind-mismatch'])

    def test_branch_contexts_must_agree(self):
        self.assertEqual(self.kinds("var b: bit; if b then new qbit q else skip fi"), ['context-mismatch'])

    def test_loop_body_restores_context(self):
        self.assertEqual(self.kinds("var q: qbit; while std(q) = 1 do new qbit r od"), ['context-mismatch'])

    def test_case_count(self):
        self.assertEqual(self.kinds("var q: qbit; measure std(q) { case 0: skip }", Dialect.YING),
                         ['arity-mismatch'])

    def test_unknown_gate(self):
        self.assertEqual(self.kinds("var q: qbit; q *= Uf", Dialect.YING), ['unknown-gate'])

    def test_unknown_measurement(self):
        self.assertEqual(self.kinds("var q: qbit; while parity(q) = 1 do skip od", Dialect.YING),
                         ['unknown-measurement'])

    def test_ying_core_rejects_qpl_constructs(self):
        self.assertEqual(self.kinds("var q: qbit; new qbit r", Dialect.YING), ['dialect'])
        self.assertIn('dialect', self.kinds("var b: bit; skip", Dialect.YING))

    def test_output_context(self):
        ctx, command = parse("new qbit q; new bit b; measure q then b := 0 else b := 1 fi; discard q")
        typed = typecheck(ctx, command, Dialect.QPL)
        self.assertEqual(typed.out_ctx, VarContext((Var('b', Kind.BIT),)))
        self.assertEqual(ast.output_context(command, ctx), typed.out_ctx)

    def test_issues_carry_positions(self):
        ctx, command = parse("var q: qbit;\nskip;\nq *= CNOT")
        with self.assertRaises(TypeCheckError) as caught:
            typecheck(ctx, command)
        self.assertEqual((caught.exception.issues[0].line, caught.exception.issues[0].column), (3, 1))

    def test_dialect_inference(self):
        self.assertEqual(ast.infer_dialect(*parse("var q: qbit; q *= H")), Dialect.YING)
        self.assertEqual(ast.infer_dialect(*parse((SAMPLES / "dj_qpl.qpl").read_text())), Dialect.QPL)

    def test_accepts_exactly_what_executes(self):
        contexts = (
            VarContext((Var('q1', Kind.QBIT), Var('q2', Kind.QBIT), Var('n', Kind.QUNIT, 2), Var('b', Kind.BIT))),
            VarContext((Var('q1', Kind.QBIT), Var('q2', Kind.QBIT), Var('n', Kind.QUNIT, 2))),
        )
        opts = EvalOptions.from_settings(loop_max_iters=8)
        tables = Tables.builtins()
        rng = np.random.default_rng(41)
        verdicts = set()
        for index in range(400):
            ctx = contexts[index % 2]
            command = random_command(rng, int(rng.integers(0, 4)), [])
            if sum(isinstance(c, (ast.NewBit, ast.NewQbit)) for c in ast.walk(command)) > 2:
                continue
            rho = random_density(ctx.total_dim, rng)
            try:
                typed = typecheck(ctx, command, ast.infer_dialect(ctx, command))
            except TypeCheckError:
                verdicts.add('rejected')
                with self.subTest(index=index, program=print_program(ctx, command)):
                    with self.assertRaises((QuantumVerificationError, KeyError, ValueError)):
                        Evaluator(opts, tables).run(command, ctx, rho.mat)
                continue
            verdicts.add(typed.dialect)
            with self.subTest(index=index, program=print_program(ctx, command)):
                result = evaluate(ctx, command, rho, opts)
                self.assertEqual(result.ctx, typed.out_ctx)
                self.assertLessEqual(result.state.trace, 1.0 + 1e-9)
        self.assertEqual(verdicts, {'rejected', Dialect.YING, Dialect.QPL})


class TableTests(SimpleTestCase):
    def test_builtin_gates_are_unitary(self):
        for name, matrix in BUILTIN_GATES.items():
            with self.subTest(gate=name):
                self.assertTrue(kernel.is_unitary(matrix, 1e-12))

    def test_standard_measurement_is_complete(self):
        tables = Tables.builtins()
        for dim in (2, 3, 4, 8):
            ops = tables.measurements.resolve('std', dim)
            total = sum(kernel.dagger(op) @ op for op in ops)
            self.assertLessEqual(kernel.max_norm(total - kernel.identity(dim)), 1e-12)

    @settings(max_examples=6, deadline=None)
    @given(st.integers(min_value=1, max_value=6))
    def test_expanded_hadamards(self, k):
        matrix = Tables.builtins().gates.resolve(f"H{k}", 2 ** k)
        self.assertTrue(kernel.is_unitary(matrix, 1e-12))
        np.testing.assert_allclose(matrix, kernel.kron_all([HADAMARD] * k))
        np.testing.assert_allclose(matrix @ matrix, kernel.identity(2 ** k), atol=1e-12)

    def test_identity_is_polymorphic(self):
        np.testing.assert_array_equal(Tables.builtins().gates.resolve('I', 3), kernel.identity(3))

    def test_user_gates_are_validated(self):
        with self.assertRaises(TableError):
            Tables.builtins().extended({'matrices': {'half': expanded_hadamard(1) / 2}})
        with self.assertRaises(TableError):
            Tables.builtins().extended({'matrices': {'H2': kernel.identity(4)}})

    def test_user_measurements_are_validated(self):
        with self.assertRaises(TableError):
            Tables.builtins().extended({'measurements': {'M': [kernel.outer(0, 0)]}})
        tables = Tables.builtins().extended({'measurements': {'M': [kernel.outer(0, 0), kernel.outer(1, 1)]}})
        self.assertIn('M', tables.measurements)


class LangAPITests(SimpleTestCase):
    def setUp(self):
        self.client = APIClient()

    def test_gates(self):
        response = self.client.get("/lang/gates/")
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.data['gates']['CNOT'], 4)
        self.assertIsNone(response.data['gates']['I'])
        self.assertEqual(response.data['measurements'], ['std'])

    def test_typecheck(self):
        response = self.client.post("/lang/typecheck/", {'program': "new qbit q; q *= H"}, format='json')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.data['dialect'], 'qpl')
        self.assertEqual(response.data['output_context'], ['q: qbit'])
        self.assertEqual(response.data['output_dimension'], 2)

    def test_typecheck_reports_issues(self):
        response = self.client.post("/lang/typecheck/", {'program': "var q: qbit; q *= Uf"}, format='json')
        self.assertEqual(response.status_code, 400)
        self.assertEqual(response.data['program'][0]['kind'], 'unknown-gate')

    def test_parse_error_is_bad_request(self):
        response = self.client.post("/lang/typecheck/", {'program': "var q: qbit; q *="}, format='json')
        self.assertEqual(response.status_code, 400)
