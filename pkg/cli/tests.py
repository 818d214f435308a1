import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from .formatting import format_human, format_machine, format_matrix
from .main import main

SAMPLES = Path(settings.BASE_DIR) / "samples"


def sample(name):
    return str(SAMPLES / name)


class QhlTestCase(SimpleTestCase):
    def qhl(self, *argv):
        self.out, self.err = StringIO(), StringIO()
        return main(list(argv), stdout=self.out, stderr=self.err)

    def report(self):
        return json.loads(self.out.getvalue())


class DeutschJozsaCommandTests(QhlTestCase):
    def test_constant_oracle(self):
        self.assertEqual(self.qhl("dj", "--k", "2", "--f", "constant1", "--format", "machine"), 0)
        report = self.report()
        self.assertEqual(report['schema'], 1)
        self.assertAlmostEqual(report['p00'], 1.0, delta=1e-9)
        self.assertEqual(report['classification'], 'constant')

    def test_balanced_oracle_in_qpl(self):
        self.assertEqual(self.qhl("dj", "--f", "balanced:1010", "--dialect", "qpl"), 0)
        self.assertIn("classification: balanced", self.out.getvalue())

    def test_bad_oracle(self):
        self.assertEqual(self.qhl("dj", "--f", "balanced:1110"), 2)
        self.assertIn("not balanced", self.err.getvalue())


class CheckCommandTests(QhlTestCase):
    def test_deutsch_jozsa_triple(self):
        code = self.qhl("check", sample("dj.qpl"), "--gates", sample("uf_const1.json"),
                        "--pre", sample("I8.json"), "--post", sample("T.json"), "--mode", "tot")
        self.assertEqual(code, 0)
        self.assertIn("verdict: valid", self.out.getvalue())

    def test_balanced_oracle_fails_the_constant_triple(self):
        code = self.qhl("check", sample("dj.qpl"), "--gates", sample("uf_b1.json"),
                        "--pre", sample("I8.json"), "--post", sample("T.json"))
        self.assertEqual(code, 1)

    def test_invalid_triple_has_a_witness(self):
        code = self.qhl("check", sample("flip.qpl"), "--pre", sample("I.json"), "--post", sample("zero.json"),
                        "--format", "machine")
        self.assertEqual(code, 1)
        report = self.report()
        self.assertEqual(report['verdict'], 'invalid')
        self.assertAlmostEqual(report['min_eigenvalue'], -1.0, delta=1e-12)
        self.assertEqual(report['witness']['dim'], [2, 2])
        self.assertIn("invalid", self.err.getvalue())

    def test_partial_correctness_of_divergence(self):
        args = ("check", sample("loop.qpl"), "--pre", sample("I.json"), "--post", sample("I.json"))
        self.assertEqual(self.qhl(*args, "--mode", "par"), 0)
        self.assertEqual(self.qhl(*args, "--mode", "tot"), 1)

    def test_inconclusive(self):
        with self.assertLogs('hoare', level='WARNING'):
            code = self.qhl("check", sample("coin.qpl"), "--pre", sample("I.json"), "--post", sample("I.json"),
                            "--fix-max-iters", "2")
        self.assertEqual(code, 3)
        self.assertIn("inconclusive", self.err.getvalue())

    def test_dimension_mismatch(self):
        code = self.qhl("check", sample("flip.qpl"), "--pre", sample("I8.json"), "--post", sample("I.json"))
        self.assertEqual(code, 2)

    def test_unknown_mode(self):
        code = self.qhl("check", sample("flip.qpl"), "--pre", sample("I.json"), "--post", sample("I.json"),
                        "--mode", "both")
        self.assertEqual(code, 2)


class RunCommandTests(QhlTestCase):
    def test_hadamard(self):
        self.assertEqual(self.qhl("run", sample("q_h.qpl"), "--rho", sample("rho0.json"), "--format", "machine"), 0)
        report = self.report()
        np.testing.assert_allclose(report['final_state']['re'], np.full((2, 2), 0.5), atol=1e-12)
        self.assertEqual(report['path_count'], 1)
        self.assertTrue(report['deterministic'])

    def test_half_divergence(self):
        with self.assertLogs('semantics', level='WARNING'):
            code = self.qhl("run", sample("loop.qpl"), "--rho", sample("plus.json"), "--format", "machine")
        self.assertEqual(code, 0)
        report = self.report()
        self.assertAlmostEqual(report['termination_probability'], 0.5, delta=1e-12)
        self.assertAlmostEqual(report['truncation_error'], 0.5, delta=1e-12)
        self.assertFalse(report['deterministic'])

    def test_qpl_program_from_the_empty_context(self):
        self.assertEqual(self.qhl("run", sample("dj_qpl.qpl"), "--gates", sample("uf_const1.json"),
                                  "--rho", sample("empty.json"), "--format", "machine"), 0)
        self.assertAlmostEqual(self.report()['trace'], 1.0, delta=1e-9)

    def test_human_output(self):
        self.assertEqual(self.qhl("run", sample("q_h.qpl"), "--rho", sample("rho0.json")), 0)
        text = self.out.getvalue()
        self.assertIn("final_state: 2x2", text)
        self.assertIn("+0.500000+0.000000i", text)
        self.assertNotIn("schema", text)

    def test_exact_mode_refuses_truncation(self):
        code = self.qhl("run", sample("coin.qpl"), "--rho", sample("rho1.json"),
                        "--eval-mode", "exact-kraus", "--loop-max-iters", "3")
        self.assertEqual(code, 3)

    def test_missing_file(self):
        self.assertEqual(self.qhl("run", sample("absent.qpl"), "--rho", sample("rho0.json")), 2)
        self.assertIn("cannot read", self.err.getvalue())

    def test_parse_error(self):
        with tempfile.TemporaryDirectory() as tmp:
            program = Path(tmp) / "bad.qpl"
            program.write_text("var q: qbit;\nq *= \n")
            self.assertEqual(self.qhl("run", str(program), "--rho", sample("rho0.json")), 2)

    def test_state_that_is_not_a_density_matrix(self):
        self.assertEqual(self.qhl("run", sample("q_h.qpl"), "--rho", sample("I.json")), 2)

    def test_negative_depth(self):
        self.assertEqual(self.qhl("run", sample("q_h.qpl"), "--rho", sample("rho0.json"), "--depth", "-1"), 2)

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = Path(tmp) / "report.json"
            code = self.qhl("run", sample("flip.qpl"), "--rho", sample("rho0.json"), "--format", "machine",
                            "--output", str(target))
            self.assertEqual(code, 0)
            self.assertEqual(self.out.getvalue(), "")
            report = json.loads(target.read_text())
        np.testing.assert_allclose(report['final_state']['re'], [[0, 0], [0, 1]])


class TransformCommandTests(QhlTestCase):
    def test_wp(self):
        self.assertEqual(self.qhl("wp", sample("q_h.qpl"), "--post", sample("rho0.json"), "--format", "machine"), 0)
        np.testing.assert_allclose(self.report()['predicate']['re'], np.full((2, 2), 0.5), atol=1e-12)

    def test_wlp_of_divergence(self):
        self.assertEqual(self.qhl("wlp", sample("loop.qpl"), "--post", sample("zero.json"), "--format", "machine"), 0)
        np.testing.assert_allclose(self.report()['predicate']['re'], [[0, 0], [0, 1]], atol=1e-12)

    def test_wp_of_deutsch_jozsa(self):
        code = self.qhl("wp", sample("dj.qpl"), "--gates", sample("uf_const1.json"), "--post", sample("T.json"),
                        "--format", "machine")
        self.assertEqual(code, 0)
        np.testing.assert_allclose(self.report()['predicate']['re'], np.eye(8), atol=1e-9)

    def test_fixpoint_cap(self):
        with self.assertLogs('hoare', level='WARNING'):
            code = self.qhl("wp", sample("coin.qpl"), "--post", sample("I.json"), "--fix-max-iters", "2")
        self.assertEqual(code, 3)

    def test_unknown_gate(self):
        self.assertEqual(self.qhl("wp", sample("dj.qpl"), "--post", sample("T.json")), 2)


class ProveCommandTests(QhlTestCase):
    def test_valid_outline(self):
        self.assertEqual(self.qhl("prove", sample("dj_outline.json"), "--format", "machine"), 0)
        report = self.report()
        self.assertEqual(report['verdict'], 'valid')
        self.assertEqual(len(report['steps']), 13)

    def test_broken_outline(self):
        self.assertEqual(self.qhl("prove", sample("dj_outline_broken.json")), 1)
        self.assertIn("verdict: invalid", self.out.getvalue())

    def test_not_an_outline(self):
        self.assertEqual(self.qhl("prove", sample("I.json")), 2)


class AssertCommandTests(QhlTestCase):
    def test_holds(self):
        code = self.qhl("assert", sample("q_h.qpl"), "--rho", sample("rho0.json"), "--expr", "Pr(q = 0) = 0.5")
        self.assertEqual(code, 0)
        self.assertIn("holds: True", self.out.getvalue())

    def test_fails(self):
        code = self.qhl("assert", sample("q_h.qpl"), "--rho", sample("rho0.json"), "--expr", "Pr(q = 0) >= 0.9")
        self.assertEqual(code, 1)
        self.assertIn("assertion does not hold", self.err.getvalue())

    def test_bad_expression(self):
        code = self.qhl("assert", sample("q_h.qpl"), "--rho", sample("rho0.json"), "--expr", "Pr(q = 0) > 1")
        self.assertEqual(code, 2)


class CallCommandTests(SimpleTestCase):
    def test_success_writes_the_report(self):
        out = StringIO()
        call_command("qhl", "dj", "--k", "1", "--f", "constant0", "--format", "machine", stdout=out)
        self.assertEqual(json.loads(out.getvalue())['classification'], 'constant')

    def test_failure_carries_the_exit_code(self):
        with self.assertRaises(CommandError) as raised:
            call_command("qhl", "check", sample("flip.qpl"), "--pre", sample("I.json"), "--post",
                         sample("zero.json"), stdout=StringIO())
        self.assertEqual(raised.exception.returncode, 1)


class FormattingTests(SimpleTestCase):
    def test_machine_output_is_sorted(self):
        text = format_machine({'b': 1, 'a': [0.5], 'schema': 1})
        self.assertEqual(list(json.loads(text)), ['a', 'b', 'schema'])
        self.assertTrue(text.index('"a"') < text.index('"b"'))

    def test_matrix_cells(self):
        lines = format_matrix({'dim': [1, 2], 're': [[1e-15, -0.25]], 'im': [[0.5, 0]]})
        self.assertEqual(lines, ["    +0.000000+0.500000i  -0.250000+0.000000i"])

    def test_human_lists(self):
        text = format_human({'schema': 1, 'steps': [{'id': 's1', 'valid': True, 'message': ""}], 'ok': None})
        self.assertEqual(text, "steps:\n  - id=s1, valid=True\nok: -")
