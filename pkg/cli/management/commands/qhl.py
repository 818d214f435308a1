import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from casestudy.deutsch_jozsa import BooleanOracle, dj_qpl_verify, dj_verify
from casestudy.serializers import DJReportSerializer
from hoare.assertions import ProbAssertion, eval_assertion
from hoare.exceptions import FixpointNotConverged
from hoare.outlines import check_outline, load_outline
from hoare.serializers import (AssertionReportSerializer, OutlineVerdictSerializer, PredicateReportSerializer,
                               VerdictSerializer)
from hoare.transformers import weakest
from hoare.triples import HoareTriple, Outcome, check_triple
from lang.ast import Dialect, infer_dialect
from lang.parser import parse
from lang.tables import load_tables
from lang.typing import typecheck
from linalg.exceptions import QuantumVerificationError
from linalg.exchange import load_matrix
from linalg.operators import DensityMatrix, QuantumPredicate
from semantics.denotational import evaluate
from semantics.exceptions import TruncationNotConverged
from semantics.options import EvalOptions, Mode
from semantics.reports import DEFAULT_DEPTH, run_program
from semantics.serializers import RunReportSerializer

from cli.formatting import render

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_MALFORMED, EXIT_INCONCLUSIVE = 0, 1, 2, 3

VERDICT_EXIT = {
    Outcome.VALID: EXIT_OK,
    Outcome.INVALID: EXIT_INVALID,
    Outcome.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class Command(BaseCommand):
    help = "Run, transform and verify quantum programs."
    requires_system_checks = []

    def add_arguments(self, parser):
        subcommands = parser.add_subparsers(dest='subcommand', required=True)

        run = subcommands.add_parser('run', help="evaluate a program on an input state")
        self.program_arguments(run)
        run.add_argument('--rho', required=True, help="input state matrix")
        run.add_argument('--depth', type=int, default=DEFAULT_DEPTH,
                         help="depth cap of the operational run that counts paths")

        for name, liberal in (('wp', "weakest precondition"), ('wlp', "weakest liberal precondition")):
            transform = subcommands.add_parser(name, help=liberal)
            self.program_arguments(transform)
            transform.add_argument('--post', required=True, help="postcondition matrix")

        check = subcommands.add_parser('check', help="decide a Hoare triple")
        self.program_arguments(check)
        check.add_argument('--pre', required=True, help="precondition matrix")
        check.add_argument('--post', required=True, help="postcondition matrix")
        check.add_argument('--mode', choices=['tot', 'par', 'total', 'partial'], default='tot')

        prove = subcommands.add_parser('prove', help="check a proof outline")
        prove.add_argument('outline')
        self.output_arguments(prove)

        dj = subcommands.add_parser('dj', help="classify a Deutsch-Jozsa oracle")
        dj.add_argument('--k', type=int, default=None, help="number of input bits")
        dj.add_argument('--f', required=True, help="constant0, constant1 or balanced:<bits>")
        dj.add_argument('--dialect', choices=[d.value for d in Dialect], default=Dialect.YING.value)
        self.output_arguments(dj)

        assertion = subcommands.add_parser('assert', help="evaluate a probability assertion on the final state")
        self.program_arguments(assertion)
        assertion.add_argument('--rho', required=True, help="input state matrix")
        assertion.add_argument('--expr', required=True, help="e.g. 'Pr(q = 0) >= 0.5'")

    def output_arguments(self, parser):
        parser.add_argument('--format', choices=['human', 'machine'], default='human')
        parser.add_argument('--output', default=None, help="write the report here instead of stdout")
        parser.add_argument('--tol', type=float, default=None)
        parser.add_argument('--loop-max-iters', type=int, default=None)
        parser.add_argument('--loop-mass-eps', type=float, default=None)
        parser.add_argument('--fix-eps', type=float, default=None)
        parser.add_argument('--fix-max-iters', type=int, default=None)
        parser.add_argument('--eval-mode', choices=[m.value for m in Mode], default=None)

    def program_arguments(self, parser):
        parser.add_argument('program')
        parser.add_argument('--gates', action='append', default=[], help="gate/measurement library (repeatable)")
        parser.add_argument('--dialect', choices=[d.value for d in Dialect], default=None)
        self.output_arguments(parser)

    def handle(self, *args, **options):
        subcommand = options['subcommand']
        logger.debug("qhl %s", subcommand)
        handler = getattr(self, f"handle_{subcommand}")
        try:
            self.opts = EvalOptions.from_settings(
                tol=options['tol'],
                loop_max_iters=options['loop_max_iters'],
                loop_mass_eps=options['loop_mass_eps'],
                fix_eps=options['fix_eps'],
                fix_max_iters=options['fix_max_iters'],
                mode=options['eval_mode'],
            )
            report, code = handler(options)
        except (FixpointNotConverged, TruncationNotConverged) as exc:
            raise CommandError(str(exc), returncode=EXIT_INCONCLUSIVE)
        except QuantumVerificationError as exc:
            raise CommandError(str(exc), returncode=EXIT_MALFORMED)
        self.emit(render(report, options['format']), options['output'])
        if code != EXIT_OK:
            raise CommandError(self.failure(subcommand, report), returncode=code)

    def emit(self, text, output):
        if output is None:
            self.stdout.write(text)
            return
        try:
            Path(output).write_text(text + "\n")
        except OSError as exc:
            raise CommandError(f"cannot write {output}: {exc.strerror}", returncode=EXIT_MALFORMED)

    def failure(self, subcommand, report):
        if subcommand == 'assert':
            return f"assertion does not hold: {report['assertion']}"
        if report.get('verdict') == Outcome.INCONCLUSIVE.value:
            return f"inconclusive: the loop fixpoint did not converge (residual {report['residual']:.3e})"
        return f"{subcommand}: {report.get('verdict', 'failed')}"

    def load_program(self, options):
        try:
            text = Path(options['program']).read_text()
        except OSError as exc:
            raise CommandError(f"cannot read {options['program']}: {exc.strerror}", returncode=EXIT_MALFORMED)
        tables = load_tables(*options['gates'], tol=self.opts.tol)
        ctx, command = parse(text)
        typed = typecheck(ctx, command, options['dialect'] or infer_dialect(ctx, command), tables)
        return typed, tables

    def handle_run(self, options):
        typed, tables = self.load_program(options)
        if options['depth'] < 0:
            raise CommandError("--depth must not be negative", returncode=EXIT_MALFORMED)
        rho = DensityMatrix(load_matrix(options['rho']), self.opts.tol)
        report = run_program(typed, rho, self.opts, tables, options['depth'])
        return RunReportSerializer(report).data, EXIT_OK

    def transform(self, options, liberal):
        typed, tables = self.load_program(options)
        post = QuantumPredicate(load_matrix(options['post']), self.opts.tol)
        result = weakest(typed.ctx, typed.command, post, self.opts, tables, liberal)
        return PredicateReportSerializer(result).data, EXIT_OK

    def handle_wp(self, options):
        return self.transform(options, liberal=False)

    def handle_wlp(self, options):
        return self.transform(options, liberal=True)

    def handle_check(self, options):
        typed, tables = self.load_program(options)
        pre = QuantumPredicate(load_matrix(options['pre']), self.opts.tol)
        post = QuantumPredicate(load_matrix(options['post']), self.opts.tol)
        verdict = check_triple(HoareTriple(typed.ctx, typed.command, pre, post, options['mode'], tables), self.opts)
        return VerdictSerializer(verdict).data, VERDICT_EXIT[verdict.outcome]

    def handle_prove(self, options):
        verdict = check_outline(load_outline(options['outline']), self.opts)
        return OutlineVerdictSerializer(verdict).data, EXIT_OK if verdict.valid else EXIT_INVALID

    def handle_dj(self, options):
        oracle = BooleanOracle.parse(options['f'], options['k'])
        verify = dj_qpl_verify if options['dialect'] == Dialect.QPL.value else dj_verify
        return DJReportSerializer(verify(oracle, self.opts)).data, EXIT_OK

    def handle_assert(self, options):
        typed, tables = self.load_program(options)
        rho = DensityMatrix(load_matrix(options['rho']), self.opts.tol)
        assertion = ProbAssertion.parse(options['expr'])
        final = evaluate(typed.ctx, typed.command, rho, self.opts, tables)
        result = eval_assertion(assertion, final.ctx, final.state, self.opts.tol)
        report = AssertionReportSerializer({
            'assertion': str(assertion),
            'holds': result.holds,
            'probabilities': list(result.probabilities),
        }).data
        return report, EXIT_OK if result.holds else EXIT_INVALID
