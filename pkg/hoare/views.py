from lang.tables import Tables
from linalg.generics import OperationAPIView
from semantics.denotational import evaluate
from semantics.options import EvalOptions

from .assertions import ProbAssertion, eval_assertion
from .outlines import build_outline, check_outline
from .serializers import (AssertionReportSerializer, AssertRequestSerializer, InlineOutlineSerializer,
                          OutlineVerdictSerializer, PredicateReportSerializer, TransformRequestSerializer,
                          TripleRequestSerializer, VerdictSerializer)
from .transformers import weakest
from .triples import HoareTriple, check_triple


def options(data) -> EvalOptions:
    return data.get('options') or EvalOptions.from_settings()


class WpAPIView(OperationAPIView):
    serializer_class = TransformRequestSerializer
    liberal = False

    def perform(self, data):
        typed = data['typed']
        result = weakest(typed.ctx, typed.command, data['post'], options(data), data['tables'], self.liberal)
        return PredicateReportSerializer(result).data


class WlpAPIView(WpAPIView):
    liberal = True


class CheckAPIView(OperationAPIView):
    serializer_class = TripleRequestSerializer

    def perform(self, data):
        typed = data['typed']
        triple = HoareTriple(typed.ctx, typed.command, data['pre'], data['post'], data['mode'], data['tables'])
        return VerdictSerializer(check_triple(triple, options(data))).data


class ProveAPIView(OperationAPIView):
    serializer_class = InlineOutlineSerializer

    def perform(self, data):
        tables = Tables.builtins()
        if data.get('gates'):
            tables = tables.extended(data['gates'])
        outline = build_outline(data, data['program'], data.get('matrices') or {}, tables)
        return OutlineVerdictSerializer(check_outline(outline)).data


class AssertAPIView(OperationAPIView):
    serializer_class = AssertRequestSerializer

    def perform(self, data):
        typed = data['typed']
        opts = options(data)
        assertion = ProbAssertion.parse(data['expr'])
        final = evaluate(typed.ctx, typed.command, data['rho'], opts, data['tables'])
        result = eval_assertion(assertion, final.ctx, final.state, opts.tol)
        return AssertionReportSerializer({
            'assertion': str(assertion),
            'holds': result.holds,
            'probabilities': list(result.probabilities),
        }).data
