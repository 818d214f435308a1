from linalg.generics import OperationAPIView

from .options import EvalOptions
from .reports import run_program
from .serializers import RunReportSerializer, RunRequestSerializer


class RunAPIView(OperationAPIView):
    serializer_class = RunRequestSerializer

    def perform(self, data):
        opts = data.get('options') or EvalOptions.from_settings()
        report = run_program(data['typed'], data['rho'], opts, data['tables'], data['depth'])
        return RunReportSerializer(report).data
