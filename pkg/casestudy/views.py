from linalg.generics import OperationAPIView

from .deutsch_jozsa import dj_qpl_verify, dj_verify
from .serializers import DJReportSerializer, OracleRequestSerializer


class DeutschJozsaAPIView(OperationAPIView):
    serializer_class = OracleRequestSerializer

    def perform(self, data):
        verify = dj_qpl_verify if data['dialect'] == 'qpl' else dj_verify
        return DJReportSerializer(verify(data['oracle'])).data
