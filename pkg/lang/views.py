from rest_framework.response import Response
from rest_framework.status import HTTP_200_OK
from rest_framework.views import APIView

from linalg.generics import OperationAPIView

from .serializers import ProgramSerializer, TablesSerializer, TypedProgramSerializer
from .tables import Tables


class GatesAPIView(APIView):
    def get(self, request, *args, **kwargs):
        return Response(TablesSerializer(Tables.builtins()).data, status=HTTP_200_OK)


class TypecheckAPIView(OperationAPIView):
    serializer_class = ProgramSerializer

    def perform(self, data):
        return TypedProgramSerializer(data['typed']).data
