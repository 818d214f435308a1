from rest_framework import serializers
from rest_framework.response import Response
from rest_framework.status import HTTP_200_OK
from rest_framework.views import APIView

from .exceptions import QuantumVerificationError


class OperationAPIView(APIView):
    """
    POST a JSON document, validate it with ``serializer_class`` and answer with ``perform``.

    Domain errors raised while performing become HTTP 400 like any malformed input.
    """
    serializer_class = None

    def get_serializer(self, *args, **kwargs):
        return self.serializer_class(*args, **kwargs)

    def perform(self, data):
        raise NotImplementedError

    def post(self, request, *args, **kwargs):
        serializer = self.get_serializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        try:
            report = self.perform(serializer.validated_data)
        except QuantumVerificationError as exc:
            raise serializers.ValidationError(str(exc))
        return Response(report, status=HTTP_200_OK)
