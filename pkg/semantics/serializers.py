from rest_framework import serializers

from lang.serializers import ProgramSerializer
from linalg.exceptions import QuantumVerificationError
from linalg.operators import DensityMatrix
from linalg.serializers import SCHEMA_VERSION, MatrixSerializer

from .options import EvalOptions, Mode
from .reports import DEFAULT_DEPTH


class OptionsSerializer(serializers.Serializer):
    """Per-request overrides of the ``QHL_*`` settings; validated data is an ``EvalOptions``."""
    loop_max_iters = serializers.IntegerField(min_value=1, required=False)
    loop_mass_eps = serializers.FloatField(required=False)
    mode = serializers.ChoiceField(choices=[m.value for m in Mode], required=False)
    fix_eps = serializers.FloatField(required=False)
    fix_max_iters = serializers.IntegerField(min_value=1, required=False)
    tol = serializers.FloatField(required=False)

    def validate(self, attrs):
        try:
            return EvalOptions.from_settings(**attrs)
        except QuantumVerificationError as exc:
            raise serializers.ValidationError(str(exc))


class StateField(MatrixSerializer):
    """A matrix document that must hold a partial density matrix."""

    def validate(self, attrs):
        matrix = super().validate(attrs)
        try:
            return DensityMatrix(matrix)
        except QuantumVerificationError as exc:
            raise serializers.ValidationError(str(exc))

    def to_representation(self, instance):
        return super().to_representation(instance.mat)


class RunRequestSerializer(ProgramSerializer):
    rho = StateField()
    options = OptionsSerializer(required=False)
    depth = serializers.IntegerField(min_value=0, required=False, default=DEFAULT_DEPTH)


class RunReportSerializer(serializers.Serializer):
    schema = serializers.SerializerMethodField()
    final_state = StateField()
    trace = serializers.FloatField()
    termination_probability = serializers.FloatField()
    truncation_error = serializers.FloatField()
    path_count = serializers.IntegerField()
    unexplored_mass = serializers.FloatField()
    deterministic = serializers.BooleanField()

    def get_schema(self, obj):
        return SCHEMA_VERSION
