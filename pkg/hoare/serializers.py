from rest_framework import serializers

from lang.serializers import ProgramSerializer
from linalg.exceptions import QuantumVerificationError
from linalg.operators import QuantumPredicate
from linalg.serializers import SCHEMA_VERSION, MatrixLibrarySerializer, MatrixSerializer
from semantics.serializers import OptionsSerializer, StateField

RULES = ['Skip', 'AsgnB', 'AsgnN', 'Unit', 'Seq', 'Measure', 'While', 'Cons']


class PredicateField(MatrixSerializer):
    """A matrix document that must hold a quantum predicate ``0 ⊑ P ⊑ I``."""

    def validate(self, attrs):
        matrix = super().validate(attrs)
        try:
            return QuantumPredicate(matrix)
        except QuantumVerificationError as exc:
            raise serializers.ValidationError(str(exc))

    def to_representation(self, instance):
        return super().to_representation(instance.mat)


class TransformRequestSerializer(ProgramSerializer):
    post = PredicateField()
    options = OptionsSerializer(required=False)


class TripleRequestSerializer(TransformRequestSerializer):
    pre = PredicateField()
    mode = serializers.ChoiceField(choices=['total', 'partial', 'tot', 'par'], default='total')


class AssertRequestSerializer(ProgramSerializer):
    rho = StateField()
    expr = serializers.CharField()
    options = OptionsSerializer(required=False)


class PredicateReportSerializer(serializers.Serializer):
    schema = serializers.SerializerMethodField()
    predicate = PredicateField()
    clamp = serializers.FloatField()

    def get_schema(self, obj):
        return SCHEMA_VERSION


class VerdictSerializer(serializers.Serializer):
    schema = serializers.SerializerMethodField()
    verdict = serializers.CharField(source='outcome.value')
    mode = serializers.CharField(source='mode.value')
    residual = serializers.FloatField()
    min_eigenvalue = serializers.FloatField(allow_null=True)
    clamp = serializers.FloatField()
    witness = serializers.SerializerMethodField()

    def get_schema(self, obj):
        return SCHEMA_VERSION

    def get_witness(self, obj):
        if obj.witness is None:
            return None
        return MatrixSerializer(obj.witness.mat).data


class OutlineStepSerializer(serializers.Serializer):
    id = serializers.CharField()
    rule = serializers.ChoiceField(choices=RULES)
    command = serializers.CharField(required=False, allow_null=True, trim_whitespace=False)
    pre = serializers.CharField(required=False, allow_null=True)
    post = serializers.CharField(required=False, allow_null=True)
    premises = serializers.ListField(child=serializers.CharField(), required=False, default=list)
    invariant = serializers.CharField(required=False, allow_null=True)


class OutlineDocumentSerializer(serializers.Serializer):
    """Outline file: program, gate and matrix library are paths next to the document."""
    schema = serializers.IntegerField(required=False, default=SCHEMA_VERSION)
    program = serializers.CharField()
    gates = serializers.CharField(required=False, allow_null=True)
    matrices = serializers.CharField(required=False, allow_null=True)
    pre = serializers.CharField()
    post = serializers.CharField()
    steps = OutlineStepSerializer(many=True, required=False, default=list)

    def validate_schema(self, value):
        if value != SCHEMA_VERSION:
            raise serializers.ValidationError(f"unsupported schema version {value}")
        return value


class InlineOutlineSerializer(OutlineDocumentSerializer):
    """Outline sent over HTTP: program text and inline gate and matrix libraries."""
    program = serializers.CharField(trim_whitespace=False)
    gates = MatrixLibrarySerializer(required=False)
    matrices = MatrixLibrarySerializer(required=False)


class StepVerdictSerializer(serializers.Serializer):
    id = serializers.CharField()
    rule = serializers.CharField(source='rule.value')
    valid = serializers.BooleanField()
    message = serializers.CharField()


class OutlineVerdictSerializer(serializers.Serializer):
    schema = serializers.SerializerMethodField()
    verdict = serializers.SerializerMethodField()
    message = serializers.CharField()
    steps = StepVerdictSerializer(many=True)

    def get_schema(self, obj):
        return SCHEMA_VERSION

    def get_verdict(self, obj):
        return 'valid' if obj.valid else 'invalid'


class AssertionReportSerializer(serializers.Serializer):
    schema = serializers.SerializerMethodField()
    assertion = serializers.CharField()
    holds = serializers.BooleanField()
    probabilities = serializers.ListField(child=serializers.FloatField())

    def get_schema(self, obj):
        return SCHEMA_VERSION
