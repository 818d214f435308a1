from rest_framework import serializers

from linalg.exceptions import QuantumVerificationError
from linalg.exchange import parse_library

from .ast import Dialect, infer_dialect
from .exceptions import LangError, TypeCheckError
from .parser import parse
from .printer import print_program
from .tables import Tables
from .typing import typecheck


class TypeIssueSerializer(serializers.Serializer):
    kind = serializers.CharField()
    message = serializers.CharField()
    line = serializers.IntegerField(allow_null=True)
    column = serializers.IntegerField(allow_null=True)


class ProgramSerializer(serializers.Serializer):
    """
    Program text plus an optional gate/measurement library.

    Validated data carries the typechecked program under ``typed`` and the
    tables it was checked against under ``tables``.
    """
    program = serializers.CharField(trim_whitespace=False)
    dialect = serializers.ChoiceField(choices=[d.value for d in Dialect], required=False)
    gates = serializers.JSONField(required=False)

    def validate_gates(self, value):
        try:
            return Tables.from_library(parse_library(value, "gates"))
        except QuantumVerificationError as exc:
            raise serializers.ValidationError(str(exc))

    def validate(self, attrs):
        tables = attrs.get('gates') or Tables.builtins()
        try:
            ctx, command = parse(attrs['program'])
        except LangError as exc:
            raise serializers.ValidationError({'program': str(exc)})
        dialect = attrs.get('dialect') or infer_dialect(ctx, command)
        try:
            typed = typecheck(ctx, command, dialect, tables)
        except TypeCheckError as exc:
            raise serializers.ValidationError({'program': TypeIssueSerializer(exc.issues, many=True).data})
        return {**attrs, 'typed': typed, 'tables': tables}


class TypedProgramSerializer(serializers.Serializer):
    def to_representation(self, instance):
        return {
            'dialect': instance.dialect.value,
            'context': [str(v) for v in instance.ctx],
            'output_context': [str(v) for v in instance.out_ctx],
            'dimension': instance.ctx.total_dim,
            'output_dimension': instance.out_ctx.total_dim,
            'program': print_program(instance.ctx, instance.command),
        }


class TablesSerializer(serializers.Serializer):
    def to_representation(self, instance):
        gates = {name: instance.gates.resolve(name, 2).shape[0] for name in instance.gates.names()}
        gates['I'] = None
        return {
            'gates': gates,
            'measurements': instance.measurements.names(),
        }

