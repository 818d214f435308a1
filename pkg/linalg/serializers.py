import math

import numpy as np
from rest_framework import serializers

SCHEMA_VERSION = 1


class MatrixSerializer(serializers.Serializer):
    """
    Matrix exchange document: ``{"dim": [rows, cols], "re": [[...]], "im": [[...]]}``.

    ``im`` may be omitted for real matrices. Validated data is a ``complex128`` array.
    """
    dim = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=2, max_length=2)
    re = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
    im = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()), required=False)

    def validate(self, attrs):
        rows, cols = attrs['dim']
        parts = [attrs['re']] + ([attrs['im']] if 'im' in attrs else [])
        for part in parts:
            if len(part) != rows or any(len(row) != cols for row in part):
                raise serializers.ValidationError(f"entries do not match dim [{rows}, {cols}]")
            if not all(math.isfinite(x) for row in part for x in row):
                raise serializers.ValidationError("entries must be finite (no NaN or Inf)")
        matrix = np.array(attrs['re'], dtype=np.complex128).reshape(rows, cols)
        if 'im' in attrs:
            matrix = matrix + 1j * np.array(attrs['im'], dtype=np.float64).reshape(rows, cols)
        return matrix

    def to_representation(self, instance):
        matrix = np.asarray(instance, dtype=np.complex128)
        data = {
            'dim': list(matrix.shape),
            're': [[float(x) for x in row] for row in matrix.real],
        }
        if np.any(matrix.imag != 0):
            data['im'] = [[float(x) for x in row] for row in matrix.imag]
        return data


class MatrixLibrarySerializer(serializers.Serializer):
    """Named matrices and named measurements kept in one document."""
    schema = serializers.IntegerField(required=False, default=SCHEMA_VERSION)
    matrices = serializers.DictField(child=MatrixSerializer(), required=False, default=dict)
    measurements = serializers.DictField(child=serializers.ListField(child=MatrixSerializer(), min_length=1),
                                         required=False, default=dict)

    def validate_schema(self, value):
        if value != SCHEMA_VERSION:
            raise serializers.ValidationError(f"unsupported schema version {value}")
        return value

    def to_representation(self, instance):
        return {
            'schema': SCHEMA_VERSION,
            'matrices': {name: MatrixSerializer(m).data for name, m in instance.get('matrices', {}).items()},
            'measurements': {name: [MatrixSerializer(m).data for m in ops]
                             for name, ops in instance.get('measurements', {}).items()},
        }
