from rest_framework import serializers

from linalg.serializers import SCHEMA_VERSION

from .deutsch_jozsa import BooleanOracle
from .exceptions import InvalidOracle


class OracleRequestSerializer(serializers.Serializer):
    k = serializers.IntegerField(min_value=1, required=False)
    f = serializers.CharField()
    dialect = serializers.ChoiceField(choices=['ying-core', 'qpl'], default='ying-core')

    def validate(self, attrs):
        try:
            oracle = BooleanOracle.parse(attrs['f'], attrs.get('k'))
        except InvalidOracle as exc:
            raise serializers.ValidationError({'f': str(exc)})
        return {**attrs, 'oracle': oracle}


class DJReportSerializer(serializers.Serializer):
    schema = serializers.SerializerMethodField()
    oracle = serializers.CharField()
    k = serializers.IntegerField()
    p00 = serializers.FloatField()
    classification = serializers.CharField(source='classification.value')
    expected = serializers.CharField(source='expected.value')
    correct = serializers.BooleanField()

    def get_schema(self, obj):
        return SCHEMA_VERSION
