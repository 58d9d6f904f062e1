import math

from django.conf import settings
from rest_framework import serializers

from edge.asymptotics import RESIDUAL_NODES, SOURCE_CHOICES, SOURCE_PAINLEVE
from edge.fredholm import MIN_NODES
from laguerre.ensemble import ROUTE_AUTO, ROUTE_CHOICES
from laguerre.products import MAX_N
from numerics.specfun import PRECISION_CHOICES, PRECISION_DD, PRECISION_NATIVE

from .sweeps import parse_grid

FORMAT_CSV = 'csv'
FORMAT_JSON = 'json'
FORMAT_CHOICES = [
    (FORMAT_CSV, 'CSV with a header row'),
    (FORMAT_JSON, 'JSON document'),
]

ACTION_GAP = 'gap'
ACTION_DDLOG = 'ddlog'
ACTION_EDGE = 'edge'
ACTION_EXACT = 'exact'
ACTION_CHOICES = [
    (ACTION_GAP, 'ln D_n(alpha)'),
    (ACTION_DDLOG, 'd/dalpha ln D_n(alpha) by every route'),
    (ACTION_EDGE, 'edge-scaled D_n against det(I - K_s)'),
    (ACTION_EXACT, 'exact products ln A_n and ln C_n'),
]

SUITE_QUICK = 'quick'
SUITE_FULL = 'full'
SUITE_CHOICES = [
    (SUITE_QUICK, 'first four criteria on reduced grids'),
    (SUITE_FULL, 'all eight criteria at full size'),
]

# not echoed: they change where and how fast output is produced, never its content
RUNTIME_FIELDS = ('threads', 'output')


class FiniteFloatField(serializers.FloatField):
    default_error_messages = {
        'non_finite': 'A finite number is required.',
    }

    def to_internal_value(self, data):
        value = super().to_internal_value(data)
        if not math.isfinite(value):
            self.fail('non_finite')
        return value


class GridField(serializers.CharField):
    """'lo:hi:step' in, Grid out; echoed back as the text it was given."""

    def to_internal_value(self, data):
        text = super().to_internal_value(data)
        try:
            return parse_grid(text)
        except ValueError as e:
            raise serializers.ValidationError(str(e))

    def to_representation(self, value):
        return value.text


class RunConfigSerializer(serializers.Serializer):
    default_format = FORMAT_JSON

    format = serializers.ChoiceField(choices=FORMAT_CHOICES, required=False)
    output = serializers.CharField(required=False, allow_blank=False)
    threads = serializers.IntegerField(required=False, min_value=1)

    def validate(self, attrs):
        attrs.setdefault('format', self.default_format)
        attrs.setdefault('threads', settings.TRACY['THREADS'])
        return attrs

    def echo(self):
        """Effective configuration as emitted under the 'config' key."""
        return {key: value for key, value in self.data.items() if key not in RUNTIME_FIELDS}


class ConstantsConfigSerializer(RunConfigSerializer):
    pass


class TWConfigSerializer(RunConfigSerializer):
    default_format = FORMAT_CSV

    x_grid = GridField()


class GapConfigSerializer(RunConfigSerializer):
    s = FiniteFloatField()
    nodes = serializers.IntegerField(required=False, min_value=MIN_NODES)
    precision = serializers.ChoiceField(choices=PRECISION_CHOICES, required=False, default=PRECISION_NATIVE)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        attrs.setdefault('nodes', settings.TRACY['FREDHOLM_NODES'])
        return attrs


class ResidualConfigSerializer(RunConfigSerializer):
    default_format = FORMAT_CSV

    source = serializers.ChoiceField(choices=SOURCE_CHOICES, required=False, default=SOURCE_PAINLEVE)
    s_grid = GridField()
    nodes = serializers.IntegerField(required=False, min_value=MIN_NODES, default=RESIDUAL_NODES)
    precision = serializers.ChoiceField(choices=PRECISION_CHOICES, required=False, default=PRECISION_DD)

    def validate_s_grid(self, value):
        if value.points[0] <= 0.0:
            raise serializers.ValidationError("The large-gap expansion needs s > 0")
        return value


class LaguerreConfigSerializer(RunConfigSerializer):
    action = serializers.ChoiceField(choices=ACTION_CHOICES, required=False, default=ACTION_GAP)
    n = serializers.IntegerField(min_value=1, max_value=MAX_N)
    alpha = FiniteFloatField(required=False)
    alpha_grid = GridField(required=False)
    s = FiniteFloatField(required=False)
    route = serializers.ChoiceField(choices=ROUTE_CHOICES, required=False, default=ROUTE_AUTO)
    nodes = serializers.IntegerField(required=False, min_value=MIN_NODES)
    centered = serializers.BooleanField(required=False, default=False)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        action = attrs['action']
        if action in (ACTION_GAP, ACTION_DDLOG):
            if ('alpha' in attrs) == ('alpha_grid' in attrs):
                raise serializers.ValidationError({"alpha": f"'{action}' takes exactly one of alpha, alpha_grid"})
            alphas = attrs['alpha_grid'].points if 'alpha_grid' in attrs else [attrs['alpha']]
            if alphas[0] <= 0.0:
                raise serializers.ValidationError({"alpha": "alpha must be positive"})
        elif action == ACTION_EDGE:
            if 's' not in attrs:
                raise serializers.ValidationError({"s": "'edge' requires s"})
        return attrs


class VerifyConfigSerializer(RunConfigSerializer):
    format = serializers.ChoiceField(choices=[(FORMAT_JSON, 'JSON document')], required=False)
    suite = serializers.ChoiceField(choices=SUITE_CHOICES, required=False, default=SUITE_QUICK)
    chi_offset = FiniteFloatField(required=False, default=0.0)
