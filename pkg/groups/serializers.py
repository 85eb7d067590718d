# fpg-toolkit/groups/serializers.py
"""
Report schema

Read-only serializers over the service result objects. The serializer tree
is the report schema: field order is key order in the rendered JSON.
"""
from rest_framework import serializers

from .services.presentation import validate


class WordField(serializers.Field):
    """A Word rendered in .grp syntax ('1' for the empty word)."""

    def to_representation(self, value):
        return str(value)


class EnumValueField(serializers.Field):
    def to_representation(self, value):
        return getattr(value, 'value', value)


class AnnotationSerializer(serializers.Serializer):
    aux_description = serializers.CharField()
    base_words = serializers.ListField(child=WordField())


class PresentationSummarySerializer(serializers.Serializer):
    label = serializers.CharField()
    generators = serializers.ListField(child=serializers.CharField())
    relator_count = serializers.SerializerMethodField()
    annotation_count = serializers.SerializerMethodField()
    violations = serializers.SerializerMethodField()

    def get_relator_count(self, obj):
        return len(obj.relators)

    def get_annotation_count(self, obj):
        return len(obj.annotations)

    def get_violations(self, obj):
        return validate(obj)


class PresentationDetailSerializer(PresentationSummarySerializer):
    """Summary plus the relators themselves, keyed by label or index."""
    relators = serializers.SerializerMethodField()
    annotations = AnnotationSerializer(many=True)

    def get_relators(self, obj):
        return [
            {'ref': label or str(index), 'word': str(relator)}
            for index, (label, relator) in enumerate(obj.labelled_relators())
        ]


class AbelianGroupSerializer(serializers.Serializer):
    free_rank = serializers.IntegerField()
    torsion = serializers.ListField(child=serializers.IntegerField())
    explicit_part_only = serializers.BooleanField()
    description = serializers.SerializerMethodField()

    def get_description(self, obj):
        return str(obj)


class EnumerationSerializer(serializers.Serializer):
    outcome = serializers.SerializerMethodField()
    index = serializers.SerializerMethodField()
    cosets_used = serializers.IntegerField()
    strategy = serializers.CharField()
    max_cosets = serializers.SerializerMethodField()

    def get_outcome(self, obj):
        return 'completed' if obj.completed else 'overflow'

    def get_index(self, obj):
        return getattr(obj, 'index', None)

    def get_max_cosets(self, obj):
        return getattr(obj, 'max_cosets', None) or self.context.get('max_cosets')


class TrivialitySerializer(serializers.Serializer):
    verdict = EnumValueField()
    order = serializers.IntegerField(allow_null=True)
    justification = serializers.ListField(child=serializers.CharField())


class CheckReportSerializer(serializers.Serializer):
    script = serializers.CharField()
    verdict = EnumValueField()
    step_index = serializers.IntegerField(allow_null=True)
    reason = serializers.CharField(allow_blank=True)
    word_before = WordField(allow_null=True)
    trace = serializers.ListField(child=WordField())
    oracle = EnumValueField(allow_null=True)


class StageSerializer(serializers.Serializer):
    name = serializers.CharField()
    ok = serializers.BooleanField()
    presentation = PresentationSummarySerializer(allow_null=True)
    abelianization = AbelianGroupSerializer(allow_null=True)
    triviality = TrivialitySerializer(allow_null=True)
    golden_match = serializers.SerializerMethodField()
    golden_missing = serializers.SerializerMethodField()
    golden_extra = serializers.SerializerMethodField()
    notes = serializers.ListField(child=serializers.CharField())
    error = serializers.CharField(allow_blank=True)

    def get_golden_match(self, obj):
        return obj.golden['match'] if obj.golden else None

    def get_golden_missing(self, obj):
        return [str(w) for w in obj.golden['missing']] if obj.golden else []

    def get_golden_extra(self, obj):
        if not obj.golden:
            return []
        return [str(w) for w in obj.golden['extra'] + obj.golden.get('tolerated', [])]


class CharRowSerializer(serializers.Serializer):
    name = serializers.CharField()
    e = serializers.SerializerMethodField()
    sigma = serializers.SerializerMethodField()
    c1_sq = serializers.SerializerMethodField()
    chi_h = serializers.SerializerMethodField()
    expected = serializers.DictField()
    ok = serializers.BooleanField()
    notes = serializers.CharField(allow_blank=True)

    def get_e(self, obj):
        return obj.numbers.e

    def get_sigma(self, obj):
        return obj.numbers.sigma

    def get_c1_sq(self, obj):
        return obj.observed()['c1_sq']

    def get_chi_h(self, obj):
        return obj.observed()['chi_h']


class CharTableSerializer(serializers.Serializer):
    rows = CharRowSerializer(many=True)
    checks = serializers.SerializerMethodField()
    homeo_types = serializers.SerializerMethodField()
    ok = serializers.BooleanField()

    def get_checks(self, obj):
        return [{'check': description, 'ok': ok} for description, ok in obj.checks]

    def get_homeo_types(self, obj):
        return {
            name: {'m': found.m, 'n': found.n, 'description': str(found)}
            for name, found in sorted(obj.homeo_types.items())
        }


class PipelineReportSerializer(serializers.Serializer):
    stages = StageSerializer(many=True)
    scripts = CheckReportSerializer(many=True)
    charnum = CharTableSerializer(allow_null=True)
    failed_stages = serializers.SerializerMethodField()
    ok = serializers.BooleanField()

    def get_failed_stages(self, obj):
        return obj.failed_stages()


class RunReportSerializer(serializers.Serializer):
    tool = serializers.CharField()
    version = serializers.CharField()
    command = serializers.CharField()
    inputs = serializers.DictField()
    results = serializers.JSONField()
    exit_code = serializers.IntegerField()
    timing = serializers.DictField()
