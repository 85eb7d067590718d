"""
Parse and validate a .grp presentation file.

Usage:
    python manage.py fpg_parse groups/fixtures/trefoil.grp
    python manage.py fpg_parse my.grp --format json --output report.json
"""

from groups.management.commands._base import EXIT_OK, FpgCommand
from groups.serializers import PresentationDetailSerializer


class Command(FpgCommand):
    help = 'Parse and validate a .grp presentation file'
    command_name = 'parse'

    def add_arguments(self, parser):
        parser.add_argument('path', help='Path to a .grp file')
        super().add_arguments(parser)

    def inputs(self, options):
        return {'path': options['path']}

    def run(self, path, **options):
        p = self.load(path)
        summary = PresentationDetailSerializer(p).data
        lines = [
            self.style.SUCCESS(f'✓ {p.label}: {p.rank} generators, {len(p.relators)} relators, '
                               f'{len(p.annotations)} annotations'),
        ]
        for relator in summary['relators']:
            lines.append(f"  {relator['ref']}: {relator['word']}")
        for annotation in p.annotations:
            words = ', '.join(str(word) for word in annotation.base_words)
            lines.append(f'  annotation "{annotation.aux_description}" over {words}')
        return {'presentation': summary}, EXIT_OK, lines
