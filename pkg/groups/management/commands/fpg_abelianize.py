"""
Abelianization (free rank and torsion) of a .grp presentation.

Usage:
    python manage.py fpg_abelianize groups/fixtures/mk_s1.grp
"""

from groups.management.commands._base import EXIT_OK, FpgCommand
from groups.serializers import AbelianGroupSerializer
from groups.services.abelian import abelianization


class Command(FpgCommand):
    help = 'Compute the abelianization of a .grp presentation via Smith normal form'
    command_name = 'abelianize'

    def add_arguments(self, parser):
        parser.add_argument('path', help='Path to a .grp file')
        super().add_arguments(parser)

    def inputs(self, options):
        return {'path': options['path']}

    def run(self, path, **options):
        p = self.load(path)
        group = abelianization(p)
        lines = [
            f'{p.label}: H1 = {group}',
            f'  free rank: {group.free_rank}',
            f"  torsion: {', '.join(str(d) for d in group.torsion) or 'none'}",
        ]
        if group.explicit_part_only:
            lines.append(self.style.WARNING('  explicit part only: annotations were ignored'))
        return {'label': p.label, 'abelianization': AbelianGroupSerializer(group).data}, EXIT_OK, lines
