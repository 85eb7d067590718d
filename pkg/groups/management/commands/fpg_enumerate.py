"""
Todd-Coxeter enumeration of the cosets of a subgroup.

Overflow is not a process error: the report says "inconclusive" and the
command exits 0.

Usage:
    python manage.py fpg_enumerate groups/fixtures/pi1_X_golden.grp
    python manage.py fpg_enumerate dihedral.grp --subgroup "a" --strategy felsch
    python manage.py fpg_enumerate my.grp --max-cosets 5000 --dump-table table.tsv
"""

from groups.management.commands._base import (
    EXIT_INVALID,
    EXIT_IO,
    EXIT_OK,
    FpgCommand,
    InputFailure,
)
from groups.serializers import EnumerationSerializer
from groups.services.coset_enumeration import (
    STRATEGIES,
    EnumerationConfig,
    EnumerationError,
    enumerate_cosets,
)
from groups.services.dsl import ParseError, parse_word
from groups.services.presentation import explicit_part
from groups.services.reports import write_atomic


class Command(FpgCommand):
    help = 'Enumerate cosets of a subgroup (trivial subgroup by default) of a .grp presentation'
    command_name = 'enumerate'

    def add_arguments(self, parser):
        parser.add_argument('path', help='Path to a .grp file')
        parser.add_argument(
            '--subgroup', action='append', default=[], metavar='WORD',
            help='Subgroup generator word, e.g. "a b^-1" (repeatable)'
        )
        parser.add_argument(
            '--strategy', choices=STRATEGIES,
            help='Enumeration strategy (default: settings.FPG["STRATEGY"])'
        )
        parser.add_argument(
            '--max-cosets', type=int,
            help='Coset limit before reporting overflow (default: settings.FPG["MAX_COSETS"])'
        )
        parser.add_argument(
            '--no-lookahead', action='store_true',
            help='Disable the HLT lookahead pass'
        )
        parser.add_argument(
            '--dump-table', metavar='PATH',
            help='Write the completed coset table as tab-separated text'
        )
        super().add_arguments(parser)

    def inputs(self, options):
        return {
            'path': options['path'],
            'subgroup': options.get('subgroup') or [],
            'strategy': options.get('strategy'),
            'max_cosets': options.get('max_cosets'),
            'lookahead': not options.get('no_lookahead'),
        }

    def run(self, path, subgroup=(), strategy=None, max_cosets=None, no_lookahead=False,
            dump_table=None, **options):
        p = self.load(path)
        try:
            config = EnumerationConfig.from_settings(
                strategy=strategy,
                max_cosets=max_cosets,
                lookahead=False if no_lookahead else None,
            )
            words = [parse_word(text) for text in subgroup or ()]
            result = enumerate_cosets(explicit_part(p), words, config)
        except ParseError as e:
            raise InputFailure(EXIT_INVALID, f'Invalid subgroup word: {e}')
        except EnumerationError as e:
            raise InputFailure(EXIT_INVALID, str(e))

        data = EnumerationSerializer(result, context={'max_cosets': config.max_cosets}).data
        if result.completed:
            verdict = 'completed'
            lines = [self.style.SUCCESS(
                f'✓ {p.label}: index {result.index} ({result.strategy}, {result.cosets_used} cosets defined)'
            )]
            if dump_table:
                try:
                    write_atomic(dump_table, result.table.dump())
                except OSError as e:
                    raise InputFailure(EXIT_IO, f'Cannot write coset table to {dump_table}: {e}')
                lines.append(f'  coset table written to {dump_table}')
        else:
            verdict = 'inconclusive'
            lines = [self.style.WARNING(
                f'? {p.label}: inconclusive, coset limit {config.max_cosets} reached '
                f'({result.cosets_used} cosets defined)'
            )]
        if p.annotations:
            lines.append(self.style.WARNING('  explicit part only: annotations were ignored'))
        return {'label': p.label, 'verdict': verdict, 'enumeration': data}, EXIT_OK, lines
