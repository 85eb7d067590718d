"""
Run the construction pipeline for pi1(X) and pi1(U).

Exit code 0 only if every requested stage passes.

Usage:
    python manage.py fpg_reproduce
    python manage.py fpg_reproduce --stage charnum
    python manage.py fpg_reproduce --stage X --strategy felsch --format json --output x.json
"""

from groups.management.commands._base import (
    EXIT_CHECK_FAILED,
    EXIT_INVALID,
    EXIT_OK,
    FpgCommand,
    InputFailure,
)
from groups.serializers import PipelineReportSerializer
from groups.services.coset_enumeration import STRATEGIES, EnumerationConfig, EnumerationError
from groups.services.pipeline import STAGE_GROUPS, fixtures_dir, run_reproduction_pipeline


class Command(FpgCommand):
    help = 'Rebuild pi1(X), pi1(U), the derivations and the characteristic numbers, and check them'
    command_name = 'reproduce'

    def add_arguments(self, parser):
        parser.add_argument(
            '--stage', choices=sorted(STAGE_GROUPS), default='all',
            help='Stage group to run (default: all)'
        )
        parser.add_argument('--strategy', choices=STRATEGIES, help='Enumeration strategy')
        parser.add_argument('--max-cosets', type=int, help='Coset limit for triviality checks')
        parser.add_argument(
            '--fixtures', metavar='DIR',
            help='Fixture directory (default: settings.FPG["FIXTURES_DIR"], env FPG_FIXTURES)'
        )
        super().add_arguments(parser)

    def inputs(self, options):
        return {
            'stage': options.get('stage'),
            'strategy': options.get('strategy'),
            'max_cosets': options.get('max_cosets'),
            'fixtures': str(options.get('fixtures') or fixtures_dir()),
        }

    def run(self, stage='all', strategy=None, max_cosets=None, fixtures=None, **options):
        try:
            config = EnumerationConfig.from_settings(strategy=strategy, max_cosets=max_cosets)
        except EnumerationError as e:
            raise InputFailure(EXIT_INVALID, str(e))

        report = run_reproduction_pipeline(stage, config=config, fixtures_directory=fixtures)

        lines = []
        for result in report.stages:
            detail = []
            if result.triviality is not None:
                detail.append(result.triviality.verdict.value)
            if result.golden is not None:
                detail.append('golden match' if result.golden['match'] else 'golden MISMATCH')
            suffix = f" ({', '.join(detail)})" if detail else ''
            lines.append(self.verdict_line(result.ok, f'{result.name}{suffix}'))
            if result.error:
                lines.append(f'    {result.error}')
            if result.golden and not result.golden['match']:
                for word in result.golden['missing']:
                    lines.append(f'    missing: {word}')
                for word in result.golden['extra']:
                    lines.append(f'    extra: {word}')
            for note in result.notes:
                lines.append(f'    {note}')
        for script in report.scripts:
            oracle = f', oracle {script.oracle.value}' if script.oracle is not None else ''
            lines.append(f'  {script.script}: {script.verdict.value}{oracle}')
        if report.charnum is not None:
            for row in report.charnum.rows:
                observed = row.observed()
                lines.append(
                    f"  {row.name}: e={observed['e']} sigma={observed['sigma']} "
                    f"c1^2={observed['c1_sq']} chi_h={observed['chi_h']}"
                )
            for name, found in sorted(report.charnum.homeo_types.items()):
                lines.append(f'  {name} is homeomorphic to {found}')

        results = {'pipeline': PipelineReportSerializer(report).data}
        if report.ok:
            lines.append(self.style.SUCCESS(f'All {len(report.stages)} stages passed'))
            return results, EXIT_OK, lines
        failed = ', '.join(report.failed_stages())
        results['error'] = f'Failed stages: {failed}'
        lines.append(self.style.ERROR(f'Failed stages: {failed}'))
        return results, EXIT_CHECK_FAILED, lines
