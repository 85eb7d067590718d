"""
Check a .drv derivation script against a presentation.

Identities used by the script can be supplied with --env DIR: every .drv
file there written for the same presentation is checked first, in
dependency order, and the verified ones become available.

Usage:
    python manage.py fpg_check_derivation groups/fixtures/derivations/dbd.drv \\
        groups/fixtures/pi1_X_golden.grp --env groups/fixtures/derivations
    python manage.py fpg_check_derivation my.drv my.grp --oracle --format json
"""

from groups.management.commands._base import (
    EXIT_CHECK_FAILED,
    EXIT_INVALID,
    EXIT_IO,
    EXIT_OK,
    EXIT_PARSE_ERROR,
    FpgCommand,
    InputFailure,
)
from groups.serializers import CheckReportSerializer
from groups.services.coset_enumeration import Decision, EnumerationConfig, EnumerationError
from groups.services.derivation import (
    DerivationEnvironment,
    DerivationError,
    check_script,
    check_scripts,
    oracle_check,
)
from groups.services.dsl import ParseError, load_script, load_scripts


class Command(FpgCommand):
    help = 'Check a derivation script step by step against a .grp presentation'
    command_name = 'check_derivation'

    def add_arguments(self, parser):
        parser.add_argument('script_path', help='Path to a .drv script')
        parser.add_argument('presentation_path', help='Path to the .grp presentation it is written for')
        parser.add_argument(
            '--env', metavar='DIR',
            help='Directory of .drv scripts providing identities used by this one'
        )
        parser.add_argument(
            '--oracle', action='store_true',
            help='Also decide start = end by coset enumeration'
        )
        parser.add_argument('--max-cosets', type=int, help='Coset limit for the oracle')
        super().add_arguments(parser)

    def inputs(self, options):
        return {
            'script': options['script_path'],
            'presentation': options['presentation_path'],
            'env': options.get('env'),
            'oracle': bool(options.get('oracle')),
        }

    def _load_script(self, path):
        try:
            return load_script(path)
        except OSError as e:
            raise InputFailure(EXIT_IO, f'Cannot read {path}: {e}')
        except ParseError as e:
            raise InputFailure(EXIT_PARSE_ERROR, f'Parse error: {e}')

    def _environment(self, directory, script, p):
        try:
            scripts = [
                s for s in load_scripts(directory)
                if s.presentation_label == p.label and s.name != script.name
            ]
        except OSError as e:
            raise InputFailure(EXIT_IO, f'Cannot read scripts in {directory}: {e}')
        except ParseError as e:
            raise InputFailure(EXIT_PARSE_ERROR, f'Parse error in environment: {e}')
        try:
            reports, env = check_scripts(scripts, p)
        except DerivationError as e:
            raise InputFailure(EXIT_INVALID, f'Invalid environment: {e}')
        return reports, env

    def run(self, script_path, presentation_path, env=None, oracle=False, max_cosets=None, **options):
        script = self._load_script(script_path)
        p = self.load(presentation_path)

        env_reports, environment = [], DerivationEnvironment()
        if env:
            env_reports, environment = self._environment(env, script, p)

        report = check_script(script, p, environment)
        if oracle:
            try:
                config = EnumerationConfig.from_settings(max_cosets=max_cosets)
            except EnumerationError as e:
                raise InputFailure(EXIT_INVALID, str(e))
            report = report.with_oracle(oracle_check(script, p, config))

        lines = []
        if env_reports:
            verified = sum(1 for r in env_reports if r.verified)
            lines.append(f'environment: {verified} of {len(env_reports)} identities verified')
        if report.verified:
            lines.append(self.style.SUCCESS(
                f'✓ {script.name}: verified in {len(script.steps)} steps ({script.start} = {script.end})'
            ))
        else:
            where = 'before the first step' if report.step_index is None else f'at step {report.step_index}'
            lines.append(self.style.ERROR(f'✗ {script.name}: failed {where}: {report.reason}'))
            if report.word_before is not None:
                lines.append(f'  word before: {report.word_before}')
        if report.oracle is not None:
            lines.append(f'  oracle: {report.oracle.value}')

        failed = not report.verified or report.oracle == Decision.FALSE
        results = {
            'report': CheckReportSerializer(report).data,
            'environment': CheckReportSerializer(env_reports, many=True).data,
        }
        if failed:
            results['error'] = (f'{script.name}: failed at step {report.step_index}' if not report.verified
                                else f'{script.name}: oracle refutes {script.start} = {script.end}')
        return results, EXIT_CHECK_FAILED if failed else EXIT_OK, lines
