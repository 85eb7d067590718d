"""
Shared plumbing for the fpg_* management commands.

Exit codes:
    0  success
    1  parse error (fpg_parse) or failed check
    2  invalid input (validation violations, bad options)
    3  I/O error
"""

from django.core.management.base import BaseCommand, CommandError

from backend.version import get_version
from groups.services.dsl import ParseError, load_presentation
from groups.services.presentation import validate
from groups.services.reports import Stopwatch, build_run_report, render_json, write_atomic

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE_ERROR = 1
EXIT_INVALID = 2
EXIT_IO = 3


class InputFailure(Exception):
    """Aborts a command with a report entry and an exit code."""

    def __init__(self, exit_code, message, results=None):
        super().__init__(message)
        self.exit_code = exit_code
        self.results = results or {'error': message}


class FpgCommand(BaseCommand):
    """Base for commands that emit a RunReport."""

    command_name = None

    def get_version(self):
        return get_version()

    def add_arguments(self, parser):
        parser.add_argument(
            '--format', choices=['text', 'json'], default='text',
            help='Report format on stdout or in --output (default: text)'
        )
        parser.add_argument(
            '--output', metavar='PATH',
            help='Write the report to PATH (atomically) instead of stdout'
        )

    def handle(self, *args, **options):
        self.options = options
        with Stopwatch() as clock:
            try:
                results, exit_code, lines = self.run(**options)
            except InputFailure as e:
                results, exit_code = e.results, e.exit_code
                lines = [self.style.ERROR(str(e))]
        self.emit(options, results, exit_code, lines, clock)

    def run(self, **options):
        """Return (results dict, exit code, text lines)."""
        raise NotImplementedError

    def inputs(self, options):
        return {}

    def emit(self, options, results, exit_code, lines, clock):
        report = build_run_report(
            command=self.command_name,
            inputs=self.inputs(options),
            results=results,
            exit_code=exit_code,
            timing=clock.as_dict(),
        )
        if options.get('format') == 'json':
            text = render_json(report)
        else:
            text = '\n'.join(lines) + '\n'

        output = options.get('output')
        if output:
            try:
                write_atomic(output, text)
            except OSError as e:
                raise CommandError(f'Cannot write report to {output}: {e}', returncode=EXIT_IO)
        else:
            self.stdout.write(text, ending='')

        if exit_code != EXIT_OK:
            raise CommandError(
                results.get('error') or f'{self.command_name} finished with exit code {exit_code}',
                returncode=exit_code,
            )

    def load(self, path, check=True):
        """
        Load a .grp file, mapping failures onto exit codes.

        Raises:
            InputFailure: 3 for I/O, 1 for parse errors, 2 for violations
        """
        try:
            p = load_presentation(path)
        except OSError as e:
            raise InputFailure(EXIT_IO, f'Cannot read {path}: {e}')
        except ParseError as e:
            raise InputFailure(EXIT_PARSE_ERROR, f'Parse error: {e}', {
                'error': f'Parse error: {e}',
                'span': {'line': e.span.line, 'column': e.span.column, 'length': e.span.length},
                'expected': e.expected,
            })
        if check:
            violations = validate(p)
            if violations:
                raise InputFailure(EXIT_INVALID, f'{path}: {len(violations)} violation(s)', {
                    'error': f'{path}: {len(violations)} violation(s)',
                    'violations': violations,
                })
        return p

    def verdict_line(self, ok, message):
        return self.style.SUCCESS(f'✓ {message}') if ok else self.style.ERROR(f'✗ {message}')
