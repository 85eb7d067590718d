import json
from io import StringIO

import pytest
from django.core.management import CommandError, call_command


class CommandRun:
    def __init__(self, exit_code, output, message=''):
        self.exit_code = exit_code
        self.output = output
        self.message = message

    @property
    def report(self):
        return json.loads(self.output)


@pytest.fixture
def run_command():
    """call_command wrapper returning the exit code instead of raising."""
    def run(name, *args):
        out = StringIO()
        try:
            call_command(name, *args, stdout=out, no_color=True)
        except CommandError as e:
            return CommandRun(e.returncode, out.getvalue(), str(e))
        return CommandRun(0, out.getvalue())
    return run


@pytest.fixture
def s3_path(tmp_path):
    path = tmp_path / 's3.grp'
    path.write_text(
        "group s3 {\n  gens: a, b;\n  rels:\n    sq: a^2 = 1,\n    cube: b^3 = 1,\n    ab2: (a b)^2 = 1;\n}\n",
        encoding='utf-8',
    )
    return path
