"""
RunReport assembly and output

Every management command ends by building one RunReport (tool, version,
command, inputs, results, timing) and writing it to stdout or, with
--output, atomically to a file.
"""

import logging
import os
import tempfile
import time
from pathlib import Path

from rest_framework.renderers import JSONRenderer

from backend.version import TOOL_NAME, get_version
from groups.serializers import RunReportSerializer

logger = logging.getLogger(__name__)

TIMING_KEYS = ('timing',)


class Stopwatch:
    """``with Stopwatch() as clock: ...`` then ``clock.as_dict()``."""

    def __init__(self):
        self.started = None
        self.elapsed = 0.0

    def __enter__(self):
        self.started = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.started
        return False

    def as_dict(self):
        return {'seconds': round(self.elapsed, 6)}


def build_run_report(command, inputs, results, exit_code=0, timing=None) -> dict:
    report = {
        'tool': TOOL_NAME,
        'version': get_version(),
        'command': command,
        'inputs': {key: _plain(value) for key, value in inputs.items()},
        'results': results,
        'exit_code': exit_code,
        'timing': timing or {},
    }
    return RunReportSerializer(report).data


def _plain(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def render_json(data) -> str:
    return JSONRenderer().render(data, renderer_context={'indent': 2}).decode('utf-8') + '\n'


def strip_timing(data):
    """Copy of a rendered report without the non-deterministic fields."""
    return {key: value for key, value in data.items() if key not in TIMING_KEYS}


def write_atomic(path, text: str):
    """
    Write text to path through a temp file in the same directory.

    Raises:
        OSError: If the directory is missing or not writable
    """
    path = Path(path)
    directory = path.parent if str(path.parent) else Path('.')
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix='.tmp', dir=directory)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    logger.debug(f"wrote {len(text)} characters to {path}")
