import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from cgl_quantizer import load_fixture, quantize  # noqa: E402
from cgl_quantizer.cli_io import fixture_names  # noqa: E402

settings.register_profile("repo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

FIXTURES = fixture_names()
_CACHE = {}


def fixture_spec(name):
    return load_fixture(name).spec


def quantized(name):
    """Quantizations are pure functions of the spec, so one per fixture is shared."""
    if name not in _CACHE:
        _CACHE[name] = quantize(fixture_spec(name))
    return _CACHE[name]


@pytest.fixture(params=FIXTURES)
def fixture_name(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        ok, title = RESULTS[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {title}")
