import random

import pytest
from hypothesis import settings

from vbraid import MorsePresentation, fixture_names, fixture_path

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return random.Random(12345)


def load_diagram(name: str) -> MorsePresentation:
    return MorsePresentation.loads(fixture_path(name).read_text())


def diagram_fixtures() -> list[str]:
    return [n for n in fixture_names(".json") if n not in ("golden_braiding.json", "exchange_instances.json")]


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(test_acceptance.RESULTS):
        ok, detail = test_acceptance.RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
