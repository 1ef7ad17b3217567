import sys
from pathlib import Path

import hypothesis
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

from glyphstroke.bitmap import BinaryGlyph  # noqa: E402


@pytest.fixture
def full_black():
    def make(w, h=None):
        return BinaryGlyph(np.ones((h or w, w), dtype=bool), "black")
    return make


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_CRITERIA: list[str] = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    _CRITERIA.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
