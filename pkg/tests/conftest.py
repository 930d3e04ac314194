import numpy as np
import pytest

ACCEPTANCE_LINES = []


class ScriptedStream:
    """Random stream replaying scripted values.

    ``random()`` pops from ``uniforms`` and ``integers(n)`` from ``ints``;
    anything else is delegated to a seeded numpy Generator so unscripted
    draws still work.
    """

    def __init__(self, uniforms=(), ints=(), seed=0):
        self.uniforms = list(uniforms)
        self.ints = list(ints)
        self._rng = np.random.default_rng(seed)

    def random(self, size=None):
        if size is None and self.uniforms:
            return self.uniforms.pop(0)
        return self._rng.random(size)

    def integers(self, low, high=None, size=None):
        if size is None and self.ints:
            value = self.ints.pop(0)
            n = low if high is None else high - low
            assert 0 <= value < n, f"scripted integer {value} out of range {n}"
            return value
        return self._rng.integers(low, high, size)

    def standard_normal(self, size=None):
        return self._rng.standard_normal(size)


@pytest.fixture
def scripted():
    return ScriptedStream


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
