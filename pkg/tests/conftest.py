import numpy as np
import pytest


class ScriptedRNG:
    """Stands in for numpy's Generator, replaying canned draws in call order."""

    def __init__(self, integers=(), random=(), uniform=(), fill=None):
        self._integers = list(integers)
        self._random = list(random)
        self._uniform = list(uniform)
        self.fill = fill

    def integers(self, low, high=None, size=None):
        out = np.asarray(self._integers.pop(0))
        hi = high if high is not None else low
        lo = low if high is not None else 0
        assert np.all((out >= lo) & (out < hi)), (out, lo, hi)
        return out if size is not None else int(out)

    def random(self, size=None):
        if self.fill is not None:
            return np.full(size, self.fill) if size is not None else self.fill
        out = np.asarray(self._random.pop(0), dtype=float)
        return out if size is not None else float(out)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._uniform.pop(0)


@pytest.fixture
def scripted_rng():
    return ScriptedRNG


def sphere(X):
    X = np.atleast_2d(X)
    return (X ** 2).sum(axis=1)


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE_LINES: dict = {}


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
