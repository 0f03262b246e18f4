"""Shared fixtures: the three standing test spaces and integer-metric helpers."""

import sys

import numpy as np
import pytest

from spiralpaste import PointedMetricSpace, grid_space, line_space, tree_space


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Replay acceptance verdict lines after the run, past output capture."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None) if mod else None
    if lines:
        terminalreporter.section("acceptance verdicts")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def line():
    return line_space()


@pytest.fixture(scope="session")
def grid():
    return grid_space()


@pytest.fixture(scope="session")
def tree():
    return tree_space()


@pytest.fixture(scope="session")
def test_spaces(line, grid, tree):
    return {"line": line, "grid": grid, "tree": tree}


def random_integer_space(rng: np.random.Generator, n_max: int = 40) -> PointedMetricSpace:
    """Random distinct integer points under the sup metric; distances are exact ints."""
    n = int(rng.integers(3, n_max + 1))
    dim = int(rng.integers(1, 4))
    seen = set()
    pts = []
    while len(pts) < n:
        cand = tuple(int(v) for v in rng.integers(-50, 51, size=dim))
        if cand not in seen:
            seen.add(cand)
            pts.append(cand)
    arr = np.array(pts, dtype=float)
    dmat = np.abs(arr[:, None, :] - arr[None, :, :]).max(axis=2)
    ids = tuple(f"q{i:03d}" for i in range(n))
    return PointedMetricSpace(ids=ids, basepoint=ids[0], kind="matrix", matrix=dmat)
