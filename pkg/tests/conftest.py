import numpy as np
import pytest

from covplan.geometry import Grid, GridSpec, Roi, discretize


def rect_roi(w, h, x0=0.0, y0=0.0):
    return Roi([(x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h)])


def full_grid(cols, rows, side_w=1.0):
    """Grid of cols x rows cells anchored at the origin."""
    spec = GridSpec((0.0, 0.0), 0.0, (0.0, 0.0), 2 * side_w, 1.0)
    return Grid(spec, [(c, r) for r in range(rows) for c in range(cols)])


def random_region(rng, max_cells, span=8):
    """Random 4-connected cell set grown from the origin."""
    m = int(rng.integers(1, max_cells + 1))
    cells = {(0, 0)}
    while len(cells) < m:
        c, r = list(cells)[rng.integers(len(cells))]
        dc, dr = [(1, 0), (-1, 0), (0, 1), (0, -1)][rng.integers(4)]
        nb = (c + dc, r + dr)
        if abs(nb[0]) <= span and abs(nb[1]) <= span:
            cells.add(nb)
    return sorted(cells)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def square_grid():
    roi = rect_roi(120, 120)
    return discretize(roi, GridSpec.identity(roi, 10))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
