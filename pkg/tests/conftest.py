import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", max_examples=200, deadline=None)
settings.register_profile("ci", max_examples=1000, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ordinals = st.integers(min_value=1, max_value=10)
paths = st.lists(ordinals, min_size=1, max_size=12).map(tuple)
paths0 = st.lists(ordinals, min_size=0, max_size=12).map(tuple)


def matmul(x, y):
    """Plain nested-list 2x2 product, kept separate from the library's Mat2."""
    return [
        [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
        [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
    ]


def explicit_product(path):
    """Key matrix as the literal product [[0,1],[1,0]] * prod [[1,1],[N,N+1]]."""
    m = [[0, 1], [1, 0]]
    for n in path:
        m = matmul(m, [[1, 1], [n, n + 1]])
    return m


# rows of the "some example keys" table: path, nv, dv, snv, sdv
KEY_TABLE = [
    ((2,), 2, 1, 3, 1),
    ((2, 1), 5, 2, 8, 3),
    ((2, 2), 8, 3, 11, 4),
    ((2, 3), 11, 4, 14, 5),
    ((2, 4), 14, 5, 17, 6),
    ((2, 4, 1), 31, 11, 48, 17),
    ((2, 4, 2), 48, 17, 65, 23),
    ((2, 4, 3), 65, 23, 82, 29),
]

# nodes and rational values of the eleven-node example tree, in display order
EXAMPLE_TREE = [
    ((1,), Fraction(1, 1)),
    ((2,), Fraction(2, 1)),
    ((2, 1), Fraction(5, 2)),
    ((2, 2), Fraction(8, 3)),
    ((2, 3), Fraction(11, 4)),
    ((2, 4), Fraction(14, 5)),
    ((2, 4, 1), Fraction(31, 11)),
    ((2, 4, 2), Fraction(48, 17)),
    ((2, 4, 3), Fraction(65, 23)),
    ((2, 5), Fraction(17, 6)),
    ((3,), Fraction(3, 1)),
]


@pytest.fixture
def example_counts():
    return {(): 3, (1,): 0, (2,): 5, (2, 1): 0, (2, 2): 0, (2, 3): 0, (2, 4): 3,
            (2, 4, 1): 0, (2, 4, 2): 0, (2, 4, 3): 0, (2, 5): 0, (3,): 0}


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(module.RESULTS):
            terminalreporter.write_line(line)
