from __future__ import annotations

import pytest

from mutopo import build
from mutopo.classes import clear_memo


def quiver(rows):
    return build(len(rows), 0, rows)


def weighted_pair(w):
    return quiver([[0, w], [-w, 0]])


@pytest.fixture(autouse=True)
def _fresh_memo():
    # keep per-test enumeration state independent of test order
    clear_memo()
    yield
    clear_memo()


@pytest.fixture
def pt():
    return quiver([[0]])


@pytest.fixture
def i2():
    return quiver([[0, 0], [0, 0]])


@pytest.fixture
def a2():
    return weighted_pair(1)


@pytest.fixture
def a3():
    return quiver([[0, 1, 0], [-1, 0, 1], [0, -1, 0]])


@pytest.fixture
def a4():
    return quiver(
        [[0, 1, 0, 0], [-1, 0, 1, 0], [0, -1, 0, 1], [0, 0, -1, 0]]
    )


@pytest.fixture
def markov():
    return quiver([[0, 2, -2], [-2, 0, 2], [2, -2, 0]])


@pytest.fixture
def w333():
    return quiver([[0, 3, -3], [-3, 0, 3], [3, -3, 0]])


@pytest.fixture
def cycle321():
    # 1 -> 3 with weight 3, 3 -> 2 with weight 2, 2 -> 1 with weight 1
    return quiver([[0, -1, 3], [1, 0, -2], [-3, 2, 0]])


def random_quiver(rng, size, max_entry):
    rows = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            v = rng.randint(-max_entry, max_entry)
            rows[i][j] = v
            rows[j][i] = -v
    return quiver(rows)


def random_skew(rng, n, m, max_ratio=3, max_weight=2):
    """Random valid skew-symmetrizable matrix: b[i][j] = s[i][j] * d[j] for a
    random skew-symmetric s and positive d."""
    size = n + m
    d = [rng.randint(1, max_ratio) for _ in range(size)]
    rows = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            s = rng.randint(-max_weight, max_weight)
            rows[i][j] = s * d[j]
            rows[j][i] = -s * d[i]
    return build(n, m, rows)
