import os
import subprocess
import sys

import numpy as np
import pytest

from distortion_lab import _kernels
from distortion_lab.core import random_ordinal

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not importable")


def _outcome_matching(n, rng):
    return np.array(rng.permutation(n), dtype=np.int64)


@pytest.mark.parametrize("n,m", [(1, 1), (2, 3), (3, 3), (4, 4), (5, 3)])
def test_voting_backends_agree(n, m, rng):
    for _ in range(5):
        o = random_ordinal(n, m, rng)
        table, _ = _kernels.vertex_table(o.positions())
        for outcome in range(m):
            for lo, hi in [(0, m), (0, 1), (m - 1, m)]:
                a = _kernels.voting_vertex_max_numba(table, outcome, lo, hi)
                b = _kernels.voting_vertex_max_numpy(table, outcome, lo, hi)
                assert (a[0], a[1], tuple(a[2])) == (b[0], b[1], tuple(b[2]))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_matching_backends_agree(n, rng):
    for _ in range(5):
        o = random_ordinal(n, n, rng)
        table, _ = _kernels.vertex_table(o.positions())
        item_of = _outcome_matching(n, rng)
        a = _kernels.matching_vertex_max_numba(table, item_of, 0, n)
        b = _kernels.matching_vertex_max_numpy(table, item_of, 0, n)
        assert (a[0], a[1], tuple(a[2])) == (b[0], b[1], tuple(b[2]))


def test_assignment_values_backends_agree(rng):
    for n in range(1, 7):
        w = rng.integers(0, 50, size=(20, n, n)).astype(np.int64)
        a = _kernels.assignment_values_numba(w)
        b = _kernels.assignment_values_numpy(w)
        assert np.array_equal(a, b)


def test_vertex_table_values():
    # one agent ranking 1 > 0 > 2; scale lcm(1, 2, 3) = 6
    table, scale = _kernels.vertex_table(np.array([[1, 0, 2]]))
    assert scale == 6
    assert table[0].tolist() == [[0, 6, 0], [3, 3, 0], [2, 2, 2]]


def test_empty_range_returns_nothing():
    table, _ = _kernels.vertex_table(np.array([[0, 1]]))
    assert _kernels.voting_vertex_max(table, 0, 1, 1) == (0, 1, None)


@pytest.mark.parametrize("flag,expected", [("1", "numpy"), ("0", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, DISTORTION_LAB_PURE_NUMPY=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from distortion_lab import _kernels; print(_kernels.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == expected
