"""Shared fixtures: the worked-example instances exercised across the suite.

All instances live over GF(2) with the sender holding the full space, so
``sender`` is always an identity block.  Matrices are given row by row
exactly as in the source material; construction canonicalizes cache bases,
so tests that need the original (non-reduced) rows keep their own copies.
"""

import numpy as np
import pytest

from iccsi import IccsiInstance, Matrix, field_new, make_instance

F2 = field_new(2, 1)


def ident(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def build(field, t, n, users):
    return make_instance(field, t, n, ident(n), users)


@pytest.fixture
def f2():
    return F2


@pytest.fixture
def syn_inst():
    """Four users over GF(2)**4, two cached combinations each; kappa = 2.

    The length-5 matrix SYN_L below is a distance-3 encoder for it, used by
    the syndrome-decoder walkthrough.
    """
    users = [
        ([[0, 1, 1, 0], [0, 0, 1, 0]], [1, 0, 0, 0]),
        ([[1, 0, 0, 0], [0, 0, 1, 1]], [0, 1, 0, 0]),
        ([[1, 0, 0, 0], [0, 0, 0, 1]], [0, 0, 1, 0]),
        ([[1, 1, 0, 1], [0, 1, 1, 0]], [0, 0, 0, 1]),
    ]
    return build(F2, 1, 4, users)


# The walkthrough matrices for user 4 of syn_inst.  SYN_V4 is the cache
# basis as originally written (construction stores its reduced form), and
# SYN_M4 / SYN_H4 are one valid transform/parity pair for that basis.
SYN_L = ((1, 0, 1, 0), (0, 1, 1, 1), (1, 1, 0, 0), (1, 1, 1, 0), (0, 0, 1, 0))
SYN_V4 = ((1, 1, 0, 1), (0, 1, 1, 0))
SYN_M4 = ((1, 0, 1, 1), (0, 0, 0, 1), (0, 1, 0, 1), (0, 0, 1, 0))
SYN_H4 = ((0, 0, 0, 1, 1), (1, 0, 0, 1, 1), (0, 1, 0, 1, 1), (0, 0, 1, 1, 1))


@pytest.fixture
def trap_inst():
    """Four users, one cached packet each in a cycle; kappa = 3."""
    users = [
        ([[0, 1, 0, 0]], [1, 0, 0, 0]),
        ([[0, 0, 1, 0]], [0, 1, 0, 0]),
        ([[0, 0, 0, 1]], [0, 0, 1, 0]),
        ([[1, 0, 0, 0]], [0, 0, 0, 1]),
    ]
    return build(F2, 1, 4, users)


TRAP_L = ((1, 1, 0, 0), (0, 1, 1, 0), (0, 0, 1, 1))
TRAP_X = (1, 0, 1, 0)
# Received word after a rank-2 error on the padded broadcast (v=2, ell=1)
# together with the unique cancellation matrix T it forces.
TRAP_RECEIVED = ((1, 0, 1), (1, 1, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0))
TRAP_T = ((0, 0), (1, 1), (1, 0))


@pytest.fixture
def ex_k3_inst():
    """Six users with 2-dimensional caches over GF(2)**4; min-rank 3."""
    users = [
        ([[0, 0, 1, 0], [0, 0, 0, 1]], [1, 0, 0, 0]),
        ([[1, 0, 0, 0], [0, 0, 0, 1]], [0, 1, 0, 0]),
        ([[1, 0, 0, 0], [0, 1, 0, 0]], [0, 0, 1, 0]),
        ([[0, 1, 0, 0], [0, 0, 1, 0]], [0, 0, 0, 1]),
        ([[1, 0, 0, 0], [0, 0, 1, 0]], [0, 1, 0, 0]),
        ([[0, 1, 0, 0], [0, 0, 0, 1]], [1, 0, 0, 0]),
    ]
    return build(F2, 1, 4, users)


@pytest.fixture
def ex_k2_inst():
    """Same shape as ex_k3_inst but with coded caches; min-rank 2."""
    users = [
        ([[1, 0, 1, 0], [0, 0, 0, 1]], [1, 1, 0, 0]),
        ([[1, 0, 0, 0], [0, 0, 1, 1]], [0, 1, 1, 1]),
        ([[1, 0, 0, 0], [0, 1, 0, 0]], [1, 0, 1, 0]),
        ([[0, 1, 0, 1], [0, 0, 1, 0]], [1, 0, 0, 1]),
        ([[1, 0, 1, 0], [0, 0, 0, 1]], [0, 1, 0, 0]),
        ([[0, 1, 0, 0], [0, 0, 0, 1]], [1, 1, 1, 1]),
    ]
    return build(F2, 1, 4, users)


@pytest.fixture
def alpha3_inst():
    """Six users over GF(2)**5 where the confusable-union bound is tight:

    alpha = kappa = 3, so the optimal 1-error block length is exactly the
    shortest [*, 3, 3] binary code length, 6.
    """
    users = [
        ([[0, 1, 1, 1, 0], [0, 0, 1, 1, 1]], [1, 0, 0, 0, 0]),
        ([[1, 0, 0, 0, 1], [0, 0, 1, 1, 0]], [1, 0, 0, 0, 0]),
        ([[1, 1, 1, 1, 0], [0, 0, 0, 1, 1]], [0, 0, 1, 0, 1]),
        ([[1, 0, 0, 1, 0], [0, 1, 1, 1, 1]], [1, 0, 0, 0, 1]),
        ([[0, 0, 1, 1, 0], [0, 0, 0, 1, 1]], [1, 1, 0, 0, 0]),
        ([[1, 0, 0, 1, 0], [0, 0, 1, 1, 0]], [0, 0, 1, 1, 1]),
    ]
    return build(F2, 1, 5, users)


# Basis of a 3-dimensional space contained (minus zero) in the union of
# confusable sets of alpha3_inst.
ALPHA3_SPAN = ((1, 0, 1, 1, 0), (1, 0, 0, 1, 1), (0, 1, 1, 0, 0))


@pytest.fixture
def mds_inst():
    """Single-row coded caches defeating the classic MDS-code argument.

    The distance-2 MDS generator MDS_G cannot serve user 1 while MDS_L,
    which generates a code of distance 1 only, serves everyone.
    """
    users = [
        ([[1, 0, 0, 1]], [1, 1, 1, 0]),
        ([[0, 0, 0, 1]], [0, 1, 0, 0]),
        ([[0, 1, 0, 0]], [0, 0, 1, 0]),
        ([[0, 0, 1, 0]], [0, 0, 0, 1]),
    ]
    return build(F2, 1, 4, users)


MDS_G = ((1, 0, 0, 1), (0, 1, 0, 1), (0, 0, 1, 1))
MDS_L = ((1, 0, 0, 0), (0, 1, 0, 1), (0, 0, 1, 1))


def random_instances(seed, count, n_max=4, m_max=4):
    """Yield ``count`` random valid GF(2), t=1 instances, full sender space.

    Cache rows and requests are rejection-sampled until construction
    accepts them, so every yielded instance satisfies the usual demands
    (request nonzero, outside the cache, inside the sender space).
    """
    rng = np.random.default_rng(seed)
    made = 0
    while made < count:
        n = int(rng.integers(2, n_max + 1))
        m = int(rng.integers(1, m_max + 1))
        users = []
        for _ in range(m):
            d = int(rng.integers(1, n))
            v_rows = rng.integers(0, 2, size=(d, n)).tolist()
            r = rng.integers(0, 2, size=n).tolist()
            users.append((v_rows, r))
        try:
            inst = build(F2, 1, n, users)
        except Exception:
            continue
        made += 1
        yield inst


def mat(field, rows):
    return Matrix(field, rows)


def col(field, entries):
    return Matrix.column_vector(field, entries)
