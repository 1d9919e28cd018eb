import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lyucalc import linalg
from lyucalc.errors import NotInSpan
from lyucalc.linalg import PLinearEndo, rank, semilinear_power, solve_in_span, stable_rank


def test_rank_examples():
    assert rank(np.eye(3, dtype=np.int64), 5) == 3
    assert rank(np.ones((2, 2), dtype=np.int64), 2) == 1
    assert rank(np.zeros((3, 4), dtype=np.int64), 7) == 0
    assert rank(np.zeros((0, 4), dtype=np.int64), 7) == 0


def test_solve_in_span_examples():
    v = np.array([3, 1, 4])
    assert solve_in_span(np.eye(3, dtype=np.int64), v, 5).ravel().tolist() == [3, 1, 4]
    with pytest.raises(NotInSpan):
        solve_in_span(np.array([[1], [0]]), [0, 1], 3)
    basis = np.array([[1, 1], [0, 1]])
    c = solve_in_span(basis, [0, 1], 2)
    # brute force over all four coefficient vectors
    sols = [list(c2) for c2 in itertools.product(range(2), repeat=2)
            if ((basis @ np.array(c2)) % 2).tolist() == [0, 1]]
    assert sols == [[1, 1]]
    assert c.ravel().tolist() == [1, 1]


def test_semilinear_power_examples():
    f = PLinearEndo(np.eye(4, dtype=np.int64), 3)
    assert (semilinear_power(f, 7) == np.eye(4)).all()
    nil = PLinearEndo(np.array([[0, 1], [0, 0]]), 5)
    assert not semilinear_power(nil, 2).any()
    phi = np.array([[0, 1], [1, 1]])
    f = PLinearEndo(phi, 2)
    assert (semilinear_power(f, 3) == np.linalg.matrix_power(phi, 3) % 2).all()
    assert (semilinear_power(f, 0) == np.eye(2)).all()


def test_stable_rank_examples():
    assert stable_rank(PLinearEndo(np.eye(5, dtype=np.int64), 7)) == 5
    assert stable_rank(PLinearEndo(np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]]), 3)) == 0
    # diag(1,0) over F_3: image chain V > span(e1) = f(V) = f^2(V)
    f = PLinearEndo(np.diag([1, 0]), 3)
    images = [rank(semilinear_power(f, e), 3) for e in range(4)]
    assert images == [2, 1, 1, 1]
    assert stable_rank(f) == 1


def test_large_prime_matmul():
    p = 2**31 - 1
    a = np.full((3, 3), p - 1, dtype=np.int64)
    assert (linalg.matmul(a, a, p) == 3).all()
    assert rank(a, p) == 1


def test_nullspace():
    a = np.array([[1, 2, 3], [2, 4, 6]])
    ns = linalg.nullspace(a, 7)
    assert ns.shape == (3, 2)
    assert not linalg.matmul(a, ns, 7).any()


square = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.integers(0, 6), min_size=n * n, max_size=n * n).map(
        lambda xs: np.array(xs, dtype=np.int64).reshape(n, n)))


@given(square, st.integers(0, 8))
def test_image_chain_stabilizes(m, extra):
    f = PLinearEndo(m, 7)
    n = f.dim
    assert rank(semilinear_power(f, n + extra), 7) == rank(semilinear_power(f, n), 7)


@given(square, st.integers(0, 10**6))
def test_stable_rank_conjugation_invariant(m, s):
    r = random.Random(s)
    p = 7
    n = m.shape[0]
    while True:
        S = np.array([[r.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        if rank(S, p) == n:
            break
    # S^{-1} by solving against the identity
    Sinv = np.hstack([solve_in_span(S, np.eye(n, dtype=np.int64)[:, k], p) for k in range(n)])
    conj = linalg.matmul(linalg.matmul(Sinv, m, p), S, p)
    assert stable_rank(PLinearEndo(conj, p)) == stable_rank(PLinearEndo(m, p))


@given(square)
def test_stable_rank_is_rank_of_plain_power(m):
    f = PLinearEndo(m, 7)
    plain = np.linalg.matrix_power(m.astype(object), f.dim) % 7
    assert stable_rank(f) == rank(plain.astype(np.int64), 7)
