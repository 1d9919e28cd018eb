import random

import pytest

from conftest import SKEW, X3, X4, ideal
from lyucalc.lyutable import LyubeznikTable, ideal_hash, krull_dimension, lyubeznik_table
from lyucalc.polyring import Poly, RingSpec

TWISTED_CUBIC = ["x0*x2 - x1^2", "x0*x3 - x1*x2", "x1*x3 - x2^2"]


@pytest.mark.parametrize("names,gens,dim", [
    (X3, X3, 0), (["x0", "x1"], [], 2), (X3, ["x0*x2 - x1^2"], 2),
    (X4, TWISTED_CUBIC, 2), (X4, SKEW, 2), (X3, ["x0", "x1^2"], 1), (X3, ["1"], -1),
])
def test_krull_dimension(names, gens, dim):
    R, I = ideal(3, names, gens)
    assert krull_dimension(R, I) == dim


def test_tables():
    R, I = ideal(2, X3, X3)
    assert lyubeznik_table(R, I).nonzero() == [(0, 0, 1)]
    R = RingSpec(2, ["x0", "x1"])
    assert lyubeznik_table(R, []).nonzero() == [(2, 2, 1)]
    R, I = ideal(3, X4, SKEW)
    t = lyubeznik_table(R, I)
    assert t.nonzero() == [(0, 1, 1), (2, 2, 2)]
    assert t[2, 2] == 2 and t[0, 0] == 0
    assert t.dimA == 2 and set(t.entries) == {(i, j) for j in range(3) for i in range(j + 1)}


def test_single_cell_and_meta():
    R, I = ideal(2, X4, SKEW)
    t = lyubeznik_table(R, I, cell=(2, 2))
    assert list(t.entries) == [(2, 2)] and t[2, 2] == 2
    assert t.meta["ideal_hash"] == ideal_hash(R, I)
    assert t.meta["minimize"] is True


def test_table_equality_and_text():
    a = LyubeznikTable(2, {(0, 1): 1, (2, 2): 2, (0, 0): 0})
    b = LyubeznikTable(2, {(2, 2): 2, (0, 1): 1})
    assert a == b
    assert a.as_text().splitlines()[2].split()[-1] == "2"


def test_unit_ideal_rejected():
    R, I = ideal(2, X3, ["1"])
    with pytest.raises(ValueError):
        lyubeznik_table(R, I)


def test_threads_agree():
    R, I = ideal(2, X4, SKEW)
    assert lyubeznik_table(R, I, threads=2) == lyubeznik_table(R, I, threads=1)


def _relabel(R, polys, perm):
    return [Poly(R, {tuple(e[perm[k]] for k in range(R.nvars)): c for e, c in f.coeffs.items()})
            for f in polys]


def test_relabeling_invariance(rng):
    R, I = ideal(2, X4, SKEW)
    base = lyubeznik_table(R, I)
    for _ in range(3):
        perm = list(range(4))
        rng.shuffle(perm)
        J = _relabel(R, I, perm)
        assert lyubeznik_table(R, J) == base
    assert ideal_hash(R, I) == ideal_hash(R, list(reversed(I)))


def test_linear_change_of_coordinates():
    # conic x0 x2 - x1^2 under x2 -> x2 + x0 + x1: still a smooth conic
    R, I = ideal(3, X3, ["x0*x2 + x0^2 + x0*x1 - x1^2"])
    assert lyubeznik_table(R, I).nonzero() == [(2, 2, 1)]
    R, I = ideal(2, X4, ["x0*x2 + x0*x1", "x0*x3", "x1*x2 + x1^2", "x1*x3"])
    assert lyubeznik_table(R, I).nonzero() == [(0, 1, 1), (2, 2, 2)]
