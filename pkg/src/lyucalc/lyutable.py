"""Lyubeznik tables from stable ranks of the Frobenius action on E^{i,j}_0."""

from __future__ import annotations

import hashlib
import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .frobact import build_phi
from .groebner import ideal_gb
from .linalg import stable_rank
from .polyring import Poly, RingSpec


def krull_dimension(ring: RingSpec, polys) -> int:
    """dim R/I from the supports of the leading monomials of a Gröbner basis."""
    polys = [f for f in polys if not f.is_zero()]
    if not polys:
        return ring.nvars
    gb = ideal_gb(ring, polys)
    supports = []
    for g in gb:
        lead = g.leading_term()[0]
        supports.append(frozenset(k for k, x in enumerate(lead) if x))
    if any(not s for s in supports):
        return -1  # unit ideal: empty scheme
    for size in range(ring.nvars, -1, -1):
        for S in itertools.combinations(range(ring.nvars), size):
            S = frozenset(S)
            if not any(s <= S for s in supports):
                return size
    return 0


def lyubeznik_number(ring: RingSpec, polys, i, j, minimize=True, cache=None) -> int:
    return stable_rank(build_phi(ring, polys, i, j, minimize, cache).phi0)


def ideal_hash(ring: RingSpec, polys) -> str:
    gb = ideal_gb(ring, [f for f in polys if not f.is_zero()]) if any(
        not f.is_zero() for f in polys) else []
    text = f"{ring.p}|{','.join(ring.var_names)}|" + ";".join(str(g) for g in gb)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class LyubeznikTable:
    dimA: int
    entries: dict                      # (i, j) -> λ for 0 <= i <= j <= dimA
    meta: dict = field(default_factory=dict)

    def nonzero(self):
        """Nonzero entries sorted by (j, i)."""
        return [(i, j, v) for (i, j), v in sorted(self.entries.items(), key=lambda t: (t[0][1], t[0][0]))
                if v]

    def __getitem__(self, ij):
        return self.entries.get(ij, 0)

    def __eq__(self, other):
        if not isinstance(other, LyubeznikTable):
            return NotImplemented
        return self.dimA == other.dimA and self.nonzero() == other.nonzero()

    def as_text(self):
        d = self.dimA
        rows = []
        for i in range(d + 1):
            rows.append(" ".join(f"{self[i, j]:3d}" if i <= j else "  ." for j in range(d + 1)))
        return "\n".join(rows)


def _cell_job(args):
    p, names, gens, i, j, minimize = args
    ring = RingSpec(p, names)
    polys = [ring.parse(g) for g in gens]
    t0 = time.perf_counter()
    v = lyubeznik_number(ring, polys, i, j, minimize)
    return (i, j, v, time.perf_counter() - t0)


def table_cells(dimA, cell=None):
    if cell is not None:
        return [tuple(cell)]
    return [(i, j) for j in range(dimA + 1) for i in range(j + 1)]


def lyubeznik_table(ring: RingSpec, polys, minimize=True, cache=None, cell=None,
                    threads=None) -> LyubeznikTable:
    """λ_{i,j} for 0 <= i <= j <= dim A (or a single cell)."""
    polys = [f for f in polys if not f.is_zero()]
    dimA = krull_dimension(ring, polys)
    if dimA < 0:
        raise ValueError("the unit ideal defines the empty scheme")
    cells = table_cells(dimA, cell)
    if threads is None:
        threads = int(os.environ.get("LYUCALC_THREADS", "1") or 1)
    entries, timings = {}, {}
    if threads > 1 and len(cells) > 1:
        jobs = [(ring.p, ring.var_names, [str(f) for f in polys], i, j, minimize) for i, j in cells]
        with ProcessPoolExecutor(max_workers=threads) as ex:
            for i, j, v, dt in ex.map(_cell_job, jobs):
                entries[(i, j)] = v
                timings[(i, j)] = dt
    else:
        for i, j in cells:
            t0 = time.perf_counter()
            entries[(i, j)] = lyubeznik_number(ring, polys, i, j, minimize, cache)
            timings[(i, j)] = time.perf_counter() - t0
    meta = {
        "p": ring.p,
        "vars": list(ring.var_names),
        "ideal_hash": ideal_hash(ring, polys),
        "seconds": timings,
        "minimize": minimize,
    }
    return LyubeznikTable(dimA, entries, meta)
