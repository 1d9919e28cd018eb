"""Chain complexes of graded free modules, resolutions, duals and homology."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg
from .errors import PipelineAssertion
from .groebner import (lift_vector, matrix_gb, minimal_generators, syzygies)
from .polyring import (FreeModule, ModMatrix, Poly, RingSpec, array_to_vec,
                       graded_piece_basis, vec_to_array)


class ChainComplex:
    """Free modules C_0..C_L with maps out of each spot.

    ``direction`` is -1 for a homological complex (maps[t]: C_t -> C_{t-1})
    and +1 for a cohomological one (maps[t]: C_t -> C_{t+1}).
    """

    def __init__(self, ring: RingSpec, modules, maps, direction=-1, check=True):
        self.ring = ring
        self.modules = list(modules)
        self.maps = dict(maps)
        self.direction = direction
        for t, m in self.maps.items():
            if m.dom != self.module(t) or m.cod != self.module(t + direction):
                raise ValueError(f"map out of spot {t} does not match the modules")
        if check:
            self.check_square_zero()

    @property
    def length(self):
        return len(self.modules) - 1

    def module(self, t) -> FreeModule:
        if 0 <= t < len(self.modules):
            return self.modules[t]
        return FreeModule(())

    def out_map(self, t) -> ModMatrix:
        m = self.maps.get(t)
        if m is None:
            return ModMatrix.zero(self.ring, self.module(t + self.direction), self.module(t))
        return m

    def in_map(self, t) -> ModMatrix:
        m = self.maps.get(t - self.direction)
        if m is None:
            return ModMatrix.zero(self.ring, self.module(t), self.module(t - self.direction))
        return m

    def check_square_zero(self):
        for t in sorted(self.maps):
            nxt = self.maps.get(t + self.direction)
            if nxt is not None and not (nxt @ self.maps[t]).is_zero():
                raise PipelineAssertion(f"d∘d != 0 at spot {t}")
        return True

    def ranks(self):
        return [m.rank for m in self.modules]

    def twist(self, t) -> "ChainComplex":
        return ChainComplex(self.ring, [F.twist(t) for F in self.modules],
                            {k: m.twist(t) for k, m in self.maps.items()}, self.direction, check=False)

    def frobenius(self, e=1) -> "ChainComplex":
        q = self.ring.p ** e
        return ChainComplex(self.ring, [F.scaled(q) for F in self.modules],
                            {k: m.frobenius(e) for k, m in self.maps.items()}, self.direction,
                            check=False)

    def __repr__(self):
        kind = "homological" if self.direction < 0 else "cohomological"
        return f"ChainComplex({kind}, ranks={self.ranks()})"


def _nonzero_columns(A: ModMatrix) -> ModMatrix:
    return A.select_columns([k for k, c in enumerate(A.cols) if c])


def resolve(d1: ModMatrix, minimize=True, length=None) -> ChainComplex:
    """Free resolution of coker(d1), spot 0 = d1.cod.

    Iterated syzygies.  With ``minimize`` each step keeps a minimal
    generating set, so the result is a minimal resolution when d1 has no
    unit entries.  Without it the length is capped (default n+2 spots).
    """
    ring = d1.ring
    cap = (ring.nvars + 1) if length is None else length
    cur = _nonzero_columns(d1)
    if minimize and cur.dom.rank:
        cur = cur.select_columns(minimal_generators(cur))
    modules = [d1.cod]
    maps = {}
    t = 1
    while cur.dom.rank:
        if t > cap:
            if minimize:
                raise PipelineAssertion("minimal resolution longer than the number of variables")
            break
        modules.append(cur.dom)
        maps[t] = cur
        nxt = _nonzero_columns(syzygies(cur))
        if minimize and nxt.dom.rank:
            nxt = nxt.select_columns(minimal_generators(nxt))
        cur = nxt
        t += 1
    C = ChainComplex(ring, modules, maps, -1, check=True)
    if minimize:
        C = minimize_complex(C)
    return C


def ideal_matrix(ring: RingSpec, polys) -> ModMatrix:
    cols, degs = [], []
    for f in polys:
        if isinstance(f, str):
            f = ring.parse(f)
        if f.is_zero():
            continue
        degs.append(f.degree())
        cols.append({(0, e): c for e, c in f.coeffs.items()})
    return ModMatrix(ring, FreeModule((0,)), FreeModule(degs), cols)


def free_resolution(M, ring=None, minimize=True, length=None, cache=None) -> ChainComplex:
    """Resolve R/I (``M`` a list of polynomials) or a presented module."""
    if isinstance(M, SubquotientPresentation):
        return resolve(M.relations, minimize=minimize, length=length)
    if isinstance(M, ModMatrix):
        return resolve(M, minimize=minimize, length=length)
    polys = list(M)
    if ring is None:
        ring = polys[0].ring
    if cache is not None:
        hit = cache.get(ring, polys, minimize)
        if hit is not None:
            return hit
    C = resolve(ideal_matrix(ring, polys), minimize=minimize, length=length)
    if cache is not None:
        cache.put(ring, polys, minimize, C)
    return C


def _unit_entry(A: ModMatrix):
    zero = (0,) * A.ring.nvars
    for c, col in enumerate(A.cols):
        for (r, e), v in col.items():
            if e == zero:
                return r, c, v
    return None


def minimize_complex(C: ChainComplex) -> ChainComplex:
    """Split off unit entries of d_t (t >= 2) so spot 0 is untouched."""
    if C.direction != -1:
        raise ValueError("minimize expects a homological complex")
    ring = C.ring
    p = ring.p
    modules = list(C.modules)
    maps = dict(C.maps)
    changed = False
    for t in range(2, len(modules)):
        while True:
            d = maps.get(t)
            if d is None:
                break
            hit = _unit_entry(d)
            if hit is None:
                break
            changed = True
            r, c, a = hit
            ainv = pow(a, -1, p)
            col_c = d.cols[c]
            new_cols = []
            for j, col in enumerate(d.cols):
                if j == c:
                    continue
                # coefficient of row r in column j (a polynomial)
                row_part = {e: v for (rr, e), v in col.items() if rr == r}
                out = dict(col)
                for e1, v1 in row_part.items():
                    for (rr, e2), v2 in col_c.items():
                        k = (rr, tuple(x + y for x, y in zip(e1, e2)))
                        w = (out.get(k, 0) - v1 * v2 * ainv) % p
                        if w:
                            out[k] = w
                        else:
                            out.pop(k, None)
                new_cols.append(out)
            keep_rows = [k for k in range(d.cod.rank) if k != r]
            where = {k: i for i, k in enumerate(keep_rows)}
            new_cols = [{(where[rr], e): v for (rr, e), v in col.items() if rr != r} for col in new_cols]
            cod = FreeModule(tuple(d.cod.gen_degrees[k] for k in keep_rows))
            dom = FreeModule(tuple(g for j, g in enumerate(d.dom.gen_degrees) if j != c))
            modules[t - 1] = cod
            modules[t] = dom
            maps[t] = ModMatrix(ring, cod, dom, new_cols, check=False)
            prev = maps.get(t - 1)
            if prev is not None:
                maps[t - 1] = prev.select_columns(keep_rows)
            nxt = maps.get(t + 1)
            if nxt is not None:
                maps[t + 1] = nxt.select_rows([k for k in range(nxt.cod.rank) if k != c])
    if not changed:
        return C
    # trim trailing zero modules
    while len(modules) > 1 and modules[-1].rank == 0:
        maps.pop(len(modules) - 1, None)
        modules.pop()
    maps = {t: m for t, m in maps.items() if m.dom.rank and m.cod.rank}
    return ChainComplex(ring, modules, maps, -1, check=True)


def dualize_into_omega(C: ChainComplex, twist_by=None) -> ChainComplex:
    """Apply Hom(-, R(-N)) with N the number of variables; flips direction."""
    N = C.ring.nvars if twist_by is None else twist_by
    modules = [FreeModule(tuple(N - d for d in F.gen_degrees)) for F in C.modules]
    maps = {}
    for t, m in C.maps.items():
        maps[t + C.direction] = m.transpose(N)
    return ChainComplex(C.ring, modules, maps, -C.direction, check=False)


class HomologyPiece:
    """Degree-d homology of a complex at one spot, by linear algebra over F_p."""

    def __init__(self, C: ChainComplex, t: int, d: int):
        self.complex = C
        self.spot = t
        self.degree = d
        p = C.ring.p
        self.p = p
        nv = C.ring.nvars
        F = C.module(t)
        self.basis = graded_piece_basis(F, d, nv)
        self.index = {b: k for k, b in enumerate(self.basis)}
        n = len(self.basis)
        out = C.out_map(t)
        if n:
            mo = out.degree_matrix(d, src=self.basis)
            self.cycles = linalg.nullspace(mo, p) if mo.shape[0] else linalg.identity(n)
        else:
            self.cycles = linalg.zeros(0, 0)
        inc = C.in_map(t)
        self.boundaries = inc.degree_matrix(d, dst=self.index) if n else linalg.zeros(0, 0)
        if self.boundaries.size and mo.shape[0]:
            if linalg.matmul(mo, self.boundaries, p).any():
                raise PipelineAssertion("boundaries are not cycles")
        nb = self.boundaries.shape[1] if n else 0
        if n and self.cycles.shape[1]:
            stacked = np.hstack([self.boundaries, self.cycles]) if nb else self.cycles
            piv = linalg.independent_columns(stacked, p)
            chosen = [k - nb for k in piv if k >= nb]
            self.reps = self.cycles[:, chosen]
            self._brank = len([k for k in piv if k < nb])
        else:
            self.reps = linalg.zeros(n, 0)
            self._brank = 0
        if n and nb:
            bpiv = linalg.independent_columns(self.boundaries, p)
            self._bbasis = self.boundaries[:, bpiv]
        else:
            self._bbasis = linalg.zeros(n, 0)

    @property
    def dim(self) -> int:
        return self.reps.shape[1]

    def rep_vectors(self):
        """Cycle representatives as module-element dicts."""
        return [array_to_vec(self.reps[:, k], self.basis) for k in range(self.dim)]

    def to_array(self, vec: dict) -> np.ndarray:
        return vec_to_array(vec, self.index)

    def coordinates(self, vec) -> np.ndarray:
        """Coordinates of a degree-d cycle in the chosen homology basis."""
        arr = vec if isinstance(vec, np.ndarray) else self.to_array(vec)
        nb = self._bbasis.shape[1]
        M = np.hstack([self._bbasis, self.reps]) if nb else self.reps
        if M.shape[1] == 0:
            if np.asarray(arr).any():
                raise PipelineAssertion("nonzero vector in a zero homology piece")
            return linalg.zeros(0, 1)
        c = linalg.solve_in_span(M, arr, self.p)
        return c[nb:]

    def is_boundary(self, vec) -> bool:
        arr = vec if isinstance(vec, np.ndarray) else self.to_array(vec)
        if not np.asarray(arr).any():
            return True
        if self._bbasis.shape[1] == 0:
            return False
        try:
            linalg.solve_in_span(self._bbasis, arr, self.p)
            return True
        except Exception:
            return False

    def is_cycle(self, vec) -> bool:
        out = self.complex.out_map(self.spot).apply(vec if isinstance(vec, dict)
                                                     else array_to_vec(vec, self.basis))
        return not out


@dataclass
class SubquotientPresentation:
    """span(cycles)/boundaries presented on the cycle columns.

    ``cycles`` maps the generators into ``ambient``; ``relations`` are the
    coefficient vectors c with cycles*c a boundary.
    """

    ring: RingSpec
    ambient: FreeModule
    cycles: ModMatrix
    relations: ModMatrix
    boundaries: ModMatrix
    complex: ChainComplex = None
    spot: int = None
    _stack: ModMatrix = field(default=None, repr=False)

    @property
    def gen_degrees(self):
        return self.cycles.dom.gen_degrees

    @property
    def ngens(self):
        return self.cycles.dom.rank

    def stack(self) -> ModMatrix:
        if self._stack is None:
            from .polyring import hstack
            self._stack = hstack(self.cycles, self.boundaries)
        return self._stack

    def coordinates(self, vec: dict) -> dict:
        """Generator coordinates of a cycle (any choice; well defined mod relations)."""
        x = lift_vector(self.stack(), vec)
        g = self.ngens
        return {k: v for k, v in x.items() if k[0] < g}

    def graded_piece(self, d: int):
        """Basis of M_d: list of (coefficient dict on generators, ambient representative)."""
        p = self.ring.p
        nv = self.ring.nvars
        G = FreeModule(self.gen_degrees)
        basis = graded_piece_basis(G, d, nv)
        if not basis:
            return []
        index = {b: k for k, b in enumerate(basis)}
        rel = self.relations.degree_matrix(d, dst=index)
        nr = rel.shape[1]
        full = np.hstack([rel, linalg.identity(len(basis))]) if nr else linalg.identity(len(basis))
        piv = linalg.independent_columns(full, p)
        out = []
        for k in piv:
            if k < nr:
                continue
            coeff = {basis[k - nr]: 1}
            out.append((coeff, self.cycles.apply(coeff)))
        return out

    def piece_dim(self, d: int) -> int:
        return len(self.graded_piece(d))


def homology_presentation(C: ChainComplex, t: int, minimize=True) -> SubquotientPresentation:
    """Presentation of H at spot t with cycle representatives kept."""
    from .polyring import hstack
    ring = C.ring
    Z = _nonzero_columns(syzygies(C.out_map(t)))
    B = _nonzero_columns(C.in_map(t))
    if minimize and Z.dom.rank:
        both = hstack(B, Z) if B.dom.rank else Z
        nb = B.dom.rank
        mins = minimal_generators(both)
        Z = Z.select_columns([k - nb for k in mins if k >= nb])
    W = hstack(Z, B) if B.dom.rank else Z
    nz = Z.dom.rank
    if nz:
        S = syzygies(W)
        rel = _nonzero_columns(S.select_rows(range(nz)))
    else:
        rel = ModMatrix.zero(ring, FreeModule(()), FreeModule(()))
    return SubquotientPresentation(ring, C.module(t), Z, rel, B, C, t, W)


def graded_piece(M: SubquotientPresentation, d: int):
    return M.graded_piece(d)


def hilbert_function(C: ChainComplex, d: int) -> int:
    """Alternating sum of dim (C_t)_d."""
    nv = C.ring.nvars
    return sum((-1) ** t * len(graded_piece_basis(C.module(t), d, nv))
               for t in range(len(C.modules)))


# ---- on-disk cache of ideal resolutions -------------------------------------

CACHE_FORMAT = "lyucalc.resolution/1"


def _ideal_digest(ring: RingSpec, polys, minimize) -> str:
    from .groebner import ideal_gb
    gb = ideal_gb(ring, [f for f in polys if not f.is_zero()]) if any(
        not f.is_zero() for f in polys) else []
    payload = {
        "p": ring.p, "vars": list(ring.var_names), "order": str(ring.order),
        "gb": [sorted([list(e), c] for e, c in f.coeffs.items()) for f in gb],
        "minimize": bool(minimize),
        # generator list matters too: resolutions start from the given generators
        "gens": [sorted([list(e), c] for e, c in f.coeffs.items()) for f in polys],
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


class ResolutionCache:
    """Resolutions of R/I stored as JSON files, one per (ring, ideal, flag)."""

    def __init__(self, path):
        self.path = Path(path) / "v1"
        self.path.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    def _file(self, ring, polys, minimize):
        return self.path / f"{_ideal_digest(ring, polys, minimize)}.json"

    def get(self, ring, polys, minimize):
        f = self._file(ring, polys, minimize)
        if not f.exists():
            self.misses += 1
            return None
        data = json.loads(f.read_text())
        if data.get("format") != CACHE_FORMAT:
            self.misses += 1
            return None
        modules = [FreeModule(tuple(m)) for m in data["twists"]]
        maps = {}
        for t, cols in data["maps"].items():
            t = int(t)
            vecs = [{(r, tuple(e)): c for r, e, c in col} for col in cols]
            maps[t] = ModMatrix(ring, modules[t - 1], modules[t], vecs)
        self.hits += 1
        return ChainComplex(ring, modules, maps, -1, check=True)

    def put(self, ring, polys, minimize, C: ChainComplex):
        data = {
            "format": CACHE_FORMAT,
            "p": ring.p,
            "vars": list(ring.var_names),
            "minimize": bool(minimize),
            "twists": [list(F.gen_degrees) for F in C.modules],
            "maps": {str(t): [sorted([r, list(e), c] for (r, e), c in col.items()) for col in m.cols]
                     for t, m in C.maps.items()},
        }
        f = self._file(ring, polys, minimize)
        tmp = f.with_suffix(".tmp")
        tmp.write_text(json.dumps(data))
        os.replace(tmp, f)
