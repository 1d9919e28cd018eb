"""Buchberger's algorithm for submodules of graded free modules.

The engine works on module elements stored as dicts ``{(pos, exps): coeff}``.
With ``witness=True`` every input column a_k is paired with a unit vector
e_{r+k} in an extra block of coordinates that sits below the real ones in
the term order.  Each basis element (g, w) then satisfies g = A w, elements
whose real part vanishes are syzygies, and lifting reduces to normal forms.

Pairs are processed by sugar (weighted degree), inputs after pairs of the
same sugar, so for homogeneous input the inputs that survive reduction form
a minimal generating set.
"""

from __future__ import annotations

import heapq
from collections import OrderedDict
from dataclasses import dataclass, field

from .errors import InhomogeneousError, NotInImage
from .polyring import (FreeModule, ModMatrix, Poly, RingSpec, frobenius_vec,
                       monomial_key)


class _Order:
    """Term order on a free module: (block, weighted degree, monomial, position)."""

    def __init__(self, ring: RingSpec, degrees, cut=None, weights=None):
        self.order = ring.order
        self.degrees = tuple(degrees)
        self.cut = cut
        self.weights = tuple(weights) if weights is not None else None
        self._cache: dict = {}

    def wdeg(self, pos, e):
        if self.weights is None:
            return sum(e) + self.degrees[pos]
        return sum(w * x for w, x in zip(self.weights, e)) + self.degrees[pos]

    def negkey(self, term):
        k = self._cache.get(term)
        if k is None:
            pos, e = term
            blk = 1 if self.cut is not None and pos >= self.cut else 0
            mk = monomial_key(self.order, e)
            k = (blk, -self.wdeg(pos, e)) + tuple(-x for x in mk) + (pos,)
            self._cache[term] = k
        return k

    def lead(self, vec):
        return min(vec, key=self.negkey)


@dataclass
class GBResult:
    """Reduced Gröbner basis, plus witness data when requested."""

    rank: int
    elements: list            # real parts, monic
    leads: list               # (pos, exps) of each element
    witnesses: list = None    # witness parts keyed by (input index, exps)
    syzygies: list = None     # syzygies of the inputs
    minimal: list = None      # indices of inputs forming a minimal generating set
    combined: list = field(default=None, repr=False)

    def frobenius(self, q: int) -> "GBResult":
        fv = lambda vs: None if vs is None else [frobenius_vec(v, q) for v in vs]
        return GBResult(self.rank, fv(self.elements),
                        [(pos, tuple(q * x for x in e)) for pos, e in self.leads],
                        fv(self.witnesses), fv(self.syzygies),
                        None if self.minimal is None else list(self.minimal),
                        fv(self.combined))


def _divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


class _Engine:
    def __init__(self, ring, degrees, gens, gen_degrees=None, witness=False, weights=None,
                 track_minimal=True):
        self.ring = ring
        self.p = ring.p
        self.nv = ring.nvars
        self.r = len(degrees)
        self.witness = witness
        gens = [dict(g) for g in gens]
        if gen_degrees is None:
            gen_degrees = []
            for g in gens:
                ds = {sum(e) + degrees[pos] for pos, e in g} if weights is None else None
                if not ds:
                    ds = {0}
                gen_degrees.append(min(ds))
        self.gen_degrees = tuple(gen_degrees)
        all_degrees = tuple(degrees) + (self.gen_degrees if witness else ())
        self.order = _Order(ring, all_degrees, cut=self.r if witness else None, weights=weights)
        zero = (0,) * self.nv
        if witness:
            for k, g in enumerate(gens):
                g[(self.r + k, zero)] = 1
        self.inputs = gens
        self.track_minimal = track_minimal
        self.product_criterion = (not witness) and self.r == 1
        self.G = []
        self.G_lead = []
        self.G_sugar = []
        self.by_pos: dict = {}
        self.active = []
        self.syz = []
        self.minimal = []
        self.homogeneous = self._homogeneous()

    def _homogeneous(self):
        for g in self.inputs:
            if len({self.order.wdeg(pos, e) for pos, e in g}) > 1:
                return False
        return True

    def sugar_of(self, vec):
        return max(self.order.wdeg(pos, e) for pos, e in vec)

    def find_reducer(self, term):
        pos, e = term
        for idx in self.by_pos.get(pos, ()):
            if _divides(self.G_lead[idx][1], e):
                return idx
        return None

    def reduce(self, f, full=False, skip_lead=False):
        """Reduce the real block of f by G; f is modified and returned."""
        p = self.p
        nk = self.order.negkey
        cut = self.r
        heap = [(nk(t), t) for t in f]
        heapq.heapify(heap)
        rem = {}
        if skip_lead and heap:
            _, t = heapq.heappop(heap)
            rem[t] = f.pop(t)
        while heap:
            _, t = heapq.heappop(heap)
            c = f.get(t)
            if c is None:
                continue
            if t[0] >= cut:
                break
            idx = self.find_reducer(t)
            if idx is None:
                if not full:
                    break
                rem[t] = f.pop(t)
                continue
            g = self.G[idx]
            ge = self.G_lead[idx][1]
            shift = tuple(x - y for x, y in zip(t[1], ge))
            coef = p - c
            for (pos, e), gc in g.items():
                k2 = (pos, tuple(x + y for x, y in zip(e, shift)))
                old = f.get(k2)
                if old is None:
                    f[k2] = coef * gc % p
                    heapq.heappush(heap, (nk(k2), k2))
                else:
                    v = (old + coef * gc) % p
                    if v:
                        f[k2] = v
                    else:
                        del f[k2]
        if rem:
            rem.update(f)
            return rem
        return f

    def real_lead(self, f):
        best = None
        for t in f:
            if t[0] < self.r:
                if best is None or self.order.negkey(t) < self.order.negkey(best):
                    best = t
        return best

    def spoly(self, i, j, lcm):
        p = self.p
        gi, gj = self.G[i], self.G[j]
        si = tuple(x - y for x, y in zip(lcm, self.G_lead[i][1]))
        sj = tuple(x - y for x, y in zip(lcm, self.G_lead[j][1]))
        out = {}
        for (pos, e), c in gi.items():
            out[(pos, tuple(x + y for x, y in zip(e, si)))] = c
        for (pos, e), c in gj.items():
            k2 = (pos, tuple(x + y for x, y in zip(e, sj)))
            v = (out.get(k2, 0) - c) % p
            if v:
                out[k2] = v
            else:
                out.pop(k2, None)
        return out

    def add(self, h):
        p = self.p
        lt = self.real_lead(h)
        inv = pow(h[lt], -1, p)
        if inv != 1:
            h = {k: v * inv % p for k, v in h.items()}
        idx = len(self.G)
        self.G.append(h)
        self.G_lead.append(lt)
        self.G_sugar.append(self.sugar_of(h))
        self.by_pos.setdefault(lt[0], []).append(idx)
        self._update(idx)
        return idx

    def _pair_sugar(self, i, j, lcm):
        pos = self.G_lead[i][0]
        s = []
        for k in (i, j):
            le = self.G_lead[k][1]
            s.append(self.G_sugar[k] + self.order.wdeg(pos, lcm) - self.order.wdeg(pos, le))
        return max(s)

    def _update(self, h):
        pos, lh = self.G_lead[h]
        cands = []
        for g in self.active:
            if self.G_lead[g][0] != pos:
                continue
            lg = self.G_lead[g][1]
            lcm = tuple(max(x, y) for x, y in zip(lg, lh))
            coprime = self.product_criterion and all(x == 0 or y == 0 for x, y in zip(lg, lh))
            cands.append((g, lcm, coprime))
        kept = []
        for n, (g, lcm, coprime) in enumerate(cands):
            if coprime:
                kept.append((g, lcm, coprime))
                continue
            others = cands[n + 1:] + kept
            if not any(_divides(l2, lcm) for (_, l2, _) in others):
                kept.append((g, lcm, coprime))
        # drop old pairs made redundant by the new lead (chain criterion)
        for seq in list(self.pairs):
            i, j, lcm = self.pairs[seq]
            if self.G_lead[i][0] != pos or not _divides(lh, lcm):
                continue
            li, lj = self.G_lead[i][1], self.G_lead[j][1]
            if (tuple(max(x, y) for x, y in zip(li, lh)) != lcm
                    and tuple(max(x, y) for x, y in zip(lj, lh)) != lcm):
                del self.pairs[seq]
        for g, lcm, coprime in kept:
            if coprime:
                continue
            self.seq += 1
            self.pairs[self.seq] = (g, h, lcm)
            s = self._pair_sugar(g, h, lcm)
            heapq.heappush(self.queue, (s, 0, self.order.negkey((pos, lcm)), self.seq))
        if not self.witness:
            self.active = [g for g in self.active
                           if not (self.G_lead[g][0] == pos and _divides(lh, self.G_lead[g][1]))]
        self.active.append(h)

    def run(self) -> GBResult:
        self.pairs = {}
        self.queue = []
        self.seq = 0
        for k, g in enumerate(self.inputs):
            if self.witness or g:
                s = self.sugar_of(g) if g else 0
                heapq.heappush(self.queue, (s, 1, (), k))
        while self.queue:
            s, kind, _, tag = heapq.heappop(self.queue)
            if kind == 1:
                f = dict(self.inputs[tag])
            else:
                pr = self.pairs.pop(tag, None)
                if pr is None:
                    continue
                f = self.spoly(*pr)
            f = self.reduce(f)
            if self.real_lead(f) is None:
                if self.witness and f:
                    self.syz.append(f)
                continue
            self.add(f)
            if kind == 1:
                self.minimal.append(tag)
        return self._finish()

    def _finish(self) -> GBResult:
        p = self.p
        keep = []
        for idx in range(len(self.G)):
            pos, e = self.G_lead[idx]
            redundant = False
            for j in self.by_pos.get(pos, ()):
                if j != idx and _divides(self.G_lead[j][1], e):
                    if self.G_lead[j][1] != e or j < idx:
                        redundant = True
                        break
            if not redundant:
                keep.append(idx)
        # reduce tails against the kept elements only
        self.by_pos = {}
        for idx in keep:
            self.by_pos.setdefault(self.G_lead[idx][0], []).append(idx)
        reduced = {}
        for idx in keep:
            reduced[idx] = self.reduce(dict(self.G[idx]), full=True, skip_lead=True)
        for idx in keep:
            self.G[idx] = reduced[idx]
        keep.sort(key=lambda i: self.order.negkey(self.G_lead[i]))
        r = self.r
        elements, leads, wit, comb = [], [], [], []
        for idx in keep:
            g = self.G[idx]
            elements.append({k: v for k, v in g.items() if k[0] < r})
            leads.append(self.G_lead[idx])
            comb.append(g)
            if self.witness:
                wit.append({(k[0] - r, k[1]): v for k, v in g.items() if k[0] >= r})
        res = GBResult(r, elements, leads, combined=comb)
        if self.witness:
            res.witnesses = wit
            res.syzygies = [{(k[0] - r, k[1]): v for k, v in s.items()} for s in self.syz]
        if self.track_minimal and self.homogeneous:
            res.minimal = sorted(self.minimal)
        return res


_CONTENT_CACHE: OrderedDict = OrderedDict()
_CACHE_LIMIT = 512
stats = {"gb_computed": 0, "gb_reused": 0}


def _content_key(ring, degrees, gens, gen_degrees, witness, weights):
    return (ring.p, ring.order, ring.nvars, tuple(degrees), tuple(gen_degrees or ()),
            witness, weights, tuple(frozenset(g.items()) for g in gens))


def groebner_basis(ring: RingSpec, ambient: FreeModule, gens, gen_degrees=None,
                   witness=False, weights=None) -> GBResult:
    """Reduced Gröbner basis of the submodule of ``ambient`` spanned by ``gens``."""
    gens = [dict(g) for g in gens]
    if weights is not None:
        weights = tuple(weights)
    key = _content_key(ring, ambient.gen_degrees, gens, gen_degrees, witness, weights)
    hit = _CONTENT_CACHE.get(key)
    if hit is not None:
        _CONTENT_CACHE.move_to_end(key)
        stats["gb_reused"] += 1
        return hit
    eng = _Engine(ring, ambient.gen_degrees, gens, gen_degrees, witness, weights)
    res = eng.run()
    stats["gb_computed"] += 1
    _CONTENT_CACHE[key] = res
    if len(_CONTENT_CACHE) > _CACHE_LIMIT:
        _CONTENT_CACHE.popitem(last=False)
    return res


def clear_cache():
    _CONTENT_CACHE.clear()


def matrix_gb(A: ModMatrix, witness=True) -> GBResult:
    """Gröbner basis of the column span of A, cached on the matrix.

    Frobenius images and twists of a matrix reuse the basis of the original:
    raising every exponent to a multiple of p keeps the term order, and a
    uniform twist changes nothing but degrees.
    """
    tag = "witness" if witness else "plain"
    res = A._gb.get(tag)
    if res is not None:
        return res
    origin = A._origin
    if origin is not None and origin[0] == "twist":
        res = matrix_gb(origin[1], witness)
    elif origin is not None and origin[0] == "frobenius":
        res = matrix_gb(origin[1], witness).frobenius(origin[2])
        stats["gb_reused"] += 1
    else:
        res = groebner_basis(A.ring, A.cod, A.cols, A.dom.gen_degrees, witness=witness)
    A._gb[tag] = res
    return res


class Submodule:
    """Span of homogeneous columns inside a free module; caches its basis."""

    def __init__(self, ring: RingSpec, ambient: FreeModule, gens):
        self.ring = ring
        self.ambient = ambient
        self.gens = [_as_vec(g) for g in gens]
        self.gb = None

    @classmethod
    def ideal(cls, ring, polys):
        polys = [ring.parse(f) if isinstance(f, str) else f for f in polys]
        return cls(ring, FreeModule((0,)), polys)

    def matrix(self) -> ModMatrix:
        degs = []
        for g in self.gens:
            ds = {sum(e) + self.ambient.gen_degrees[pos] for pos, e in g}
            if len(ds) > 1:
                raise InhomogeneousError("generator is not homogeneous")
            degs.append(ds.pop() if ds else 0)
        return ModMatrix(self.ring, self.ambient, FreeModule(degs), self.gens)

    def basis(self) -> GBResult:
        if self.gb is None:
            self.gb = groebner_basis(self.ring, self.ambient, self.gens)
        return self.gb


def _as_vec(g):
    if isinstance(g, Poly):
        return {(0, e): c for e, c in g.coeffs.items()}
    return dict(g)


def buchberger(S: Submodule):
    """Reduced Gröbner basis of S (as Poly objects when S is an ideal)."""
    res = S.basis()
    if S.ambient.rank == 1:
        return [Poly(S.ring, {e: c for (_, e), c in g.items()}) for g in res.elements]
    return res.elements


def _nf_engine(ring, ambient, res, dom_degrees=(), combined=False):
    """Bare engine that only reduces against an existing basis."""
    eng = _Engine.__new__(_Engine)
    eng.p = ring.p
    eng.r = ambient.rank
    eng.order = _Order(ring, tuple(ambient.gen_degrees) + tuple(dom_degrees), cut=ambient.rank)
    eng.G = res.combined if combined else res.elements
    eng.G_lead = res.leads
    eng.by_pos = {}
    for idx, (pos, _) in enumerate(res.leads):
        eng.by_pos.setdefault(pos, []).append(idx)
    return eng


def normal_form(v, S, ring=None, ambient=None):
    """Remainder of v modulo a submodule (Submodule, or ModMatrix column span)."""
    if isinstance(S, Submodule):
        ring, ambient, res = S.ring, S.ambient, S.basis()
    else:
        ring, ambient = S.ring, S.cod
        res = matrix_gb(S, witness=False)
    eng = _nf_engine(ring, ambient, res)
    was_poly = isinstance(v, Poly)
    vec = _as_vec(v)
    out = eng.reduce(vec, full=True)
    if was_poly:
        return Poly(v.ring, {e: c for (_, e), c in out.items()})
    return out


def syzygies(A: ModMatrix) -> ModMatrix:
    """Matrix whose columns generate ker A."""
    res = matrix_gb(A, witness=True)
    cols = res.syzygies
    degs = []
    for s in cols:
        pos, e = next(iter(s))
        degs.append(sum(e) + A.dom.gen_degrees[pos])
    return ModMatrix(A.ring, A.dom, FreeModule(degs), cols, check=False)


def lift_vector(A: ModMatrix, v: dict) -> dict:
    """x with A x = v, or raise NotInImage."""
    res = matrix_gb(A, witness=True)
    eng = _nf_engine(A.ring, A.cod, res, A.dom.gen_degrees, combined=True)
    f = eng.reduce(dict(v), full=True)
    r = A.cod.rank
    p = A.ring.p
    if any(k[0] < r for k in f):
        raise NotInImage("vector is not in the column span")
    return {(k[0] - r, k[1]): (-c) % p for k, c in f.items()}


def lift(A: ModMatrix, B: ModMatrix) -> ModMatrix:
    """X with A X = B."""
    if A.cod != B.cod:
        raise ValueError("lift needs a common codomain")
    cols = [lift_vector(A, col) for col in B.cols]
    return ModMatrix(A.ring, A.dom, B.dom, cols)


def in_span(A: ModMatrix, v: dict) -> bool:
    res = matrix_gb(A, witness=False)
    eng = _nf_engine(A.ring, A.cod, res)
    return not eng.reduce(dict(v), full=True)


def minimal_generators(A: ModMatrix) -> list:
    """Indices of a minimal generating subset of the columns (homogeneous A)."""
    res = matrix_gb(A, witness=False)
    if res.minimal is None:
        raise InhomogeneousError("minimal generators need homogeneous columns")
    return res.minimal


def ideal_gb(ring: RingSpec, polys, weights=None) -> list:
    gens = [_as_vec(f) for f in polys]
    res = groebner_basis(ring, FreeModule((0,)), gens, gen_degrees=[0] * len(gens)
                         if weights is not None else None, weights=weights)
    return [Poly(ring, {e: c for (_, e), c in g.items()}) for g in res.elements]


def ideals_equal(ring, a, b) -> bool:
    return [f.coeffs for f in ideal_gb(ring, a)] == [f.coeffs for f in ideal_gb(ring, b)]


def elimination_ideal(ring: RingSpec, polys, drop, weights=None):
    """Generators of (polys) ∩ k[kept variables], as polys in the kept ring.

    ``drop`` lists variable names (or indices) to eliminate.  Returns
    ``(kept_ring, generators)``.
    """
    names = ring.var_names
    drop_idx = [names.index(v) if isinstance(v, str) else v for v in drop]
    keep_idx = [i for i in range(len(names)) if i not in drop_idx]
    perm = drop_idx + keep_idx
    elim_ring = RingSpec(ring.p, [names[i] for i in perm], ("elim", len(drop_idx)))
    moved = []
    for f in polys:
        moved.append(Poly(elim_ring, {tuple(e[i] for i in perm): c for e, c in f.coeffs.items()}))
    w = None if weights is None else tuple(weights[i] for i in perm)
    gb = ideal_gb(elim_ring, moved, weights=w)
    k = len(drop_idx)
    kept_ring = RingSpec(ring.p, [names[i] for i in keep_idx], ring.order
                         if not isinstance(ring.order, tuple) else "grevlex")
    out = []
    for g in gb:
        if all(all(x == 0 for x in e[:k]) for e in g.coeffs):
            out.append(Poly(kept_ring, {e[k:]: c for e, c in g.coeffs.items()}))
    return kept_ring, out


def bracket_power(polys, e: int = 1):
    """Generators of I^[p^e]: p^e-th powers of the generators."""
    return [f.frobenius(e) for f in polys]
