"""Ext into the canonical module, double Ext modules and induced maps."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import linalg
from .errors import NotInImage, PipelineAssertion
from .groebner import lift, lift_vector
from .homology import (ChainComplex, HomologyPiece, SubquotientPresentation,
                       dualize_into_omega, free_resolution, homology_presentation,
                       ideal_matrix, resolve)
from .polyring import FreeModule, ModMatrix, Poly, RingSpec


@dataclass
class ExtResult:
    """Ext^t(M, Ω) presented inside the dual of a resolution of M."""

    module: SubquotientPresentation
    t: int
    source_resolution: ChainComplex
    dual: ChainComplex

    def piece(self, d: int) -> HomologyPiece:
        return HomologyPiece(self.dual, self.t, d)

    def dim(self, d: int) -> int:
        return self.piece(d).dim


def ext_into_omega(M, t, ring=None, minimize=True, resolution=None) -> ExtResult:
    """Ext^t(M, R(-N)); M is a list of ideal generators, a presentation or a ModMatrix."""
    P = resolution if resolution is not None else free_resolution(M, ring=ring, minimize=minimize)
    D = dualize_into_omega(P)
    H = homology_presentation(D, t, minimize=minimize)
    return ExtResult(H, t, P, D)


def _poly_key(polys):
    return tuple(sorted(tuple(sorted(f.coeffs.items())) for f in polys))


@dataclass
class Layer:
    """T = Ext^{N-j}(R/I, Ω) with its resolution Q and the dual of Q."""

    j: int
    T: SubquotientPresentation
    Q: ChainComplex
    Qd: ChainComplex


class DoubleExtData:
    """Resolutions shared by all double Ext modules of one ideal."""

    def __init__(self, ring: RingSpec, polys, minimize=True, cache=None):
        self.ring = ring
        self.polys = [f for f in polys if not f.is_zero()]
        self.minimize = minimize
        self.N = ring.nvars
        self.P = free_resolution(self.polys, ring=ring, minimize=minimize, cache=cache)
        self.Pd = dualize_into_omega(self.P)
        self._layers = {}
        self._pieces = {}

    def layer(self, j) -> Layer:
        if j not in self._layers:
            T = homology_presentation(self.Pd, self.N - j, minimize=self.minimize)
            Q = resolve(T.relations, minimize=self.minimize)
            self._layers[j] = Layer(j, T, Q, dualize_into_omega(Q))
        return self._layers[j]

    def piece(self, i, j, d) -> HomologyPiece:
        key = (i, j, d)
        if key not in self._pieces:
            self._pieces[key] = HomologyPiece(self.layer(j).Qd, self.N - i, d)
        return self._pieces[key]

    def ext_result(self, i, j) -> ExtResult:
        L = self.layer(j)
        H = homology_presentation(L.Qd, self.N - i, minimize=self.minimize)
        return ExtResult(H, self.N - i, L.Q, L.Qd)


_DATA: dict = {}


def double_ext_data(ring: RingSpec, polys, minimize=True, cache=None) -> DoubleExtData:
    key = (ring, _poly_key(polys), bool(minimize))
    hit = _DATA.get(key)
    if hit is None:
        hit = DoubleExtData(ring, polys, minimize, cache)
        _DATA[key] = hit
        if len(_DATA) > 64:
            _DATA.pop(next(iter(_DATA)))
    return hit


def clear_data_cache():
    _DATA.clear()


def double_ext(ring: RingSpec, polys, i, j, minimize=True) -> ExtResult:
    """E^{i,j}(R/I) = Ext^{N-i}(Ext^{N-j}(R/I, Ω), Ω)."""
    return double_ext_data(ring, polys, minimize).ext_result(i, j)


def lift_chain_map(src: ChainComplex, tgt: ChainComplex, f0: ModMatrix, upto=None):
    """Maps f_t: src_t -> tgt_t with tgt.d_t f_t = f_{t-1} src.d_t, starting from f0."""
    ring = src.ring
    top = src.length if upto is None else min(upto, src.length)
    maps = [f0]
    for t in range(1, top + 1):
        rhs = maps[-1] @ src.out_map(t)
        if tgt.module(t).rank == 0:
            if not rhs.is_zero():
                raise NotInImage(f"chain map cannot be extended past spot {t - 1}")
            maps.append(ModMatrix.zero(ring, tgt.module(t), src.module(t)))
            continue
        maps.append(lift(tgt.out_map(t), rhs))
    for t in range(1, len(maps)):
        if tgt.module(t).rank and not (tgt.out_map(t) @ maps[t] - maps[t - 1] @ src.out_map(t)).is_zero():
            raise PipelineAssertion(f"lifted chain map does not commute at spot {t}")
    return maps


@dataclass
class ExtMap:
    """Chain-level map Ext^t(N, Ω) -> Ext^t(M, Ω) from a module map M -> N."""

    source: ChainComplex      # dual complex computing Ext(N)
    target: ChainComplex      # dual complex computing Ext(M)
    t: int
    chain: ModMatrix          # transpose of the lifted map at spot t

    def apply(self, z: dict) -> dict:
        return self.chain.apply(z)

    def degree_matrix(self, d: int, src_piece=None, tgt_piece=None) -> np.ndarray:
        src_piece = src_piece or HomologyPiece(self.source, self.t, d)
        tgt_piece = tgt_piece or HomologyPiece(self.target, self.t, d)
        out = linalg.zeros(tgt_piece.dim, src_piece.dim)
        for k, z in enumerate(src_piece.rep_vectors()):
            out[:, k] = tgt_piece.coordinates(self.apply(z)).ravel()
        return out


def ext_functorial_map(g: ModMatrix, QM: ChainComplex, QN: ChainComplex, t: int) -> ExtMap:
    """Map on Ext^t(-, Ω) induced by g: coker(QM.d1) -> coker(QN.d1), given on generators.

    Raises NotInImage when g does not respect the relations.
    """
    N = g.ring.nvars
    maps = lift_chain_map(QM, QN, g, upto=t)
    ft = maps[t] if t < len(maps) else ModMatrix.zero(g.ring, QN.module(t), QM.module(t))
    return ExtMap(dualize_into_omega(QN), dualize_into_omega(QM), t, ft.transpose(N))


def local_cohomology_piece_dim(M, j, d, ring=None, minimize=True) -> int:
    """dim H^j_m(M)_d, read off as dim Ext^{N-j}(M, Ω)_{-d}."""
    P = free_resolution(M, ring=ring, minimize=minimize)
    N = P.ring.nvars
    t = N - j
    if t < 0 or t > N:
        return 0
    return HomologyPiece(dualize_into_omega(P), t, -d).dim


def _binom_poly(x, k):
    # binomial coefficient as a polynomial in x (valid for negative x as well)
    num = 1
    for i in range(k):
        num *= (x - i)
    den = 1
    for i in range(1, k + 1):
        den *= i
    return num // den


def hilbert_function_value(P: ChainComplex, d: int) -> int:
    n = P.ring.nvars - 1
    total = 0
    for t, F in enumerate(P.modules):
        for a in F.gen_degrees:
            if d - a >= 0:
                total += (-1) ** t * comb(d - a + n, n)
    return total


def hilbert_polynomial_value(P: ChainComplex, d: int) -> int:
    n = P.ring.nvars - 1
    total = 0
    for t, F in enumerate(P.modules):
        for a in F.gen_degrees:
            total += (-1) ** t * _binom_poly(d - a + n, n)
    return total
