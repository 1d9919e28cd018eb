"""Frobenius pullback of matrices and complexes, and the p-linear map on E^{i,j}.

Grading conventions: the pullback of R(-d) is R(-p d), so pulling back a
matrix raises entries to the p-th power and multiplies all twists by p.
Hom(F^*P, Ω) agrees with F^*(Hom(P, Ω)) up to a twist by (p-1)N, N the
number of variables; this shift enters once for each of the two Ext layers
and cancels in the final map, which the code checks rather than assumes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import InhomogeneousError, NotInImage, PipelineAssertion, TwistMismatch
from .extcalc import DoubleExtData, Layer, double_ext_data, lift_chain_map
from .groebner import ideals_equal, bracket_power
from .homology import ChainComplex, HomologyPiece, free_resolution
from .linalg import PLinearEndo
from .polyring import FreeModule, ModMatrix, Poly, RingSpec, frobenius_vec


def fstar_matrix(A: ModMatrix, e: int = 1) -> ModMatrix:
    return A.frobenius(e)


def fstar_complex(C: ChainComplex, e: int = 1) -> ChainComplex:
    return C.frobenius(e)


@dataclass
class FrobeniusLift:
    """Chain map c: F^*P -> P over R/I^[p] -> R/I."""

    source: ChainComplex
    target: ChainComplex
    maps: list

    def check(self):
        for t in range(1, len(self.maps)):
            lhs = self.target.out_map(t) @ self.maps[t]
            rhs = self.maps[t - 1] @ self.source.out_map(t)
            if not (lhs - rhs).is_zero():
                raise PipelineAssertion(f"Frobenius lift fails to commute at spot {t}")
        return True


def frobenius_root_map(P: ChainComplex, e: int = 1) -> FrobeniusLift:
    """Lift of R/I^[p^e] -> R/I to F^{e*}P -> P; c_0 is the identity of R."""
    src = P.frobenius(e)
    ring = P.ring
    c0 = ModMatrix.identity(ring, P.module(0))
    c0 = ModMatrix(ring, P.module(0), src.module(0), c0.cols)
    maps = lift_chain_map(src, P, c0)
    return FrobeniusLift(src, P, maps)


def _coords_matrix(cols, cod: FreeModule, dom: FreeModule, ring) -> ModMatrix:
    try:
        return ModMatrix(ring, cod, dom, cols)
    except InhomogeneousError as exc:
        raise TwistMismatch(f"induced map is not degree preserving: {exc}") from exc


class FrobeniusData:
    """Everything needed for the p-linear map on E^{i,j} for one ideal."""

    def __init__(self, data: DoubleExtData):
        self.data = data
        self.ring = data.ring
        self.p = data.ring.p
        self.N = data.N
        self.shift = (self.p - 1) * self.N
        self._lift = None
        self._q = {}

    def root_lift(self) -> FrobeniusLift:
        if self._lift is None:
            self._lift = frobenius_root_map(self.data.P)
            self._lift.check()
        return self._lift

    def u0(self, j) -> ModMatrix:
        """T -> T' on generators, T' = Ext^{N-j}(R/I^[p], Ω) presented on F(cycles)."""
        L = self.data.layer(j)
        T = L.T
        s1 = self.N - j
        ring = self.ring
        gens_T = FreeModule(T.gen_degrees)
        gens_Tp = FreeModule(tuple(self.p * g - self.shift for g in T.gen_degrees))
        if T.ngens == 0:
            return ModMatrix.zero(ring, gens_Tp, gens_T)
        c = self.root_lift().maps
        if s1 >= len(c):
            raise PipelineAssertion("Frobenius lift too short")
        cT = c[s1].transpose(self.N)
        # presentation of T': Frobenius image of [cycles | boundaries], twisted
        stack = T.stack().frobenius().twist(self.shift)
        if stack.cod != cT.cod:
            raise TwistMismatch(f"ambient twists disagree: {stack.cod.gen_degrees} vs {cT.cod.gen_degrees}")
        from .groebner import lift_vector
        cols = []
        ng = T.ngens
        for z in T.cycles.cols:
            v = cT.apply(z)
            x = lift_vector(stack, v)
            cols.append({k: c for k, c in x.items() if k[0] < ng})
        return _coords_matrix(cols, gens_Tp, gens_T, ring)

    def q_maps(self, j):
        """Chain lift q: Q -> twisted F^*Q of u0."""
        if j not in self._q:
            L = self.data.layer(j)
            Qp = L.Q.frobenius().twist(self.shift)
            u = self.u0(j)
            if u.cod != Qp.module(0):
                raise TwistMismatch("generator twists of T' do not match F^*Q")
            self._q[j] = lift_chain_map(L.Q, Qp, u)
        return self._q[j]

    def phi_chain(self, i, j) -> ModMatrix:
        """Transpose of q_s at s = N - i, i.e. the map F(Q^*)_s -> Q^*_s."""
        s = self.N - i
        q = self.q_maps(j)
        L = self.data.layer(j)
        if s >= len(q):
            return ModMatrix.zero(self.ring, L.Qd.module(s), L.Qd.module(s).scaled(self.p))
        qT = q[s].transpose(self.N)
        if qT.dom != L.Qd.module(s).scaled(self.p):
            raise TwistMismatch("dual of the pulled back resolution is not F of the dual")
        return qT

    def apply(self, i, j, z: dict) -> dict:
        """Chain-level φ on a cycle z of Hom(Q_s, Ω)."""
        return self.phi_chain(i, j).apply(frobenius_vec(z, self.p))

    def matrix(self, i, j, d=0) -> np.ndarray:
        """φ: E_d -> E_{pd} in the fixed homology bases."""
        src = self.data.piece(i, j, d)
        tgt = self.data.piece(i, j, self.p * d)
        out = linalg.zeros(tgt.dim, src.dim)
        for k, z in enumerate(src.rep_vectors()):
            img = self.apply(i, j, z)
            if img and not tgt.is_cycle(img):
                raise PipelineAssertion("image of a cycle is not a cycle")
            out[:, k] = tgt.coordinates(img).ravel()
        return out


_FROB: dict = {}


def frobenius_data(data: DoubleExtData) -> FrobeniusData:
    fd = _FROB.get(id(data))
    if fd is None or fd.data is not data:
        fd = FrobeniusData(data)
        _FROB[id(data)] = fd
        if len(_FROB) > 64:
            _FROB.pop(next(iter(_FROB)))
    return fd


@dataclass
class PhiStructure:
    ring: RingSpec
    i: int
    j: int
    piece: HomologyPiece
    phi0: PLinearEndo
    witness: FrobeniusData = field(repr=False)
    twist_ledger: dict = field(default_factory=dict)

    def apply(self, z: dict) -> dict:
        return self.witness.apply(self.i, self.j, z)


def build_phi(ring: RingSpec, polys, i, j, minimize=True, cache=None) -> PhiStructure:
    data = double_ext_data(ring, polys, minimize, cache)
    fd = frobenius_data(data)
    piece = data.piece(i, j, 0)
    if piece.dim == 0:
        M = linalg.zeros(0, 0)
    else:
        M = fd.matrix(i, j, 0)
    ledger = {
        "omega_twist_per_layer": fd.shift,
        "layers": 2,
        # first layer: T' carries +shift; second: the dual of F^*Q shifted back
        "net_degree_shift": 0,
    }
    return PhiStructure(ring, i, j, piece, PLinearEndo(M, ring.p), fd, ledger)


def phi_on_bracket_tower(ring: RingSpec, polys, i, j, e, minimize=True) -> np.ndarray:
    """Matrix of E^{i,j}(R/I^[p^e])_0 -> E^{i,j}(R/I)_0 induced by the surjection.

    Computed from a fresh resolution of R/I^[p^e]; columns use that module's
    own degree-0 basis, rows the fixed basis of E^{i,j}(R/I)_0.
    """
    N = ring.nvars
    data_I = double_ext_data(ring, polys, minimize)
    J = [f for f in bracket_power(polys, e)]
    data_J = double_ext_data(ring, J, minimize)
    tgt_piece = data_I.piece(i, j, 0)
    src_piece = data_J.piece(i, j, 0)
    if tgt_piece.dim == 0 or src_piece.dim == 0:
        return linalg.zeros(tgt_piece.dim, src_piece.dim)
    # R/J -> R/I lifted to resolutions, identity on spot 0
    PI, PJ = data_I.P, data_J.P
    g0 = ModMatrix(ring, PI.module(0), PJ.module(0), ModMatrix.identity(ring, PI.module(0)).cols)
    gam = lift_chain_map(PJ, PI, g0)
    s1 = N - j
    LI, LJ = data_I.layer(j), data_J.layer(j)
    gT = gam[s1].transpose(N) if s1 < len(gam) else None
    from .groebner import lift_vector
    cols = []
    for z in LI.T.cycles.cols:
        v = gT.apply(z) if gT is not None else {}
        x = lift_vector(LJ.T.stack(), v) if v else {}
        cols.append({k: c for k, c in x.items() if k[0] < LJ.T.ngens})
    h0 = _coords_matrix(cols, FreeModule(LJ.T.gen_degrees), FreeModule(LI.T.gen_degrees), ring)
    h = lift_chain_map(LI.Q, LJ.Q, h0)
    s = N - i
    out = linalg.zeros(tgt_piece.dim, src_piece.dim)
    if s >= len(h):
        return out
    hT = h[s].transpose(N)
    for k, z in enumerate(src_piece.rep_vectors()):
        out[:, k] = tgt_piece.coordinates(hT.apply(z)).ravel()
    return out


def random_homogeneous(ring: RingSpec, d: int, rng: random.Random) -> Poly:
    from .polyring import monomials_of_degree
    mons = monomials_of_degree(ring.nvars, d)
    return Poly(ring, {m: rng.randrange(ring.p) for m in mons})


def check_p_linearity(ring, polys, i, j, d, trials, rng: random.Random, minimize=True):
    """Randomized chain-level checks; returns the number of failures.

    For a random cycle z of degree d (basis combination plus a random
    boundary) and random homogeneous r, φ(r z) - r^p φ(z) must be a
    boundary, and φ(z + b) - φ(z) must be a boundary for boundaries b.
    """
    data = double_ext_data(ring, polys, minimize)
    fd = frobenius_data(data)
    L = data.layer(j)
    s = data.N - i
    p = ring.p
    failures = 0
    src = data.piece(i, j, d)
    if src.dim == 0 and src._bbasis.shape[1] == 0:
        return 0
    from .polyring import array_to_vec, mul_vec, vec_add
    for _ in range(trials):
        coeffs = np.array([rng.randrange(p) for _ in range(src.dim)], dtype=np.int64)
        z = src.reps @ coeffs % p if src.dim else np.zeros(len(src.basis), dtype=np.int64)
        if src._bbasis.shape[1]:
            b = np.array([rng.randrange(p) for _ in range(src._bbasis.shape[1])], dtype=np.int64)
            bvec = src._bbasis @ b % p
        else:
            bvec = np.zeros(len(src.basis), dtype=np.int64)
        zv = array_to_vec(z, src.basis)
        bv = array_to_vec(bvec, src.basis)
        delta = rng.randrange(0, 2)
        r = random_homogeneous(ring, delta, rng)
        rz = mul_vec(r.coeffs, zv, p)
        lhs = fd.apply(i, j, rz)
        rhs = mul_vec(r.frobenius().coeffs, fd.apply(i, j, zv), p)
        diff = vec_add(lhs, rhs, p, -1)
        tgt = data.piece(i, j, p * (d + delta))
        if not tgt.is_boundary(diff):
            failures += 1
            continue
        diff2 = vec_add(fd.apply(i, j, vec_add(zv, bv, p)), fd.apply(i, j, zv), p, -1)
        tgt0 = data.piece(i, j, p * d)
        if not tgt0.is_boundary(diff2):
            failures += 1
    return failures


def degree_scaling_ok(ring, polys, i, j, d, minimize=True) -> bool:
    """Every basis element of E_d maps to a homogeneous cycle of degree p*d."""
    data = double_ext_data(ring, polys, minimize)
    fd = frobenius_data(data)
    src = data.piece(i, j, d)
    L = data.layer(j)
    Fmod = L.Qd.module(data.N - i)
    for z in src.rep_vectors():
        img = fd.apply(i, j, z)
        if not img:
            continue
        degs = {sum(e) + Fmod.gen_degrees[pos] for pos, e in img}
        if degs != {ring.p * d}:
            return False
        tgt = data.piece(i, j, ring.p * d)
        if not tgt.is_cycle(img):
            return False
    return True


def cartier_on_ext0(ring: RingSpec, polys, j, minimize=True) -> np.ndarray:
    """p^{-1}-linear map on Ext^{N-j}(R/I, Ω)_0 read off from the root lift.

    u sends a degree-0 generator of T to a combination of Frobenius images of
    generators with polynomial coefficients of degree (p-1)N; keeping only
    the coefficient of (x_0...x_n)^{p-1} gives a map T_0 -> T_0.  By local
    duality this is the transpose of the Frobenius action on H^j_m(R/I)_0,
    so for a plane cubic it is multiplication by the Hasse invariant.
    """
    data = double_ext_data(ring, polys, minimize)
    fd = frobenius_data(data)
    p = ring.p
    L = data.layer(j)
    T = L.T
    G = FreeModule(T.gen_degrees)
    basis_pairs = T.graded_piece(0)
    # degree-0 basis as coefficient vectors on generators
    from .polyring import graded_piece_basis
    gb = graded_piece_basis(G, 0, ring.nvars)
    index = {b: k for k, b in enumerate(gb)}
    rel = T.relations.degree_matrix(0, dst=index) if gb else linalg.zeros(0, 0)
    reps = []
    for coeff, _ in basis_pairs:
        arr = np.zeros(len(gb), dtype=np.int64)
        for key, c in coeff.items():
            arr[index[key]] = c
        reps.append(arr)
    if not reps:
        return linalg.zeros(0, 0)
    R = np.array(reps, dtype=np.int64).T
    u = fd.u0(j)
    top = tuple([p - 1] * ring.nvars)
    out = linalg.zeros(len(reps), len(reps))
    for k, arr in enumerate(reps):
        img = {}
        for idx, c in enumerate(arr):
            if not c:
                continue
            pos, m = gb[idx]
            for (r, e), v in u.cols[pos].items():
                ee = tuple(a + b for a, b in zip(e, m))
                if all((x - (p - 1)) % p == 0 and x >= p - 1 for x in ee):
                    root = tuple((x - (p - 1)) // p for x in ee)
                    key = (r, root)
                    img[key] = (img.get(key, 0) + c * v) % p
        vec = np.zeros(len(gb), dtype=np.int64)
        for key, c in img.items():
            if key in index:
                vec[index[key]] = c
        M = np.hstack([rel, R]) if rel.size else R
        coeffs = linalg.solve_in_span(M, vec, p)
        out[:, k] = coeffs[rel.shape[1] if rel.size else 0:].ravel()
    return out
