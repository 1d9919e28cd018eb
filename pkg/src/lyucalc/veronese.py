"""d-uple re-embeddings of Proj(R/I)."""

from __future__ import annotations

from .groebner import elimination_ideal, ideal_gb
from .polyring import Poly, RingSpec, monomials_of_degree


def _fresh_names(count, taken, stem="y"):
    names = []
    k = 0
    while len(names) < count:
        name = f"{stem}{k}"
        if name not in taken:
            names.append(name)
        k += 1
    return names


def veronese_monomials(nvars: int, d: int):
    """Degree-d exponent vectors in descending lex order; y_k maps to the k-th."""
    return list(monomials_of_degree(nvars, d, "lex"))


def veronese_ideal(ring: RingSpec, polys, d: int):
    """Kernel of k[y] -> R/I, y_k -> k-th degree-d monomial.

    Returns ``(target_ring, generators)``.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    mons = veronese_monomials(ring.nvars, d)
    ynames = _fresh_names(len(mons), set(ring.var_names))
    big = RingSpec(ring.p, list(ring.var_names) + ynames)
    nx = ring.nvars
    gens = []
    for f in polys:
        if f.is_zero():
            continue
        gens.append(Poly(big, {e + (0,) * len(mons): c for e, c in f.coeffs.items()}))
    for k, m in enumerate(mons):
        y = [0] * len(mons)
        y[k] = 1
        gens.append(Poly(big, {(0,) * nx + tuple(y): 1, tuple(m) + (0,) * len(mons): -1}))
    weights = (1,) * nx + (d,) * len(mons)
    kept_ring, J = elimination_ideal(big, gens, list(ring.var_names), weights=weights)
    target = RingSpec(ring.p, ynames)
    J = [Poly(target, f.coeffs) for f in J]
    return target, J


def substitute_monomials(f: Poly, ring: RingSpec, mons) -> Poly:
    """f(y_k -> m_k) as a polynomial of ``ring``."""
    out = {}
    p = ring.p
    for e, c in f.coeffs.items():
        m = [0] * ring.nvars
        for k, x in enumerate(e):
            if x:
                for v in range(ring.nvars):
                    m[v] += x * mons[k][v]
        t = tuple(m)
        out[t] = (out.get(t, 0) + c) % p
    return Poly(ring, out)
