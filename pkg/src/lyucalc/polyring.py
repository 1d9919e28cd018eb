"""Graded polynomial rings over F_p, graded free modules and homogeneous matrices.

Polynomials are dicts ``{exponent tuple: coefficient}`` wrapped by :class:`Poly`.
Module elements are dicts ``{(position, exponent tuple): coefficient}``; a
:class:`ModMatrix` is a list of such column dicts between two free modules.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InhomogeneousError, ParseError, RingMismatch


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def _order_tag(order):
    if isinstance(order, str):
        if order in ("grevlex", "lex"):
            return order
        m = re.fullmatch(r"elim\((\d+)\)", order)
        if m:
            return ("elim", int(m.group(1)))
    elif isinstance(order, tuple) and len(order) == 2 and order[0] == "elim":
        return ("elim", int(order[1]))
    raise ValueError(f"unknown monomial order {order!r}")


@dataclass(frozen=True)
class RingSpec:
    p: int
    var_names: tuple
    order: object = "grevlex"

    def __post_init__(self):
        object.__setattr__(self, "var_names", tuple(self.var_names))
        object.__setattr__(self, "order", _order_tag(self.order))
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if len(set(self.var_names)) != len(self.var_names) or not self.var_names:
            raise ValueError("variable names must be distinct and nonempty")

    @property
    def nvars(self) -> int:
        return len(self.var_names)

    @property
    def n(self) -> int:
        # projective dimension of the ambient space
        return len(self.var_names) - 1

    def with_order(self, order) -> "RingSpec":
        return RingSpec(self.p, self.var_names, order)

    def key(self, exps):
        return monomial_key(self.order, exps)

    def zero(self):
        return Poly(self, {})

    def one(self):
        return Poly(self, {(0,) * self.nvars: 1})

    def var(self, i):
        if isinstance(i, str):
            i = self.var_names.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return Poly(self, {tuple(e): 1})

    def parse(self, text, line=None):
        return parse_poly(self, text, line=line)


_KEY_CACHE: dict = {}


def monomial_key(order, exps):
    """Sort key for an exponent tuple; larger key means larger monomial."""
    ck = (order, exps)
    k = _KEY_CACHE.get(ck)
    if k is not None:
        return k
    if order == "grevlex":
        k = (sum(exps),) + tuple(-e for e in reversed(exps))
    elif order == "lex":
        k = exps
    else:
        b = order[1]
        head, tail = exps[:b], exps[b:]
        k = ((sum(head),) + tuple(-e for e in reversed(head))
             + (sum(tail),) + tuple(-e for e in reversed(tail)))
    if len(_KEY_CACHE) > 500_000:
        _KEY_CACHE.clear()
    _KEY_CACHE[ck] = k
    return k


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def mono_div(b, a):
    return tuple(y - x for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def add_into(target: dict, src: dict, coeff: int, shift, p: int):
    """target += coeff * x^shift * src for module elements (in place)."""
    for (pos, e), c in src.items():
        k2 = (pos, tuple(x + y for x, y in zip(e, shift)))
        v = (target.get(k2, 0) + coeff * c) % p
        if v:
            target[k2] = v
        else:
            del target[k2]


def dict_mul(f: dict, g: dict, p: int) -> dict:
    out: dict = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = mono_mul(e1, e2)
            v = (out.get(e, 0) + c1 * c2) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


class Poly:
    """Element of F_p[x_0..x_n]; immutable after construction."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: RingSpec, coeffs=None):
        self.ring = ring
        p = ring.p
        clean = {}
        for e, c in (coeffs or {}).items():
            c %= p
            if c:
                clean[tuple(e)] = c
        self.coeffs = clean

    def _check(self, other):
        if not isinstance(other, Poly):
            other = Poly(self.ring, {(0,) * self.ring.nvars: int(other)})
        elif other.ring.p != self.ring.p or other.ring.var_names != self.ring.var_names:
            raise RingMismatch("polynomials live in different rings")
        return other

    def terms(self):
        """(exponents, coefficient) pairs, leading term first."""
        return sorted(self.coeffs.items(), key=lambda t: self.ring.key(t[0]), reverse=True)

    def leading_term(self):
        if not self.coeffs:
            return None
        return max(self.coeffs.items(), key=lambda t: self.ring.key(t[0]))

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        """Common degree of all terms; None for 0; raises if inhomogeneous."""
        degs = {sum(e) for e in self.coeffs}
        if not degs:
            return None
        if len(degs) > 1:
            raise InhomogeneousError(f"{self} is not homogeneous")
        return degs.pop()

    def is_homogeneous(self):
        return len({sum(e) for e in self.coeffs}) <= 1

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        return Poly(self.ring, dict_mul(self.coeffs, other.coeffs, self.ring.p))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c: int):
        return Poly(self.ring, {e: c * v for e, v in self.coeffs.items()})

    def frobenius(self, e: int = 1):
        q = self.ring.p ** e
        # coefficients: c^p = c on F_p
        return Poly(self.ring, {tuple(q * x for x in m): c for m, c in self.coeffs.items()})

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly(self.ring, {(0,) * self.ring.nvars: other})
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring.p == other.ring.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        return format_poly(self.coeffs, self.ring)


def poly_add(f: Poly, g: Poly) -> Poly:
    return f + g


def poly_mul(f: Poly, g: Poly) -> Poly:
    return f * g


def poly_scale(f: Poly, c: int) -> Poly:
    return f.scale(c)


def frobenius_poly(f: Poly, e: int = 1) -> Poly:
    return f.frobenius(e)


def format_monomial(e, names):
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_poly(coeffs: dict, ring: RingSpec) -> str:
    if not coeffs:
        return "0"
    out = []
    for e, c in sorted(coeffs.items(), key=lambda t: ring.key(t[0]), reverse=True):
        m = format_monomial(e, ring.var_names)
        if not m:
            out.append(str(c))
        elif c == 1:
            out.append(m)
        else:
            out.append(f"{c}*{m}")
    return " + ".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def parse_poly(ring: RingSpec, text: str, line=None) -> Poly:
    """Parse ``c*x0^a*x1^b + ...``.  Columns in errors are 1-based."""
    tokens = []
    for m in _TOKEN.finditer(text):
        if m.group(0).strip() == "":
            continue
        col = m.start(m.lastindex) + 1
        if m.group(1) is not None:
            tokens.append(("num", int(m.group(1)), col))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), col))
        else:
            tokens.append(("sym", m.group(3), col))
    if not tokens:
        raise ParseError("empty polynomial", line, 1)
    names = {v: i for i, v in enumerate(ring.var_names)}
    nv = ring.nvars
    coeffs: dict = {}
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def fail(msg, tok=None):
        col = tok[2] if tok else len(text) + 1
        raise ParseError(msg, line, col)

    sign = 1
    expect_term = True
    while True:
        tok = peek()
        if tok and tok[0] == "sym" and tok[1] in "+-":
            if tok[1] == "-":
                sign = -sign
            pos += 1
            continue
        if tok is None:
            fail("expected a term")
        # one term: factors joined by '*'
        coef = 1
        exps = [0] * nv
        while True:
            tok = peek()
            if tok is None:
                fail("expected a factor")
            if tok[0] == "num":
                coef *= tok[1]
                pos += 1
            elif tok[0] == "name":
                if tok[1] not in names:
                    fail(f"unknown variable {tok[1]!r}", tok)
                idx = names[tok[1]]
                pos += 1
                k = 1
                nxt = peek()
                if nxt and nxt[0] == "sym" and nxt[1] == "^":
                    pos += 1
                    ex = peek()
                    if ex is None or ex[0] != "num":
                        fail("exponent must be a nonnegative integer", ex)
                    k = ex[1]
                    pos += 1
                exps[idx] += k
            else:
                fail(f"unexpected {tok[1]!r}", tok)
            nxt = peek()
            if nxt and nxt[0] == "sym" and nxt[1] == "*":
                pos += 1
                continue
            break
        e = tuple(exps)
        coeffs[e] = coeffs.get(e, 0) + sign * coef
        sign = 1
        expect_term = False
        nxt = peek()
        if nxt is None:
            break
        if nxt[0] == "sym" and nxt[1] in "+-":
            expect_term = True
            continue
        fail(f"unexpected {nxt[1]!r}", nxt)
    assert not expect_term
    return Poly(ring, coeffs)


@lru_cache(maxsize=4096)
def monomials_of_degree(nvars: int, d: int, order="grevlex"):
    """All exponent tuples of total degree d, largest first in ``order``."""
    if d < 0:
        return ()
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=lambda e: monomial_key(order, e), reverse=True)
    return tuple(out)


@dataclass(frozen=True)
class FreeModule:
    """Direct sum of R(-d) over the entries d of gen_degrees."""

    gen_degrees: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "gen_degrees", tuple(int(d) for d in self.gen_degrees))

    @property
    def rank(self) -> int:
        return len(self.gen_degrees)

    def twist(self, t: int) -> "FreeModule":
        return FreeModule(tuple(d - t for d in self.gen_degrees))

    def scaled(self, q: int) -> "FreeModule":
        return FreeModule(tuple(q * d for d in self.gen_degrees))

    def __add__(self, other: "FreeModule") -> "FreeModule":
        return FreeModule(self.gen_degrees + other.gen_degrees)


def twist(obj, t: int):
    """F(t) for a free module or matrix: generator degrees drop by t."""
    return obj.twist(t)


def graded_piece_basis(F: FreeModule, d: int, nvars: int, order="grevlex"):
    """Basis of F_d as (generator index, exponent tuple) pairs."""
    out = []
    for i, gd in enumerate(F.gen_degrees):
        for m in monomials_of_degree(nvars, d - gd, order):
            out.append((i, m))
    return out


def piece_index(F: FreeModule, d: int, nvars: int):
    basis = graded_piece_basis(F, d, nvars)
    return basis, {b: k for k, b in enumerate(basis)}


def element_degree(vec: dict, F: FreeModule):
    degs = {sum(e) + F.gen_degrees[pos] for (pos, e) in vec}
    if not degs:
        return None
    if len(degs) > 1:
        raise InhomogeneousError("module element is not homogeneous")
    return degs.pop()


def frobenius_vec(vec: dict, q: int) -> dict:
    return {(pos, tuple(q * x for x in e)): c for (pos, e), c in vec.items()}


def scale_vec(vec: dict, c: int, p: int) -> dict:
    c %= p
    if not c:
        return {}
    return {k: (v * c) % p for k, v in vec.items()}


def mul_vec(f: dict, vec: dict, p: int) -> dict:
    """Polynomial dict times module element."""
    out: dict = {}
    for m, c in f.items():
        add_into(out, vec, c, m, p)
    return out


def vec_add(a: dict, b: dict, p: int, cb: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        w = (out.get(k, 0) + cb * v) % p
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


class ModMatrix:
    """Homogeneous matrix cod <- dom; column s is a dict {(row, exps): coeff}.

    Entry (r, s) must be homogeneous of degree dom[s] - cod[r].
    """

    __slots__ = ("ring", "dom", "cod", "cols", "_gb", "_origin", "__weakref__")

    def __init__(self, ring: RingSpec, cod: FreeModule, dom: FreeModule, cols, check=True):
        self.ring = ring
        self.cod = cod
        self.dom = dom
        p = ring.p
        cleaned = []
        for col in cols:
            cleaned.append({k: v % p for k, v in col.items() if v % p})
        if len(cleaned) != dom.rank:
            raise ValueError(f"{len(cleaned)} columns for a rank {dom.rank} domain")
        self.cols = cleaned
        self._gb = {}
        self._origin = None
        if check:
            self.check_homogeneous()

    def check_homogeneous(self):
        cd = self.cod.gen_degrees
        for s, col in enumerate(self.cols):
            target = self.dom.gen_degrees[s]
            for (r, e) in col:
                if r >= len(cd) or r < 0:
                    raise ValueError("row index out of range")
                if sum(e) + cd[r] != target:
                    raise InhomogeneousError(
                        f"entry ({r},{s}) has degree {sum(e)}, expected {target - cd[r]}")

    @classmethod
    def from_entries(cls, ring, cod, dom, entries):
        """Build from a row-major nested list of Poly/int/str."""
        cols = [dict() for _ in range(dom.rank)]
        for r, row in enumerate(entries):
            for s, f in enumerate(row):
                if isinstance(f, str):
                    f = ring.parse(f)
                elif isinstance(f, int):
                    f = Poly(ring, {(0,) * ring.nvars: f})
                for e, c in f.coeffs.items():
                    cols[s][(r, e)] = c
        return cls(ring, cod, dom, cols)

    @classmethod
    def identity(cls, ring, F: FreeModule):
        z = (0,) * ring.nvars
        return cls(ring, F, F, [{(i, z): 1} for i in range(F.rank)], check=False)

    @classmethod
    def zero(cls, ring, cod: FreeModule, dom: FreeModule):
        return cls(ring, cod, dom, [{} for _ in range(dom.rank)], check=False)

    @property
    def shape(self):
        return (self.cod.rank, self.dom.rank)

    def entry(self, r, s) -> Poly:
        return Poly(self.ring, {e: c for (row, e), c in self.cols[s].items() if row == r})

    def entries(self):
        return [[self.entry(r, s) for s in range(self.dom.rank)] for r in range(self.cod.rank)]

    def is_zero(self):
        return all(not c for c in self.cols)

    def __matmul__(self, other: "ModMatrix") -> "ModMatrix":
        if self.ring.p != other.ring.p:
            raise RingMismatch("matrices over different rings")
        if self.dom != other.cod:
            raise ValueError("shape/degree mismatch in composition")
        p = self.ring.p
        cols = []
        for col in other.cols:
            out: dict = {}
            for (r, e), c in col.items():
                add_into(out, self.cols[r], c, e, p)
            cols.append(out)
        return ModMatrix(self.ring, self.cod, other.dom, cols, check=False)

    def apply(self, vec: dict) -> dict:
        p = self.ring.p
        out: dict = {}
        for (r, e), c in vec.items():
            add_into(out, self.cols[r], c, e, p)
        return out

    def __add__(self, other):
        if self.dom != other.dom or self.cod != other.cod:
            raise ValueError("shape mismatch")
        p = self.ring.p
        return ModMatrix(self.ring, self.cod, self.dom,
                         [vec_add(a, b, p) for a, b in zip(self.cols, other.cols)], check=False)

    def __sub__(self, other):
        p = self.ring.p
        return ModMatrix(self.ring, self.cod, self.dom,
                         [vec_add(a, b, p, -1) for a, b in zip(self.cols, other.cols)], check=False)

    def __neg__(self):
        p = self.ring.p
        return ModMatrix(self.ring, self.cod, self.dom,
                         [scale_vec(c, -1, p) for c in self.cols], check=False)

    def __eq__(self, other):
        if not isinstance(other, ModMatrix):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and self.cols == other.cols

    __hash__ = None

    def transpose(self, twist_by: int = 0) -> "ModMatrix":
        """Transpose as a map Hom(cod, R(-twist_by)) -> Hom(dom, R(-twist_by))."""
        rows = [dict() for _ in range(self.cod.rank)]
        for s, col in enumerate(self.cols):
            for (r, e), c in col.items():
                rows[r][(s, e)] = c
        new_cod = FreeModule(tuple(twist_by - d for d in self.dom.gen_degrees))
        new_dom = FreeModule(tuple(twist_by - d for d in self.cod.gen_degrees))
        return ModMatrix(self.ring, new_cod, new_dom, rows, check=False)

    def twist(self, t: int) -> "ModMatrix":
        m = ModMatrix(self.ring, self.cod.twist(t), self.dom.twist(t), self.cols, check=False)
        m._origin = ("twist", self, t)
        return m

    def frobenius(self, e: int = 1) -> "ModMatrix":
        q = self.ring.p ** e
        m = ModMatrix(self.ring, self.cod.scaled(q), self.dom.scaled(q),
                      [frobenius_vec(c, q) for c in self.cols], check=False)
        m._origin = ("frobenius", self, q)
        return m

    def select_columns(self, idx) -> "ModMatrix":
        idx = list(idx)
        return ModMatrix(self.ring, self.cod,
                         FreeModule(tuple(self.dom.gen_degrees[i] for i in idx)),
                         [self.cols[i] for i in idx], check=False)

    def select_rows(self, idx) -> "ModMatrix":
        idx = list(idx)
        where = {r: k for k, r in enumerate(idx)}
        cols = [{(where[r], e): c for (r, e), c in col.items() if r in where} for col in self.cols]
        return ModMatrix(self.ring, FreeModule(tuple(self.cod.gen_degrees[i] for i in idx)),
                         self.dom, cols, check=False)

    def degree_matrix(self, d: int, src=None, dst=None) -> np.ndarray:
        """Dense F_p matrix of the map dom_d -> cod_d in graded_piece_basis order."""
        nv = self.ring.nvars
        src_basis = src if src is not None else graded_piece_basis(self.dom, d, nv)
        if dst is None:
            dst_basis = graded_piece_basis(self.cod, d, nv)
            dst = {b: k for k, b in enumerate(dst_basis)}
        out = np.zeros((len(dst), len(src_basis)), dtype=np.int64)
        for k, (s, m) in enumerate(src_basis):
            for (r, e), c in self.cols[s].items():
                out[dst[(r, mono_mul(e, m))], k] = c
        return out

    def __repr__(self):
        return f"ModMatrix({self.cod.rank}x{self.dom.rank}, cod={self.cod.gen_degrees}, dom={self.dom.gen_degrees})"

    def pretty(self):
        rows = []
        for row in self.entries():
            rows.append("[" + ", ".join(str(f) for f in row) + "]")
        return "\n".join(rows)


def hstack(*mats: ModMatrix) -> ModMatrix:
    ring = mats[0].ring
    cod = mats[0].cod
    cols = []
    degs = ()
    for m in mats:
        if m.cod != cod:
            raise ValueError("hstack needs a common codomain")
        cols.extend(m.cols)
        degs += m.dom.gen_degrees
    return ModMatrix(ring, cod, FreeModule(degs), cols, check=False)


def vec_to_array(vec: dict, index: dict) -> np.ndarray:
    out = np.zeros(len(index), dtype=np.int64)
    for k, c in vec.items():
        out[index[k]] = c
    return out


def array_to_vec(arr, basis) -> dict:
    return {basis[k]: int(c) for k, c in enumerate(np.asarray(arr).ravel()) if c}
