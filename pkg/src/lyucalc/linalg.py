"""Dense linear algebra over prime fields and p-linear endomorphisms.

Matrices are numpy int64 arrays with entries in [0, p).  Row operations
multiply two residues (< 2**62 for p < 2**31) before reducing, so every
intermediate fits in a signed 64-bit word.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotInSpan

MAX_PRIME = 2**31


def as_matrix(a, p: int, shape=None) -> np.ndarray:
    m = np.array(a, dtype=object if p >= MAX_PRIME else np.int64)
    if shape is not None:
        m = m.reshape(shape)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    return (m % p).astype(np.int64)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product mod p without int64 overflow."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[1] if a.ndim == 2 else 1
    if inner == 0:
        return zeros(a.shape[0], b.shape[1])
    if (p - 1) ** 2 * inner < 2**63:
        return (a @ b) % p
    # chunk the inner dimension so partial sums stay in range
    step = max(1, (2**63 - 1) // ((p - 1) ** 2))
    out = zeros(a.shape[0], b.shape[1])
    for k in range(0, inner, step):
        out = (out + (a[:, k:k + step] @ b[k:k + step, :]) % p) % p
    return out


def row_reduce(a: np.ndarray, p: int):
    """Reduced row echelon form of ``a`` over F_p.

    Pivots are chosen column by column from the left; within a column the
    topmost remaining row with a nonzero entry wins.  Returns ``(rref, pivots)``
    where ``pivots`` lists the pivot column indices.
    """
    m = np.array(a, dtype=np.int64) % p
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = pow(int(m[r, c]), -1, p)
        m[r] = (m[r] * inv) % p
        others = np.nonzero(m[:, c])[0]
        others = others[others != r]
        if others.size:
            f = m[others, c].reshape(-1, 1)
            m[others] = (m[others] - f * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(row_reduce(a, p)[1])


def nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Basis of {x : a x = 0} as the columns of the returned matrix."""
    a = np.asarray(a, dtype=np.int64)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return identity(cols)
    rref, pivots = row_reduce(a, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = zeros(cols, len(free))
    for k, fc in enumerate(free):
        basis[fc, k] = 1
        for r, pc in enumerate(pivots):
            basis[pc, k] = (-rref[r, fc]) % p
    return basis


def solve_in_span(basis_cols: np.ndarray, target, p: int) -> np.ndarray:
    """Return c with basis_cols @ c == target, or raise NotInSpan."""
    basis_cols = np.asarray(basis_cols, dtype=np.int64)
    target = np.asarray(target, dtype=np.int64).reshape(-1, 1) % p
    if basis_cols.shape[0] != target.shape[0]:
        raise ValueError("row counts differ")
    n = basis_cols.shape[1]
    aug = np.hstack([basis_cols % p, target])
    rref, pivots = row_reduce(aug, p)
    if n in pivots:
        raise NotInSpan("target is outside the column space")
    c = zeros(n, 1)
    for r, pc in enumerate(pivots):
        c[pc, 0] = rref[r, n]
    return c


def independent_columns(a: np.ndarray, p: int) -> list:
    """Indices of the leftmost maximal set of independent columns."""
    a = np.asarray(a)
    if a.size == 0:
        return []
    return row_reduce(a, p)[1]


@dataclass(frozen=True)
class PLinearEndo:
    """v -> matrix * v^[p] on F_p^dim.

    ``frobenius_exponent`` is the field degree a of F_{p^a}; only a = 1 is
    used, where raising coordinates to the p-th power is the identity.
    """

    matrix: np.ndarray
    p: int
    frobenius_exponent: int = 1

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.int64) % self.p
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("p-linear endomorphism needs a square matrix")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def frobenius_twist(self, m: np.ndarray) -> np.ndarray:
        # coordinatewise x -> x^p; trivial on the prime field
        if self.frobenius_exponent == 1:
            return m
        q = self.p
        return np.vectorize(lambda x: pow(int(x), q, q))(m)

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64).reshape(-1, 1)
        return matmul(self.matrix, self.frobenius_twist(v), self.p)


def semilinear_power(f: PLinearEndo, e: int) -> np.ndarray:
    """Matrix of f^e, i.e. M * M^[p] * ... * M^[p^(e-1)]."""
    if e < 0:
        raise ValueError("e must be nonnegative")
    result = identity(f.dim)
    twisted = f.matrix
    for _ in range(e):
        result = matmul(result, twisted, f.p)
        twisted = f.frobenius_twist(twisted)
    return result


def stable_rank(f: PLinearEndo) -> int:
    """dim of the intersection of the images f^e(V); the chain settles by e = dim."""
    if f.dim == 0:
        return 0
    return rank(semilinear_power(f, f.dim), f.p)
