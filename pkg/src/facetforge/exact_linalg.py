"""Exact rational linear algebra on tuples of fractions.Fraction.

Vectors are tuples of Fraction, matrices are tuples of row tuples.  Every
operation here is exact; floating point never enters.  Rank runs on a
fraction-free (Bareiss) integer elimination to keep coefficient growth in
check; basis extraction uses plain Fraction row reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

Rational = Fraction
RVector = tuple[Fraction, ...]
RMatrix = tuple[RVector, ...]


def rvector(entries) -> RVector:
    return tuple(Fraction(e) for e in entries)


def rmatrix(rows) -> RMatrix:
    out = tuple(tuple(Fraction(e) for e in row) for row in rows)
    if out and any(len(row) != len(out[0]) for row in out):
        raise ValueError("matrix rows have unequal lengths")
    return out


def zero_vector(n: int) -> RVector:
    return (Fraction(0),) * n


def unit_vector(i: int, n: int) -> RVector:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def identity_matrix(n: int) -> RMatrix:
    return tuple(unit_vector(i, n) for i in range(n))


def dot(u: RVector, v: RVector) -> Fraction:
    if len(u) != len(v):
        raise ValueError("dimension mismatch in dot product")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def mat_vec(m: RMatrix, v: RVector) -> RVector:
    return tuple(dot(row, v) for row in m)


def vec_add(u: RVector, v: RVector) -> RVector:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: RVector, v: RVector) -> RVector:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v: RVector) -> RVector:
    c = Fraction(c)
    return tuple(c * a for a in v)


def transpose(m: RMatrix) -> RMatrix:
    return tuple(zip(*m)) if m else ()


def is_zero_matrix(m: RMatrix) -> bool:
    return all(e == 0 for row in m for e in row)


def is_symmetric(m: RMatrix) -> bool:
    n = len(m)
    return all(m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n))


def _integer_rows(m: RMatrix) -> list[list[int]]:
    # Row scaling by the denominator lcm preserves rank and null space.
    out = []
    for row in m:
        scale = lcm(*(e.denominator for e in row)) if row else 1
        out.append([int(e * scale) for e in row])
    return out


def rank(m: RMatrix) -> int:
    """Rank by fraction-free Bareiss elimination over the integers."""
    rows = _integer_rows(m)
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    r = 0
    prev = 1
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            fi = rows[i][c]
            for j in range(c, ncols):
                rows[i][j] = (piv * rows[i][j] - fi * rows[r][j]) // prev
        prev = piv
        r += 1
    return r


def _rref(m, ncols: int):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    rows = [[Fraction(e) for e in row] for row in m]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][c]
        rows[r] = [e / inv for e in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of Q^n given by a tuple of independent basis vectors."""

    ambient_dim: int
    basis: tuple[RVector, ...]

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(rvector(b) for b in self.basis))
        if any(len(b) != self.ambient_dim for b in self.basis):
            raise ValueError("basis vector length differs from ambient dimension")
        if self.basis and rank(self.basis) != len(self.basis):
            raise ValueError("basis vectors are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: RVector) -> bool:
        if len(v) != self.ambient_dim:
            raise ValueError("vector dimension differs from ambient dimension")
        if all(e == 0 for e in v):
            return True
        if not self.basis:
            return False
        return rank(self.basis + (rvector(v),)) == len(self.basis)


def full_space(n: int) -> Subspace:
    return Subspace(n, identity_matrix(n))


def null_space_basis(m: RMatrix, ambient_dim: int | None = None) -> Subspace:
    """Basis of {x : m x = 0}.  ambient_dim is required when m has no rows."""
    if m:
        ambient_dim = len(m[0])
    elif ambient_dim is None:
        raise ValueError("ambient_dim required for an empty matrix")
    rows, pivots = _rref(m, ambient_dim)
    free = [c for c in range(ambient_dim) if c not in pivots]
    basis = []
    for c in free:
        v = [Fraction(0)] * ambient_dim
        v[c] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][c]
        basis.append(tuple(v))
    return Subspace(ambient_dim, tuple(basis))


def row_space_matrix(s: Subspace) -> RMatrix:
    return tuple(s.basis)


def orthogonal_complement(s: Subspace) -> Subspace:
    return null_space_basis(row_space_matrix(s), s.ambient_dim)


def intersect_subspaces(subspaces, ambient_dim: int | None = None) -> Subspace:
    """Intersection of subspaces; the empty list yields the full space."""
    subspaces = list(subspaces)
    if not subspaces:
        if ambient_dim is None:
            raise ValueError("ambient_dim required to intersect an empty list")
        return full_space(ambient_dim)
    n = subspaces[0].ambient_dim
    if any(s.ambient_dim != n for s in subspaces):
        raise ValueError("subspaces live in different ambient dimensions")
    constraint_rows: list[RVector] = []
    for s in subspaces:
        constraint_rows.extend(orthogonal_complement(s).basis)
    return null_space_basis(tuple(constraint_rows), n)


def solve_linear(m: RMatrix, b: RVector) -> RVector | None:
    """One particular solution of m x = b, or None when inconsistent."""
    if len(m) != len(b):
        raise ValueError("dimension mismatch in linear solve")
    ncols = len(m[0]) if m else 0
    aug = tuple(row + (bi,) for row, bi in zip(m, b))
    rows, pivots = _rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = rows[i][ncols]
    return tuple(x)


def project_onto(v: RVector, s: Subspace) -> RVector:
    """Orthogonal projection of v onto s via exact normal equations."""
    if len(v) != s.ambient_dim:
        raise ValueError("vector dimension differs from ambient dimension")
    if s.dim == 0:
        return zero_vector(s.ambient_dim)
    gram = tuple(tuple(dot(bi, bj) for bj in s.basis) for bi in s.basis)
    rhs = tuple(dot(bi, v) for bi in s.basis)
    coeffs = solve_linear(gram, rhs)
    assert coeffs is not None  # Gram matrix of an independent basis is invertible
    out = zero_vector(s.ambient_dim)
    for c, b in zip(coeffs, s.basis):
        out = vec_add(out, vec_scale(c, b))
    return out


def psd_ldlt(m: RMatrix) -> tuple[bool, tuple[Fraction, ...]]:
    """Exact positive-semidefiniteness test by pivoted LDL^T elimination.

    Walks the diagonal; a positive pivot eliminates its row and column, a
    zero pivot is accepted only when its entire remaining row is zero, and a
    negative pivot (or a zero pivot with a nonzero row) terminates with a
    non-PSD verdict.  Returns (is_psd, pivots), where the last pivot of a
    failed run is the offending diagonal entry.
    """
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("matrix is not square")
    if not is_symmetric(m):
        raise ValueError("matrix is not symmetric")
    s = [[Fraction(e) for e in row] for row in m]
    pivots: list[Fraction] = []
    for k in range(n):
        d = s[k][k]
        if d < 0:
            return False, tuple(pivots + [d])
        if d == 0:
            if any(s[k][j] != 0 for j in range(k + 1, n)):
                return False, tuple(pivots + [d])
            pivots.append(d)
            continue
        pivots.append(d)
        for i in range(k + 1, n):
            if s[i][k] == 0:
                continue
            f = s[i][k] / d
            for j in range(k + 1, n):
                s[i][j] -= f * s[k][j]
    return True, tuple(pivots)
