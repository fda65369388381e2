"""Convex quadratic inequalities and systems, with exact classification.

A constraint is f(x) = <Ax, x> + 2<a, x> + alpha <= 0 with A rational
symmetric positive semidefinite.  The solution set of a single such
inequality is one of seven shapes, each with a known facial dimension
signature (n = ambient dimension, m = nullity of A):

    A = 0, a = 0, alpha > 0   empty set
    A = 0, a = 0, alpha <= 0  the whole space, signature {n}
    A = 0, a != 0             halfspace, signature {n-1, n}
    A != 0, a_N = 0, v* > 0   empty set
    A != 0, a_N = 0, v* = 0   affine subspace (point if m = 0), signature {m}
    A != 0, a_N = 0, v* < 0   cylinder over a ball, signature {m, n}
    A != 0, a_N != 0          cylinder over a paraboloid, signature {m-1, n}

where a_N is the component of a in null(A) and v* = alpha + <a, x0> is the
minimum of f, attained at any x0 with A x0 = -a.  Everything here is exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .exact_linalg import (
    RMatrix,
    RVector,
    Subspace,
    dot,
    is_symmetric,
    is_zero_matrix,
    mat_vec,
    null_space_basis,
    project_onto,
    psd_ldlt,
    rmatrix,
    rvector,
    solve_linear,
    vec_scale,
    zero_vector,
)
from .signatures import Signature


@dataclass(frozen=True)
class ConvexQuadratic:
    """One inequality <Ax,x> + 2<a,x> + alpha <= 0 with A symmetric PSD."""

    A: RMatrix
    a: RVector
    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "A", rmatrix(self.A))
        object.__setattr__(self, "a", rvector(self.a))
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        n = len(self.a)
        if len(self.A) != n or any(len(row) != n for row in self.A):
            raise ValueError("matrix shape does not match the linear term")
        if not is_symmetric(self.A):
            raise ValueError("quadratic form matrix must be symmetric")
        ok, _ = psd_ldlt(self.A)
        if not ok:
            raise ValueError("quadratic form matrix is not positive semidefinite")

    @property
    def dim(self) -> int:
        return len(self.a)


def evaluate(q: ConvexQuadratic, x) -> Fraction | float:
    """f(x); exact Fraction for rational input, float otherwise."""
    if len(x) != q.dim:
        raise ValueError("point dimension does not match the constraint")
    if all(isinstance(e, (Fraction, int)) for e in x):
        xr = rvector(x)
        return dot(xr, mat_vec(q.A, xr)) + 2 * dot(q.a, xr) + q.alpha
    xf = [float(e) for e in x]
    total = float(q.alpha)
    for i, row in enumerate(q.A):
        total += xf[i] * sum(float(c) * xj for c, xj in zip(row, xf))
    total += 2.0 * sum(float(c) * xj for c, xj in zip(q.a, xf))
    return total


class QuadraticKind(enum.Enum):
    EMPTY = "empty"
    FULL_SPACE = "full_space"
    SINGLETON = "singleton"
    AFFINE_SUBSPACE = "affine_subspace"
    HALF_SPACE = "half_space"
    CYLINDER_BALL = "cylinder_ball"
    PARABOLOID_CYLINDER = "paraboloid_cylinder"


@dataclass(frozen=True)
class QuadraticClass:
    """Classification result for a single convex quadratic inequality.

    face_directions spans the directions of the (unique) proper face shape
    when one exists: the hyperplane of a halfspace, null(A) for a cylinder
    over a ball, null(A) intersected with the orthogonal complement of the
    null component of a for a cylinder over a paraboloid.  minimizer and
    min_value are set whenever a has no null component.
    """

    kind: QuadraticKind
    nullity: int
    signature: Signature | None
    proper_face_dim: int | None = None
    face_directions: Subspace | None = None
    minimizer: RVector | None = None
    min_value: Fraction | None = None
    null_component: RVector | None = None


def classify(q: ConvexQuadratic) -> QuadraticClass:
    n = q.dim
    if is_zero_matrix(q.A):
        if all(e == 0 for e in q.a):
            if q.alpha > 0:
                return QuadraticClass(QuadraticKind.EMPTY, n, None)
            return QuadraticClass(
                QuadraticKind.FULL_SPACE, n, Signature.of(n), min_value=q.alpha
            )
        dirs = null_space_basis((q.a,))
        return QuadraticClass(
            QuadraticKind.HALF_SPACE,
            n,
            Signature.of(n - 1, n),
            proper_face_dim=n - 1,
            face_directions=dirs,
        )
    null = null_space_basis(q.A)
    m = null.dim
    a_null = project_onto(q.a, null)
    if any(e != 0 for e in a_null):
        dirs = null_space_basis(q.A + (q.a,))
        return QuadraticClass(
            QuadraticKind.PARABOLOID_CYLINDER,
            m,
            Signature.of(m - 1, n),
            proper_face_dim=m - 1,
            face_directions=dirs,
            null_component=a_null,
        )
    x0 = solve_linear(q.A, vec_scale(-1, q.a))
    assert x0 is not None  # a has no null component, so a lies in range(A)
    v_min = q.alpha + dot(q.a, x0)
    if v_min > 0:
        return QuadraticClass(QuadraticKind.EMPTY, m, None)
    if v_min == 0:
        kind = QuadraticKind.SINGLETON if m == 0 else QuadraticKind.AFFINE_SUBSPACE
        return QuadraticClass(
            kind, m, Signature.of(m), minimizer=x0, min_value=v_min
        )
    return QuadraticClass(
        QuadraticKind.CYLINDER_BALL,
        m,
        Signature.of(m, n),
        proper_face_dim=m,
        face_directions=null,
        minimizer=x0,
        min_value=v_min,
    )


def single_signature(q: ConvexQuadratic) -> Signature:
    cls = classify(q)
    if cls.signature is None:
        raise ValueError("the solution set is empty and has no signature")
    return cls.signature


def face_direction_space(q: ConvexQuadratic) -> Subspace:
    cls = classify(q)
    if cls.face_directions is None:
        raise ValueError(f"a {cls.kind.value} set has no proper face shape")
    return cls.face_directions


@dataclass(frozen=True)
class QuadraticSystem:
    """Finite conjunction of convex quadratic inequalities in R^dim."""

    dim: int
    constraints: tuple[ConvexQuadratic, ...]
    interior_witness: RVector | None = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if any(c.dim != self.dim for c in self.constraints):
            raise ValueError("constraint dimension differs from the system dimension")
        if self.interior_witness is not None:
            w = rvector(self.interior_witness)
            object.__setattr__(self, "interior_witness", w)
            if len(w) != self.dim:
                raise ValueError("witness dimension differs from the system dimension")
            for c in self.constraints:
                if evaluate(c, w) >= 0:
                    raise ValueError("interior witness is not strictly feasible")


def embed(q: ConvexQuadratic, target_dim: int, offset: int) -> ConvexQuadratic:
    """Place q on coordinates [offset, offset + q.dim) of R^target_dim."""
    n, d = target_dim, q.dim
    if offset < 0 or offset + d > n:
        raise ValueError("embedding window does not fit the target dimension")
    rows = []
    for i in range(n):
        if offset <= i < offset + d:
            src = q.A[i - offset]
            rows.append(
                (Fraction(0),) * offset + tuple(src) + (Fraction(0),) * (n - offset - d)
            )
        else:
            rows.append(zero_vector(n))
    a = (Fraction(0),) * offset + tuple(q.a) + (Fraction(0),) * (n - offset - d)
    return ConvexQuadratic(A=tuple(rows), a=a, alpha=q.alpha)


def direct_sum(s: QuadraticSystem, t: QuadraticSystem) -> QuadraticSystem:
    """Independent juxtaposition: s on the first block, t on the second."""
    n = s.dim + t.dim
    constraints = tuple(embed(c, n, 0) for c in s.constraints) + tuple(
        embed(c, n, s.dim) for c in t.constraints
    )
    witness = None
    if s.interior_witness is not None and t.interior_witness is not None:
        witness = s.interior_witness + t.interior_witness
    return QuadraticSystem(dim=n, constraints=constraints, interior_witness=witness)
