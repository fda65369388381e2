"""Serialization and export: exact JSON, SOCP data, SDPA files, 2D slices.

Exact rational JSON is the source of truth and round-trips losslessly; the
conic exports and slice figures are numeric with documented tolerances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constructor import ConstructionParams, RealizationPlan
from .quadratics import ConvexQuadratic, QuadraticSystem
from .signatures import (
    Leaf,
    LowerBoundCertificate,
    Signature,
    Sum,
    tree_cost,
)
from .verifier import Confidence, VerificationReport, _FloatSystem

EIGENVALUE_CLIP = 1e-12
SLICE_FEAS_TOL = 1e-6


def rational_to_json(x: Fraction) -> str:
    return str(Fraction(x))


def rational_from_json(text) -> Fraction:
    if isinstance(text, bool):
        raise ValueError("expected a rational, got a boolean")
    if isinstance(text, (int, str)):
        return Fraction(text)
    raise ValueError(f"expected a rational as 'p/q' string or integer: {text!r}")


def _vec_to_json(vec) -> list[str]:
    return [rational_to_json(e) for e in vec]


def _vec_from_json(data) -> tuple[Fraction, ...]:
    if not isinstance(data, list):
        raise ValueError("expected a list of rationals")
    return tuple(rational_from_json(e) for e in data)


def quadratic_to_json(q: ConvexQuadratic) -> dict:
    return {
        "A": [_vec_to_json(row) for row in q.A],
        "a": _vec_to_json(q.a),
        "alpha": rational_to_json(q.alpha),
    }


def quadratic_from_json(data: dict) -> ConvexQuadratic:
    if not isinstance(data, dict) or set(data) - {"A", "a", "alpha"}:
        raise ValueError("constraint must be an object with keys A, a, alpha")
    return ConvexQuadratic(
        A=tuple(_vec_from_json(row) for row in data["A"]),
        a=_vec_from_json(data["a"]),
        alpha=rational_from_json(data["alpha"]),
    )


def system_to_json(s: QuadraticSystem) -> dict:
    return {
        "dim": s.dim,
        "constraints": [quadratic_to_json(q) for q in s.constraints],
        "interior_witness": None
        if s.interior_witness is None
        else _vec_to_json(s.interior_witness),
    }


def system_from_json(data: dict) -> QuadraticSystem:
    if not isinstance(data, dict) or "dim" not in data or "constraints" not in data:
        raise ValueError("system must be an object with keys dim, constraints")
    witness = data.get("interior_witness")
    return QuadraticSystem(
        dim=int(data["dim"]),
        constraints=tuple(quadratic_from_json(c) for c in data["constraints"]),
        interior_witness=None if witness is None else _vec_from_json(witness),
    )


def signature_to_json(sig: Signature) -> list[int]:
    return list(sig.elements)


def parse_signature_text(text: str) -> Signature:
    """Accepts '0,2,3' and '{0, 2, 3}'."""
    body = text.strip().strip("{}")
    parts = [p for p in body.replace(",", " ").split() if p]
    if not parts:
        raise ValueError("empty signature")
    return Signature.of(*(int(p) for p in parts))


def tree_to_json(tree) -> dict:
    if isinstance(tree, Leaf):
        return {"leaf": signature_to_json(tree.signature)}
    return {"sum": [tree_to_json(p) for p in tree.parts]}


def tree_from_json(data: dict):
    if not isinstance(data, dict):
        raise ValueError("tree node must be an object")
    if "leaf" in data:
        return Leaf(Signature.of(*data["leaf"]))
    if "sum" in data:
        return Sum(tuple(tree_from_json(p) for p in data["sum"]))
    raise ValueError("tree node needs a 'leaf' or 'sum' key")


def plan_to_json(plan: RealizationPlan) -> dict:
    return {
        "tree": tree_to_json(plan.tree),
        "shift": plan.shift,
        "params": {
            "c": rational_to_json(plan.params.c),
            "r": rational_to_json(plan.params.r),
        },
        "total_inequalities": plan.total_inequalities,
    }


def plan_from_json(data: dict) -> RealizationPlan:
    params = data["params"]
    return RealizationPlan(
        tree=tree_from_json(data["tree"]),
        shift=int(data["shift"]),
        params=ConstructionParams(
            c=rational_from_json(params["c"]), r=rational_from_json(params["r"])
        ),
        total_inequalities=int(data["total_inequalities"]),
    )


def certificate_to_json(cert: LowerBoundCertificate) -> dict:
    return {"n": cert.n, "ds": list(cert.ds), "k": cert.k}


def certificate_from_json(data: dict) -> LowerBoundCertificate:
    return LowerBoundCertificate(n=int(data["n"]), ds=tuple(data["ds"]))


def report_to_json(report: VerificationReport) -> dict:
    witnesses = {}
    for dim, point in sorted(report.witnesses.items()):
        witnesses[str(dim)] = [
            rational_to_json(e) if isinstance(e, (Fraction, int)) else float(e)
            for e in point
        ]
    conf = {"kind": report.confidence.kind}
    if report.confidence.samples is not None:
        conf["samples"] = report.confidence.samples
    if report.confidence.tolerance is not None:
        conf["tolerance"] = report.confidence.tolerance
    return {
        "signature": signature_to_json(report.signature),
        "method": report.method,
        "confidence": conf,
        "witnesses": witnesses,
        "warnings": list(report.warnings),
    }


def report_from_json(data: dict) -> VerificationReport:
    conf = data["confidence"]
    witnesses = {}
    for key, point in data["witnesses"].items():
        witnesses[int(key)] = tuple(
            rational_from_json(e) if isinstance(e, (str, int)) else float(e)
            for e in point
        )
    return VerificationReport(
        signature=Signature.of(*data["signature"]),
        method=data["method"],
        confidence=Confidence(
            kind=conf["kind"],
            samples=conf.get("samples"),
            tolerance=conf.get("tolerance"),
        ),
        witnesses=witnesses,
        warnings=tuple(data.get("warnings", ())),
    )


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Second-order cone export


@dataclass(frozen=True)
class ConeConstraint:
    """One quadratic as ||L x + p||^2 + 2 <b, x> + gamma <= 0."""

    L: np.ndarray
    p: np.ndarray
    b: np.ndarray
    gamma: float

    def evaluate(self, x: np.ndarray) -> float:
        r = self.L @ x + self.p
        return float(r @ r + 2.0 * self.b @ x + self.gamma)


@dataclass(frozen=True)
class SocpForm:
    dim: int
    cones: tuple[ConeConstraint, ...]


def export_socp(s: QuadraticSystem) -> SocpForm:
    """Numeric factorization A = L^T L per constraint.

    Eigenvalues below 1e-12 are clamped to zero, so L has one row per
    significantly positive eigenvalue; p solves L^T p = (range component of
    a) and b carries the remaining null component.
    """
    cones = []
    for q in s.constraints:
        A = np.array([[float(e) for e in row] for row in q.A])
        a = np.array([float(e) for e in q.a])
        if s.dim == 0:
            cones.append(
                ConeConstraint(
                    L=np.zeros((0, 0)),
                    p=np.zeros(0),
                    b=np.zeros(0),
                    gamma=float(q.alpha),
                )
            )
            continue
        w, V = np.linalg.eigh(A)
        keep = w > EIGENVALUE_CLIP
        L = (np.sqrt(w[keep])[:, None] * V[:, keep].T) if keep.any() else np.zeros(
            (0, s.dim)
        )
        if len(L):
            p, *_ = np.linalg.lstsq(L.T, a, rcond=None)
        else:
            p = np.zeros(0)
        b = a - L.T @ p
        gamma = float(q.alpha) - float(p @ p)
        cones.append(ConeConstraint(L=L, p=p, b=b, gamma=gamma))
    return SocpForm(dim=s.dim, cones=tuple(cones))


def socp_to_json(form: SocpForm) -> dict:
    return {
        "dim": form.dim,
        "cones": [
            {
                "L": [list(map(float, row)) for row in cone.L],
                "p": list(map(float, cone.p)),
                "b": list(map(float, cone.b)),
                "gamma": cone.gamma,
            }
            for cone in form.cones
        ],
    }


# ---------------------------------------------------------------------------
# SDPA sparse export


def export_sdpa(s: QuadraticSystem) -> str:
    """SDPA sparse text: one Schur-complement LMI block per quadratic.

    Each constraint becomes M(x) = [[I, Lx+p], [(Lx+p)^T, -2<b,x>-gamma]]
    which is positive semidefinite exactly on the quadratic's solution set;
    the file encodes sum_i x_i F_i - F0 >= 0 with F_i holding the linear
    part and F0 = -M(0).
    """
    form = export_socp(s)
    sizes = [len(cone.L) + 1 for cone in form.cones]
    # Placeholder "0" keeps the header at four nonblank lines even for the
    # zero-block or zero-variable file.
    lines = [
        f"{s.dim}",
        f"{len(sizes)}",
        " ".join(str(z) for z in sizes) if sizes else "0",
        " ".join("0" for _ in range(s.dim)) if s.dim else "0",
    ]

    def emit(mat_no: int, blk_no: int, i: int, j: int, value: float):
        if value != 0.0:
            lines.append(f"{mat_no} {blk_no} {i} {j} {value!r}")

    for blk_no, cone in enumerate(form.cones, start=1):
        k = len(cone.L)
        corner = k + 1
        # F0 = -M(0) with M(0) = [[I, p], [p^T, -gamma]].
        for i in range(1, k + 1):
            emit(0, blk_no, i, i, -1.0)
            emit(0, blk_no, i, corner, -float(cone.p[i - 1]))
        emit(0, blk_no, corner, corner, float(cone.gamma))
        for var in range(1, s.dim + 1):
            col = cone.L[:, var - 1] if k else np.zeros(0)
            for i in range(1, k + 1):
                emit(var, blk_no, i, corner, float(col[i - 1]))
            emit(var, blk_no, corner, corner, -2.0 * float(cone.b[var - 1]))
    return "\n".join(lines) + "\n"


def parse_sdpa(text: str) -> dict:
    """Header and entries of an SDPA sparse file.

    Returns {"nvars", "block_sizes", "entries"} with entries as
    (mat_no, blk_no, i, j, value) tuples; block sizes observed in entries
    are validated against the declared header.
    """
    rows = [
        line
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith(('"', "*"))
    ]
    if len(rows) < 3:
        raise ValueError("truncated SDPA file")
    nvars = int(rows[0].split()[0])
    nblocks = int(rows[1].split()[0])
    sizes = [abs(int(tok)) for tok in rows[2].split()] if nblocks else []
    if len(sizes) != nblocks:
        raise ValueError("block size line disagrees with block count")
    entries = []
    for line in rows[4:]:
        toks = line.replace(",", " ").split()
        mat_no, blk_no, i, j = (int(t) for t in toks[:4])
        value = float(toks[4])
        if not 0 <= mat_no <= nvars:
            raise ValueError(f"matrix index {mat_no} out of range")
        if not 1 <= blk_no <= nblocks:
            raise ValueError(f"block index {blk_no} out of range")
        if not (1 <= i <= sizes[blk_no - 1] and 1 <= j <= sizes[blk_no - 1]):
            raise ValueError(f"entry ({i},{j}) exceeds block size")
        entries.append((mat_no, blk_no, i, j, value))
    return {"nvars": nvars, "block_sizes": sizes, "entries": entries}


# ---------------------------------------------------------------------------
# 2D slices


class EmptySlice(RuntimeError):
    """The slice plane does not meet the set's interior."""


@dataclass(frozen=True)
class SliceSpec:
    base_point: tuple[float, ...]
    u: tuple[float, ...]
    v: tuple[float, ...]
    resolution: int = 64
    extent: float = 16.0

    def __post_init__(self):
        base = tuple(float(e) for e in self.base_point)
        uu = tuple(float(e) for e in self.u)
        vv = tuple(float(e) for e in self.v)
        object.__setattr__(self, "base_point", base)
        object.__setattr__(self, "u", uu)
        object.__setattr__(self, "v", vv)
        un, vn = np.array(uu), np.array(vv)
        if not (len(base) == len(uu) == len(vv)):
            raise ValueError("base point and plane directions disagree in length")
        if abs(np.linalg.norm(un) - 1.0) > 1e-12 or abs(np.linalg.norm(vn) - 1.0) > 1e-12:
            raise ValueError("plane directions must be unit vectors")
        if abs(float(un @ vn)) > 1e-12:
            raise ValueError("plane directions must be orthogonal within 1e-12")
        if self.resolution < 8:
            raise ValueError("resolution must be at least 8")
        if not self.extent > 0:
            raise ValueError("extent must be positive")


def slice_spec_from_json(data: dict) -> SliceSpec:
    return SliceSpec(
        base_point=tuple(data["base_point"]),
        u=tuple(data["u"]),
        v=tuple(data["v"]),
        resolution=int(data.get("resolution", 64)),
        extent=float(data.get("extent", 16.0)),
    )


def _in_plane_interior(fs: _FloatSystem, base, U) -> np.ndarray:
    """In-plane coordinates of a strictly feasible point, or EmptySlice."""
    st = np.zeros(2)

    def value_grad(p):
        x = base + U.T @ p
        vals = fs.eval_point(x)
        j = int(vals.argmax())
        return float(vals[j]), U @ fs.gradients(x)[j]

    best, best_st = math.inf, st.copy()
    for it in range(4000):
        val, grad = value_grad(st)
        if val < best:
            best, best_st = val, st.copy()
        if val < 0:
            break
        norm = float(np.linalg.norm(grad))
        if norm < 1e-15:
            break
        st = st - (1.0 / math.sqrt(it + 1.0)) * grad / norm
    if best >= 0:
        raise EmptySlice("no strictly feasible point found in the slice plane")
    return best_st


def slice_boundary(s: QuadraticSystem, spec: SliceSpec):
    """Boundary samples of the slice: (thetas, st pairs, ambient points).

    Rays that stay feasible out to the extent are omitted, so unbounded
    slices come back as partial polylines.
    """
    if len(spec.base_point) != s.dim:
        raise ValueError("slice base point dimension mismatch")
    fs = _FloatSystem(s)
    base = np.array(spec.base_point)
    U = np.array([spec.u, spec.v])
    center = _in_plane_interior(fs, base, U)

    thetas, st_rows, points = [], [], []
    for k in range(spec.resolution):
        theta = 2.0 * math.pi * k / spec.resolution
        d2 = np.array([math.cos(theta), math.sin(theta)])
        lo, hi = 0.0, 1.0
        hit = False
        while hi <= spec.extent:
            x = base + U.T @ (center + hi * d2)
            if fs.eval_point(x).max(initial=-math.inf) > 0:
                hit = True
                break
            lo = hi
            hi *= 2.0
        if not hit:
            continue
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            x = base + U.T @ (center + mid * d2)
            if fs.eval_point(x).max(initial=-math.inf) <= 0:
                lo = mid
            else:
                hi = mid
        st = center + lo * d2
        thetas.append(theta)
        st_rows.append(st)
        points.append(base + U.T @ st)
    if not thetas:
        raise EmptySlice("every ray stayed feasible out to the extent")
    return thetas, st_rows, points


def emit_slice_csv(s: QuadraticSystem, spec: SliceSpec) -> str:
    thetas, st_rows, points = slice_boundary(s, spec)
    header = ["theta", "s", "t"] + [f"x{i + 1}" for i in range(s.dim)]
    lines = [",".join(header)]
    for theta, st, x in zip(thetas, st_rows, points):
        row = [f"{theta:.12g}", f"{st[0]:.12g}", f"{st[1]:.12g}"]
        row += [f"{coord:.12g}" for coord in x]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def emit_slice_svg(s: QuadraticSystem, spec: SliceSpec, size: int = 480) -> str:
    _, st_rows, _ = slice_boundary(s, spec)
    pts = np.array(st_rows)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    pad = 0.05 * span

    def cx(val: float) -> float:
        return (val - lo[0] + pad) / (span + 2 * pad) * size

    def cy(val: float) -> float:
        return size - (val - lo[1] + pad) / (span + 2 * pad) * size

    path = " ".join(
        f"{'M' if i == 0 else 'L'} {cx(p[0]):.3f} {cy(p[1]):.3f}"
        for i, p in enumerate(pts)
    )
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{size}" height="{size}" viewBox="0 0 {size} {size}">\n'
        f'  <path d="{path} Z" fill="none" stroke="black" stroke-width="1.5"/>\n'
        "</svg>\n"
    )


def emit_slice(s: QuadraticSystem, spec: SliceSpec, fmt: str) -> str:
    if fmt == "csv":
        return emit_slice_csv(s, spec)
    if fmt == "svg":
        return emit_slice_svg(s, spec)
    raise ValueError(f"unknown slice format: {fmt}")
