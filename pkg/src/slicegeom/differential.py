"""Real differentials of slice maps via the standard set of curves, and audits.

Columns of every differential are ordered ``(d.1, d.I, d.I_2, ..., d.I_{m-1})``
for the basis ``(1, I, I_2, ...)`` returned by :func:`complete_basis`.  The
first two columns form the *slice block* (tangent to the slice through the
point); the remaining ones form the *perp block*.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .algebra import Basis, SlicePoint, complete_basis
from .errors import AlignmentError, ConfigurationError, DerivativeError, SliceGeomError, StencilError
from .sampling import random_unit_coeffs, rng_for
from .stem import StemFunction, SymmetricDomain, check_intrinsic, embed, times_unit

PASS, FAIL, DEGENERATE = "pass", "fail", "degenerate"


# -- curves -----------------------------------------------------------------------

@dataclass(frozen=True)
class CurveSet:
    """The standard curves through ``point``; ``curves[l](t)`` returns coefficients."""

    point: SlicePoint
    basis: Basis
    curves: tuple

    def velocities(self, h: float = 1e-6) -> np.ndarray:
        """Central-difference velocities at ``t = 0`` as columns."""
        return np.column_stack([(c(h) - c(-h)) / (2 * h) for c in self.curves])


def _check_alignment(p: SlicePoint, basis: Basis, tol: float = 1e-9):
    if basis.dim != p.dim:
        raise AlignmentError(f"basis of dimension {basis.dim} for a point of dimension {p.dim}")
    one = np.zeros(p.dim)
    one[0] = 1.0
    if (np.max(np.abs(basis.units[0].coeffs - one)) > tol
            or np.max(np.abs(basis.units[1].coeffs - p.unit.coeffs)) > tol):
        raise AlignmentError("basis must start with (1, I) where I is the unit of the point")


def standard_curves(p: SlicePoint, basis: Basis | None = None) -> CurveSet:
    """alpha, beta_I and, per remaining basis vector, a great-circle arc (y > 0)
    or a straight line (y = 0)."""
    if basis is None:
        basis = complete_basis(p.unit)
    _check_alignment(p, basis)
    x, y = p.x, p.y
    base = p.coeffs()
    one = basis.units[0].coeffs
    unit = basis.units[1].coeffs

    curves = [
        lambda t: base + t * one,
        lambda t: base + t * unit,
    ]
    for v in basis.units[2:]:
        w = v.coeffs
        if y > 0:
            def gamma(t, w=w):
                c = y * (unit * np.cos(t / y) + w * np.sin(t / y))
                c[0] = x
                return c
        else:
            def gamma(t, w=w):
                return base + t * w
        curves.append(gamma)
    return CurveSet(p, basis, tuple(curves))


# -- differentials -----------------------------------------------------------------

@dataclass(frozen=True)
class DifferentialMatrix:
    """Real ``N x dim`` Jacobian; column ``l`` is the derivative along ``basis[l]``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError("differential must be a 2-d array")
        if not np.all(np.isfinite(m)):
            raise DerivativeError("differential has non-finite entries")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def ambient_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def columns(self) -> np.ndarray:
        return self.matrix.T

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def shape(self):
        return self.matrix.shape


def _stencil(p: SlicePoint, basis: Basis | None, h: float):
    """Points ``curve_l(+-step_l)`` of the standard curves, as one ``(2 dim, dim)`` array.

    Same curves as :func:`standard_curves`, evaluated in one go.  Arcs have
    radius ``y``; their step is ``h * min(1, y)`` so the truncation error
    stays ``O(h^2)`` relative to the column.
    """
    if basis is None:
        basis = complete_basis(p.unit)
    _check_alignment(p, basis)
    D = np.array([u.coeffs for u in basis.units])
    dim = D.shape[0]
    base = p.coeffs()
    steps = np.full(dim, h)
    plus = base + h * D
    minus = base - h * D
    if p.y > 0:
        y = p.y
        s = h * min(1.0, y)
        steps[2:] = s
        arc = y * (np.cos(s / y) * D[1] + np.sin(s / y) * D[2:])
        back = y * (np.cos(s / y) * D[1] - np.sin(s / y) * D[2:])
        arc[:, 0] = back[:, 0] = p.x
        plus[2:], minus[2:] = arc, back
    return np.vstack([plus, minus]), steps


def jacobian_numeric(
    fmap: Callable, p: SlicePoint, basis: Basis | None = None, h: float = 1e-5, *, batched: bool = False
) -> DifferentialMatrix:
    """Central differences of ``fmap`` along the standard curves at ``p``.

    ``fmap`` takes a coefficient vector and returns a real vector.  With
    ``batched=True`` it instead takes a ``(m, dim)`` array of points and
    returns ``(m, N)``; all stencil points are then passed in one call.
    Arc columns use the step ``h * min(1, y)``.
    """
    stencil, steps = _stencil(p, basis, h)
    try:
        if batched:
            values = np.asarray(fmap(np.array(stencil)), dtype=float)
        else:
            values = np.array([np.asarray(fmap(q), dtype=float) for q in stencil])
    except SliceGeomError as exc:
        raise StencilError(f"map failed on the stencil at ({p.x}, {p.y}): {exc}") from exc
    m = len(steps)
    cols = (values[:m] - values[m:]) / (2 * steps)[:, None]
    return DifferentialMatrix(cols.T)


def jacobian_numeric_many(fmap: Callable, points, bases=None, h: float = 1e-5) -> list[DifferentialMatrix]:
    """:func:`jacobian_numeric` at many points with one call of a batched ``fmap``."""
    points = list(points)
    if bases is None:
        bases = [None] * len(points)
    stencils, steps = zip(*(_stencil(p, b, h) for p, b in zip(points, bases)))
    try:
        values = np.asarray(fmap(np.concatenate(stencils)), dtype=float)
    except SliceGeomError as exc:
        raise StencilError(f"map failed on a stencil: {exc}") from exc
    out = []
    start = 0
    for st in steps:
        m = len(st)
        block = values[start:start + 2 * m]
        start += 2 * m
        out.append(DifferentialMatrix(((block[:m] - block[m:]) / (2 * st)[:, None]).T))
    return out


def jacobian_slice_analytic(F: StemFunction, p: SlicePoint, basis: Basis | None = None) -> DifferentialMatrix:
    """Differential of the slice function induced by ``F`` from its partials.

    Columns: ``dF/dx``, ``dF/dy`` (read on the slice of ``I``) and
    ``I_l F2 / y`` for the perp directions, which become ``I_l dF2/dy`` on the
    real axis.  Rows stack the ``arity`` algebra components.
    """
    if basis is None:
        basis = complete_basis(p.unit)
    _check_alignment(p, basis)
    dim = p.dim
    u = p.unit.coeffs
    try:
        f1x, f1y, f2x, f2y = F.partials(p.x, p.y)
    except StencilError as exc:
        raise DerivativeError(f"no partials for {F.name} at ({p.x}, {p.y})") from exc
    cols = [
        embed(f1x, dim) + times_unit(u, f2x),
        embed(f1y, dim) + times_unit(u, f2y),
    ]
    if p.y > 0:
        _, f2 = F(p.x, p.y)
        transverse = f2 / p.y
    else:
        transverse = f2y
    for v in basis.units[2:]:
        cols.append(times_unit(v.coeffs, transverse))
    return DifferentialMatrix(np.column_stack([c.reshape(-1) for c in cols]))


# -- conformality ------------------------------------------------------------------

@dataclass(frozen=True)
class BlockReport:
    columns: tuple
    column_norms: tuple
    factor: float
    orthogonality_residual: float
    norm_ratio: float
    residual: float
    verdict: str

    @property
    def norm_ratio_deviation(self) -> float:
        return self.norm_ratio - 1.0

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def _audit_block(J: np.ndarray, cols, tol: float) -> BlockReport:
    """Gram test ``B^T B = k I``; residuals are relative to ``k`` (mean squared norm)."""
    B = J[:, cols]
    G = B.T @ B
    sq = np.diag(G).copy()
    norms = np.sqrt(sq)
    k = float(np.mean(sq))
    if np.all(norms < tol):
        return BlockReport(tuple(cols), tuple(norms.tolist()), k, 0.0, float("nan"), 0.0, DEGENERATE)
    off = G - np.diag(sq)
    orth = float(np.max(np.abs(off))) / k if len(cols) > 1 else 0.0
    residual = float(np.max(np.abs(G - k * np.eye(len(cols))))) / k
    ratio = float(np.max(norms) / np.min(norms)) if np.min(norms) > 0 else float("inf")
    return BlockReport(tuple(cols), tuple(norms.tolist()), k, orth, ratio, residual, PASS if residual <= tol else FAIL)


@dataclass(frozen=True)
class ConformalityReport:
    slice_block: BlockReport
    perp_block: BlockReport
    full: BlockReport
    tol: float

    @property
    def slice_conformal(self) -> bool:
        return self.slice_block.passed and self.perp_block.passed

    @property
    def conformal(self) -> bool:
        return self.full.passed

    def failing_blocks(self) -> list[str]:
        names = ("slice", "perp", "full")
        blocks = (self.slice_block, self.perp_block, self.full)
        return [n for n, b in zip(names, blocks) if b.verdict == FAIL]

    def passes(self, expected: str) -> bool:
        """Whether the report certifies ``expected`` in {"slice", "full"}."""
        if expected == "full":
            return self.conformal
        if expected == "slice":
            return self.slice_conformal
        raise ConfigurationError(f"unknown conformality class {expected!r}")

    def to_dict(self) -> dict:
        def block(b: BlockReport):
            d = asdict(b)
            d["columns"] = list(b.columns)
            d["column_norms"] = list(b.column_norms)
            d["norm_ratio_deviation"] = b.norm_ratio_deviation
            return d

        return {
            "tol": self.tol,
            "slice_block": block(self.slice_block),
            "perp_block": block(self.perp_block),
            "full": block(self.full),
        }


def conformality_audit(J, tol: float = 1e-9) -> ConformalityReport:
    J = np.asarray(J, dtype=float)
    m = J.shape[1]
    if m < 3:
        raise ConfigurationError("conformality audit needs at least 3 columns")
    return ConformalityReport(
        _audit_block(J, [0, 1], tol),
        _audit_block(J, list(range(2, m)), tol),
        _audit_block(J, list(range(m)), tol),
        tol,
    )


# -- theorem hypotheses -------------------------------------------------------------

@dataclass
class Certificate:
    """Sampled evidence for the slice-conformal-curve theorem hypotheses."""

    stem: str
    samples: int
    tol: float
    conformality_residual: float | None
    min_dy_f2_real: float | None
    min_f2_offaxis: float | None
    condition_a: bool | None
    condition_b: bool | None
    intrinsic: bool = True
    spot_checks: int = 0
    spot_check_failures: int = 0
    spot_check_worst: float = 0.0
    failing_blocks: list = field(default_factory=list)
    injectivity: str = "not searched"

    @property
    def failing_conditions(self) -> list[str]:
        out = [] if self.intrinsic else ["intrinsic"]
        if self.condition_a is False:
            out.append("a")
        if self.condition_b is False:
            out.append("b")
        return out

    @property
    def passed(self) -> bool:
        return not self.failing_conditions and self.spot_check_failures == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["failing_conditions"] = self.failing_conditions
        d["passed"] = self.passed
        return d


def stem_conformality_residual(F: StemFunction, x: float, y: float) -> float:
    """Relative defect of the 2-column plane differential ``dF`` from ``k I``."""
    f1x, f1y, f2x, f2y = F.partials(x, y)
    u = np.concatenate([f1x.ravel(), f2x.ravel()])
    v = np.concatenate([f1y.ravel(), f2y.ravel()])
    uu, vv, uv = u @ u, v @ v, u @ v
    k = 0.5 * (uu + vv)
    if k <= 1e-300:
        return float("inf")
    return float(max(abs(uu - vv) / 2, abs(uv)) / k)


def _collision_witness(F: StemFunction, pts: np.ndarray, radius: float):
    vals = np.array([np.concatenate([a.ravel(), b.ravel()]) for a, b in (F(x, y) for x, y in pts)])
    tree = cKDTree(vals)
    for i, j in sorted(tree.query_pairs(radius)):
        if np.max(np.abs(pts[i] - pts[j])) > 1e-6:
            return pts[i].tolist(), pts[j].tolist()
    return None


def certify_theorem(
    F: StemFunction,
    domain: SymmetricDomain | None = None,
    tol: float = 1e-9,
    *,
    dim: int = 4,
    samples: int = 256,
    spot_checks: int = 32,
    seed=0,
) -> Certificate:
    """Check conformality of ``dF`` (a) and non-vanishing of ``F2`` (b) on samples.

    (b) means ``dF2/dy != 0`` on real-axis samples and ``F2 != 0`` elsewhere.
    If both hold, the induced map is audited for slice conformality at
    ``spot_checks`` random slice points.  Injectivity is only probed by a
    collision search among the samples.
    """
    if domain is None:
        domain = F.domain
    intrinsic = check_intrinsic(F, samples=min(samples, 64), tol=tol, seed=seed).passed
    rng = rng_for(seed)
    pts = domain.sample(rng, samples)
    real = pts[pts[:, 1] == 0.0]
    off = pts[pts[:, 1] != 0.0]
    if domain.contains_real_axis and len(real) == 0:
        raise ConfigurationError("sampler produced no real-axis points for a domain meeting the real axis")

    conf = max(stem_conformality_residual(F, x, y) for x, y in pts)
    min_dy = min((float(np.linalg.norm(F.partials(x, 0.0)[3])) for x, _ in real), default=None)
    min_f2 = min((float(np.linalg.norm(F(x, y)[1])) for x, y in off), default=None)
    cond_a = conf <= tol
    cond_b = (min_dy is None or min_dy > tol) and (min_f2 is None or min_f2 > tol)
    cert = Certificate(F.name, len(pts), tol, conf, min_dy, min_f2, cond_a, cond_b, intrinsic)

    witness = _collision_witness(F, pts, 1e-9)
    cert.injectivity = "no witness found" if witness is None else f"collision {witness[0]} ~ {witness[1]}"

    if intrinsic and cond_a and cond_b:
        units = random_unit_coeffs(rng, dim, spot_checks)
        spot = domain.sample(rng, spot_checks, real_fraction=0.0)
        points = [SlicePoint(float(x), abs(float(y)), u) for (x, y), u in zip(spot, units)]
        spot_check(cert, lambda p: jacobian_slice_analytic(F, p), points, tol)
    return cert


def spot_check(cert: Certificate, jacobian: Callable, points, tol: float) -> Certificate:
    """Audit ``jacobian(p)`` for slice conformality at ``points``; record into ``cert``."""
    failures, worst, blocks = 0, 0.0, set()
    for p in points:
        rep = conformality_audit(jacobian(p), tol)
        worst = max(worst, rep.slice_block.residual, rep.perp_block.residual)
        if not rep.slice_conformal:
            failures += 1
            blocks.update(b for b in rep.failing_blocks() if b != "full")
    cert.spot_checks = len(points)
    cert.spot_check_failures = failures
    cert.spot_check_worst = worst
    cert.failing_blocks = sorted(blocks)
    return cert
