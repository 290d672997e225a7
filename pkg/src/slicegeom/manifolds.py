"""Catalog of parameterized hypercomplex Riemann manifolds.

Each chart is a slice map ``K -> R^N`` built from a real stem with ``n``
components.  Component ``j`` of the induced map is a slice function with
values in ``K``; the chart's ``layout`` says which coordinates of it enter
``R^N``:

* ``"full"``: all ``dim`` coefficients,
* ``"real"``: only the real coefficient (component is real valued),
* ``"imag"``: the ``dim - 1`` imaginary coefficients (purely imaginary).

So the helicoid lives in ``K x Im K`` (``N = 2 dim - 1``) and the sphere in
``K x R`` (``N = dim + 1``), with coordinates in that order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np

from .algebra import (
    Basis,
    HyperNum,
    ImaginaryUnit,
    SlicePoint,
    complete_basis,
    decompose,
    inv,
    mul_coeffs,
)
from .differential import (
    Certificate,
    DifferentialMatrix,
    certify_theorem,
    jacobian_numeric,
    jacobian_numeric_many,
    jacobian_slice_analytic,
    spot_check,
)
from .errors import ConfigurationError, DomainError, ParameterError, PoleError
from .sampling import random_slice_points, grid_slice_points, rng_for
from .stem import StemFunction, SymmetricDomain, slice_values

LAYOUT_SIZE = {"full": lambda d: d, "real": lambda d: 1, "imag": lambda d: d - 1}


def _rows(layout, dim: int) -> np.ndarray:
    idx = []
    for j, kind in enumerate(layout):
        base = j * dim
        if kind == "full":
            idx.extend(range(base, base + dim))
        elif kind == "real":
            idx.append(base)
        elif kind == "imag":
            idx.extend(range(base + 1, base + dim))
        else:
            raise ConfigurationError(f"unknown layout kind {kind!r}")
    return np.array(idx, dtype=int)


@dataclass(frozen=True)
class ManifoldChart:
    """A named slice map with its expected conformality class.

    ``expected_class`` is ``"full"`` (conformal), ``"slice"`` (slice
    conformal) or ``"immersion"`` (no conformality claimed).  Charts that are
    not induced by a stem (``psi``) supply ``custom_map`` and
    ``custom_jacobian`` instead.
    """

    name: str
    dim: int
    layout: tuple
    expected_class: str
    domain: SymmetricDomain
    stem: StemFunction | None = None
    custom_map: Callable | None = None
    custom_jacobian: Callable | None = None
    params: dict = field(default_factory=dict)

    @property
    def ambient_dim(self) -> int:
        return sum(LAYOUT_SIZE[k](self.dim) for k in self.layout)

    def __post_init__(self):
        object.__setattr__(self, "_row_index", _rows(self.layout, self.dim))

    @property
    def rows(self) -> np.ndarray:
        return self._row_index

    def contains(self, p: SlicePoint) -> bool:
        return bool(self.domain.contains(p.x, p.y))

    def _check(self, p: SlicePoint):
        if p.dim != self.dim:
            raise ConfigurationError(f"chart {self.name} is {self.dim}-dimensional; point is {p.dim}")
        if not self.contains(p):
            raise DomainError(f"({p.x}, {p.y}) is outside the domain {self.domain.name} of {self.name}")

    def components(self, p: SlicePoint) -> np.ndarray:
        """Slice-function values as an ``(n, dim)`` coefficient array."""
        self._check(p)
        if self.stem is None:
            return self.custom_map(p.coeffs()).reshape(len(self.layout), self.dim)
        return slice_values(self.stem, p.x, p.y, p.unit.coeffs)

    def __call__(self, p: SlicePoint) -> np.ndarray:
        return self.components(p).reshape(-1)[self.rows]

    def map_coeffs(self, q) -> np.ndarray:
        """The chart as a map on coefficient vectors (real points use unit e1)."""
        return self.map_batch(np.asarray(q, dtype=float)[None, :])[0]

    def map_batch(self, Q: np.ndarray) -> np.ndarray:
        """:meth:`map_coeffs` on the rows of an ``(m, dim)`` array."""
        Q = np.asarray(Q, dtype=float)
        if self.stem is None:
            return np.array([self.custom_map(q) for q in Q])[:, self.rows]
        m = Q.shape[0]
        x = Q[:, 0]
        y = np.sqrt(np.einsum("ij,ij->i", Q[:, 1:], Q[:, 1:]))
        U = np.zeros_like(Q)
        off = y > 0.0
        U[off, 1:] = Q[off, 1:] / y[off, None]
        U[~off, 1] = 1.0
        a = self.stem.algebra_dim
        F1, F2 = self.stem.batch(x, y)
        if a == 1:
            vals = F2 * U[:, None, :]
            vals[:, :, 0] += F1[:, :, 0]
        else:
            vals = F1 + mul_coeffs(np.broadcast_to(U[:, None, :], F2.shape), F2)
        return vals.reshape(m, -1)[:, self.rows]

    def jacobian(self, p: SlicePoint, basis: Basis | None = None) -> DifferentialMatrix:
        """Analytic differential along the standard curves."""
        self._check(p)
        if basis is None:
            basis = complete_basis(p.unit)
        if self.stem is None:
            full = self.custom_jacobian(p, basis)
        else:
            full = jacobian_slice_analytic(self.stem, p, basis).matrix
        return DifferentialMatrix(np.asarray(full)[self.rows])

    def numeric_jacobian(self, p: SlicePoint, basis: Basis | None = None, h: float = 1e-5) -> DifferentialMatrix:
        self._check(p)
        return jacobian_numeric(self.map_batch, p, basis, h, batched=True)

    def numeric_jacobians(self, points, bases=None, h: float = 1e-5) -> list[DifferentialMatrix]:
        """:meth:`numeric_jacobian` at many points, evaluating the map once."""
        points = list(points)
        for p in points:
            self._check(p)
        return jacobian_numeric_many(self.map_batch, points, bases, h)

    def sample_points(self, seed, count: int, real_fraction: float = 0.0) -> list[SlicePoint]:
        d = self.domain
        y_hi = min(d.y_max, self.params.get("y_sample_max", d.y_max))
        return random_slice_points(rng_for(seed), self.dim, count, d.x_range, (0.0, y_hi), real_fraction)

    def grid_points(self, seed, nx: int, ny: int) -> list[SlicePoint]:
        d = self.domain
        return grid_slice_points(rng_for(seed), self.dim, nx, ny, d.x_range, (0.0, d.y_max))


# -- stems ----------------------------------------------------------------------

def _xy_stem(values, partials, arity, domain, name) -> StemFunction:
    # ``values`` use numpy functions so they also evaluate elementwise on arrays.
    return StemFunction(values, arity=arity, algebra_dim=1, partials=partials, domain=domain, name=name, vectorized=True)


def sphere_stem(pole: str = "north") -> StemFunction:
    """Stem of the inverse stereographic projection from the north (or south) pole."""
    if pole not in ("north", "south"):
        raise ParameterError(f"pole must be 'north' or 'south', got {pole!r}")
    s = 1.0 if pole == "north" else -1.0

    def values(x, y):
        d = 1.0 + x * x + y * y
        return (2 * x / d, s * (x * x + y * y - 1.0) / d), (s * 2 * y / d, 0.0)

    def partials(x, y):
        d2 = (1.0 + x * x + y * y) ** 2
        return (
            (2 * (1 - x * x + y * y) / d2, s * 4 * x / d2),
            (-4 * x * y / d2, s * 4 * y / d2),
            (s * -4 * x * y / d2, 0.0),
            (s * 2 * (1 + x * x - y * y) / d2, 0.0),
        )

    return _xy_stem(values, partials, 2, SymmetricDomain.plane(), f"sphere-{pole}")


def helicoid_stem() -> StemFunction:
    """``(sinh x (cos y + iota sin y), iota y)``."""

    def values(x, y):
        sh = np.sinh(x)
        return (sh * np.cos(y), 0.0), (sh * np.sin(y), y)

    def partials(x, y):
        sh, ch, c, s = math.sinh(x), math.cosh(x), math.cos(y), math.sin(y)
        return (ch * c, 0.0), (-sh * s, 0.0), (ch * s, 0.0), (sh * c, 1.0)

    return _xy_stem(values, partials, 2, SymmetricDomain.plane(), "helicoid")


def catenoid_stem() -> StemFunction:
    """``(cosh x (cos y + iota sin y), x)`` on the strip ``|y| < pi``."""

    def values(x, y):
        ch = np.cosh(x)
        return (ch * np.cos(y), x), (ch * np.sin(y), 0.0)

    def partials(x, y):
        sh, ch, c, s = math.sinh(x), math.cosh(x), math.cos(y), math.sin(y)
        return (sh * c, 1.0), (-ch * s, 0.0), (sh * s, 0.0), (ch * c, 0.0)

    return _xy_stem(values, partials, 2, SymmetricDomain.strip(math.pi), "catenoid")


def deformation_stem(theta: float) -> StemFunction:
    """``H cos(theta) + C sin(theta)`` for the helicoid ``H`` and catenoid ``C``
    embedded in ``K^2``."""
    if not 0.0 <= theta <= math.pi / 2:
        raise ParameterError(f"theta must lie in [0, pi/2], got {theta}")
    ct, st = math.cos(theta), math.sin(theta)

    def values(x, y):
        b = np.sinh(x) * ct + np.cosh(x) * st
        return (b * np.cos(y), x * st), (b * np.sin(y), y * ct)

    def partials(x, y):
        a = math.cosh(x) * ct + math.sinh(x) * st
        b = math.sinh(x) * ct + math.cosh(x) * st
        c, s = math.cos(y), math.sin(y)
        return (a * c, st), (-b * s, 0.0), (a * s, 0.0), (b * c, ct)

    return _xy_stem(values, partials, 2, SymmetricDomain.strip(math.pi), f"deformation({theta:g})")


def nroot_stem(n: int) -> StemFunction:
    """``(sinh x (cos y + iota sin y), n exp(iota y / n))`` on ``|y| < pi n``."""
    if int(n) != n or n <= 1:
        raise ParameterError(f"n must be an integer > 1, got {n}")
    n = int(n)

    def values(x, y):
        sh = np.sinh(x)
        return (sh * np.cos(y), n * np.cos(y / n)), (sh * np.sin(y), n * np.sin(y / n))

    def partials(x, y):
        sh, ch, c, s = math.sinh(x), math.cosh(x), math.cos(y), math.sin(y)
        cn, sn = math.cos(y / n), math.sin(y / n)
        return (ch * c, 0.0), (-sh * s, -sn), (ch * s, 0.0), (sh * c, cn)

    return _xy_stem(values, partials, 2, SymmetricDomain.strip(math.pi * n, x_range=(-2.0, 2.0)), f"nroot({n})")


def log_manifold_stem() -> StemFunction:
    """``(exp(x + iota y), iota y)``, the stem of the adapted exponential."""

    def values(x, y):
        ex = np.exp(x)
        return (ex * np.cos(y), 0.0), (ex * np.sin(y), y)

    def partials(x, y):
        ex, c, s = math.exp(x), math.cos(y), math.sin(y)
        return (ex * c, 0.0), (-ex * s, 0.0), (ex * s, 0.0), (ex * c, 1.0)

    return _xy_stem(values, partials, 2, SymmetricDomain.plane(), "log")


def graph_stem(f: StemFunction) -> StemFunction:
    """``(z, F(z))``: the stem of the graph ``q -> (q, f(q))``."""
    ident = StemFunction.identity()
    ident = StemFunction(ident._values, partials=ident._partials, domain=f.domain, name="z")
    return StemFunction.stack(ident, f, name=f"graph({f.name})")


# -- psi counterexample -----------------------------------------------------------

def _psi_raw(v: np.ndarray) -> np.ndarray:
    g = np.array([v[0] ** 3, v[1], v[2] ** 3])
    return g / np.sqrt(g @ g)


def psi(unit: HyperNum) -> ImaginaryUnit:
    """The odd map of the unit 2-sphere of H cubing the i and k coordinates."""
    c = np.asarray(unit.coeffs, dtype=float)
    if c.size != 4:
        raise ConfigurationError("psi is defined on quaternionic units only")
    return ImaginaryUnit(np.concatenate([[0.0], _psi_raw(c[1:])]))


def _psi_derivative(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Directional derivative of ``g / |g|`` with ``g(a, b, c) = (a^3, b, c^3)``."""
    g = np.array([v[0] ** 3, v[1], v[2] ** 3])
    dg = np.array([3 * v[0] ** 2 * w[0], w[1], 3 * v[2] ** 2 * w[2]])
    n = np.sqrt(g @ g)
    return dg / n - g * (g @ dg) / n ** 3


def _psi_map(q: np.ndarray) -> np.ndarray:
    p = decompose(HyperNum(q))
    second = np.zeros(4)
    second[0] = p.x
    second[1:] = p.y * _psi_raw(p.unit.coeffs[1:])
    return np.concatenate([p.coeffs(), second])


def _psi_jacobian(p: SlicePoint, basis: Basis) -> np.ndarray:
    """Derivatives of the psi map along the standard curves.

    On the real axis psi is not differentiable: the derivative along
    ``x + w t`` is ``(w, psi(w))``, odd but not linear in ``w``.  The columns
    there are these directional derivatives and depend on the basis.
    """
    u = p.unit.coeffs
    cols = [np.array([1.0, 0, 0, 0, 1.0, 0, 0, 0])]
    cols.append(np.concatenate([u, [0.0], _psi_raw(u[1:])]))
    for v in basis.units[2:]:
        w = v.coeffs
        if p.y > 0:
            d = _psi_derivative(u[1:], w[1:])
        else:
            d = _psi_raw(w[1:])
        cols.append(np.concatenate([w, [0.0], d]))
    return np.column_stack(cols)


def psi_counterexample(p: SlicePoint) -> np.ndarray:
    """``(x + I y, x + psi(I) y)`` in ``H x H = R^8``."""
    return get_chart("psi", 4)(p)


# -- registry ---------------------------------------------------------------------

CHART_NAMES = ("sphere-north", "sphere-south", "helicoid", "catenoid", "deformation", "nroot", "log", "psi")


def get_chart(name: str, dim: int = 4, *, theta: float | None = None, n: int | None = None) -> ManifoldChart:
    """Look up a catalog chart by name; ``graph:<expr>`` parses a stem expression."""
    if dim not in (4, 8):
        raise ConfigurationError(f"dim must be 4 or 8, got {dim}")
    if name in ("sphere", "sphere-north", "sphere-south"):
        pole = "south" if name == "sphere-south" else "north"
        stem = sphere_stem(pole)
        return ManifoldChart(f"sphere-{pole}", dim, ("full", "real"), "full", stem.domain, stem)
    if name == "helicoid":
        stem = helicoid_stem()
        return ManifoldChart(name, dim, ("full", "imag"), "slice", stem.domain, stem)
    if name == "catenoid":
        stem = catenoid_stem()
        return ManifoldChart(name, dim, ("full", "real"), "slice", stem.domain, stem)
    if name == "deformation":
        theta = math.pi / 4 if theta is None else float(theta)
        stem = deformation_stem(theta)
        return ManifoldChart(name, dim, ("full", "full"), "slice", stem.domain, stem, params={"theta": theta})
    if name == "nroot":
        n = 2 if n is None else n
        stem = nroot_stem(n)
        return ManifoldChart(name, dim, ("full", "full"), "slice", stem.domain, stem, params={"n": int(n)})
    if name == "log":
        stem = log_manifold_stem()
        return ManifoldChart(name, dim, ("full", "imag"), "immersion", stem.domain, stem)
    if name == "psi":
        if dim != 4:
            raise ConfigurationError("the psi chart exists only for dim 4")
        return ManifoldChart(
            name, 4, ("full", "full"), "slice", SymmetricDomain.plane(),
            custom_map=_psi_map, custom_jacobian=_psi_jacobian,
        )
    if name.startswith("graph:"):
        from .expr import parse_stem_expr, stem_from_expr

        f = stem_from_expr(parse_stem_expr(name[len("graph:"):]))
        stem = graph_stem(f)
        return ManifoldChart(name, dim, ("full",) * stem.arity, "slice", stem.domain, stem)
    raise ConfigurationError(f"unknown chart {name!r}; known: {', '.join(CHART_NAMES)}, graph:<expr>")


def chart_from_stem(stem: StemFunction, dim: int = 4, expected_class: str = "slice", name: str | None = None) -> ManifoldChart:
    """Wrap an arbitrary stem as a chart into ``K^n``."""
    return ManifoldChart(name or stem.name, dim, ("full",) * stem.arity, expected_class, stem.domain, stem)


def certify_chart(chart: ManifoldChart, tol: float = 1e-9, *, samples: int = 256, spot_checks: int = 32, seed=0) -> Certificate:
    """Theorem certificate for a stem-backed chart.

    Charts without a stem (``psi``) have no stem hypotheses to test; their
    certificate only carries the slice-conformality spot checks.
    """
    if chart.stem is not None:
        return certify_theorem(chart.stem, tol=tol, dim=chart.dim, samples=samples, spot_checks=spot_checks, seed=seed)
    cert = Certificate(chart.name, 0, tol, None, None, None, None, None)
    points = chart.sample_points(seed, spot_checks)
    return spot_check(cert, chart.jacobian, points, tol)


# -- named parameterizations ---------------------------------------------------------

def param_sphere(pole: str, p: SlicePoint) -> np.ndarray:
    """Inverse stereographic projection, ``K -> S^dim`` in ``K x R``."""
    if pole not in ("north", "south"):
        raise ParameterError(f"pole must be 'north' or 'south', got {pole!r}")
    return get_chart(f"sphere-{pole}", p.dim)(p)


def sphere_chart_inverse(pole: str, point) -> HyperNum:
    """Stereographic projection of a point ``(w, t)`` of the sphere back to ``K``."""
    point = np.asarray(point, dtype=float)
    w, t = point[:-1], point[-1]
    if pole == "north":
        if t == 1.0:
            raise PoleError("the north pole is not in the north chart")
        return HyperNum(w / (1.0 - t))
    if pole == "south":
        if t == -1.0:
            raise PoleError("the south pole is not in the south chart")
        return HyperNum(w / (1.0 + t)).conj()
    raise ParameterError(f"pole must be 'north' or 'south', got {pole!r}")


def sphere_transition(q: HyperNum) -> HyperNum:
    """South-chart coordinate of the point with north-chart coordinate ``q``: ``1/q``."""
    if not np.any(q.coeffs):
        raise PoleError("the transition map is undefined at 0")
    return inv(q)


def param_helicoid(p: SlicePoint) -> np.ndarray:
    """``(sinh x cos y + I sinh x sin y, I y)`` in ``K x Im K``."""
    return get_chart("helicoid", p.dim)(p)


def param_catenoid(p: SlicePoint) -> np.ndarray:
    """``(cosh x cos y + I cosh x sin y, x)`` in ``K x R``; needs ``|y| < pi``."""
    return get_chart("catenoid", p.dim)(p)


def param_deformation(theta: float, p: SlicePoint) -> np.ndarray:
    """Member ``theta`` of the helicoid-catenoid family in ``K x K``."""
    return get_chart("deformation", p.dim, theta=theta)(p)


def param_nroot(n: int, p: SlicePoint) -> np.ndarray:
    return get_chart("nroot", p.dim, n=n)(p)
