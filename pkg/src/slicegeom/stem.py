"""Stem functions on symmetric plane domains and the slice functions they induce.

A stem function is ``F = F1 + iota F2`` on a domain ``D`` of the plane that is
symmetric under ``y -> -y``.  Its components take values in ``A^n`` with
``A`` the reals or the algebra itself, and it induces the slice function

    f(x + I y) = F1(x, y) + I F2(x, y).

Component arrays always have shape ``(arity, algebra_dim)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import HyperNum, SlicePoint, inv, mul, mul_coeffs
from .errors import (
    AlgebraError,
    ConfigurationError,
    DegeneratePairError,
    DomainError,
    StencilError,
    UnsupportedError,
)
from .sampling import rng_for

VERDICT_TOL = 1e-9


@dataclass(frozen=True)
class SymmetricDomain:
    """A plane domain closed under conjugation, with a sampling window.

    ``contains`` decides membership; samples are drawn from
    ``x_range x (-y_max, y_max)`` and filtered through ``contains``.
    """

    contains: Callable[[float, float], bool]
    x_range: tuple = (-2.0, 2.0)
    y_max: float = 2.0
    contains_real_axis: bool = True
    name: str = "plane"

    def __contains__(self, xy) -> bool:
        return bool(self.contains(float(xy[0]), float(xy[1])))

    @classmethod
    def plane(cls, x_range=(-2.0, 2.0), y_max: float = 2.0) -> "SymmetricDomain":
        return cls(lambda x, y: True, tuple(x_range), y_max, True, "plane")

    @classmethod
    def strip(cls, bound: float, x_range=(-2.0, 2.0), margin: float = 0.05, x_min: float | None = None):
        """``{|y| < bound}`` (optionally intersected with ``x > x_min``)."""
        if x_min is None:
            pred = lambda x, y: abs(y) < bound
            name = f"strip(|y|<{bound:g})"
        else:
            pred = lambda x, y: abs(y) < bound and x > x_min
            name = f"strip(|y|<{bound:g}, x>{x_min:g})"
        return cls(pred, tuple(x_range), bound * (1.0 - margin), True, name)

    def sample(self, seed, count: int, real_fraction: float = 0.125) -> np.ndarray:
        """``count`` points ``(x, y)``; some lie on the real axis when it meets D."""
        rng = rng_for(seed)
        out = []
        n_real = int(round(count * real_fraction)) if self.contains_real_axis else 0
        attempts = 0
        while len(out) < count:
            attempts += 1
            if attempts > 1000 * max(count, 1):
                raise ConfigurationError(f"could not sample domain {self.name}")
            x = rng.uniform(*self.x_range)
            y = 0.0 if len(out) < n_real else rng.uniform(-self.y_max, self.y_max)
            if self.contains(x, y):
                out.append((x, y))
        return np.array(out, dtype=float).reshape(-1, 2)

    def check_symmetric(self, samples: np.ndarray) -> bool:
        return all(self.contains(x, y) == self.contains(x, -y) for x, y in samples)


def _as_components(value, arity: int, algebra_dim: int) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.size != arity * algebra_dim:
        raise AlgebraError(
            f"stem component has {arr.size} entries; expected {arity} x {algebra_dim}"
        )
    return arr.reshape(arity, algebra_dim)


class StemFunction:
    """A stem function ``F = F1 + iota F2`` with optional analytic partials.

    Args:
        values: ``(x, y) -> (F1, F2)``, each reshaped to ``(arity, algebra_dim)``.
        arity: number of stacked components ``n``.
        algebra_dim: 1 for real-valued stems, 4 or 8 for algebra-valued ones.
        partials: ``(x, y) -> (dF1/dx, dF1/dy, dF2/dx, dF2/dy)``.  When missing,
            central differences with step ``1e-6 * max(1, |x|, |y|)`` are used.
        domain: the symmetric domain of definition (default: whole plane).
    """

    def __init__(
        self,
        values: Callable,
        *,
        arity: int = 1,
        algebra_dim: int = 1,
        partials: Callable | None = None,
        domain: SymmetricDomain | None = None,
        name: str = "stem",
        vectorized: bool = False,
    ):
        if arity < 1:
            raise ConfigurationError("arity must be >= 1")
        if algebra_dim not in (1, 4, 8):
            raise AlgebraError(f"unsupported algebra dimension {algebra_dim}")
        self._values = values
        self._partials = partials
        self.arity = arity
        self.algebra_dim = algebra_dim
        self.domain = domain if domain is not None else SymmetricDomain.plane()
        self.name = name
        self.vectorized = vectorized

    def __repr__(self):
        return f"StemFunction({self.name!r}, arity={self.arity}, algebra_dim={self.algebra_dim})"

    @property
    def has_analytic_partials(self) -> bool:
        return self._partials is not None

    def in_domain(self, x: float, y: float) -> bool:
        return bool(self.domain.contains(x, y))

    def __call__(self, x: float, y: float):
        if not self.domain.contains(x, y):
            raise DomainError(f"({x}, {y}) is outside the domain {self.domain.name} of {self.name}")
        f1, f2 = self._values(x, y)
        return (
            _as_components(f1, self.arity, self.algebra_dim),
            _as_components(f2, self.arity, self.algebra_dim),
        )

    def batch(self, xs: np.ndarray, ys: np.ndarray):
        """Values at many points, as two ``(m, arity, algebra_dim)`` arrays.

        Stems built with ``vectorized=True`` (real valued, evaluating
        elementwise on arrays) are called once; others point by point.
        """
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        m = xs.size
        for x, y in zip(xs.tolist(), ys.tolist()):
            if not self.domain.contains(x, y):
                raise DomainError(f"({x}, {y}) is outside the domain {self.domain.name} of {self.name}")
        if self.vectorized and self.algebra_dim == 1:
            f1, f2 = self._values(xs, ys)
            out = []
            for f in (f1, f2):
                cols = [np.full(m, v, dtype=float) if np.ndim(v) == 0 else np.asarray(v, dtype=float) for v in f]
                if len(cols) != self.arity:
                    raise AlgebraError(f"stem returned {len(cols)} components; expected {self.arity}")
                out.append(np.stack(cols, axis=1)[:, :, None])
            return out[0], out[1]
        F1 = np.empty((m, self.arity, self.algebra_dim))
        F2 = np.empty_like(F1)
        for k in range(m):
            F1[k], F2[k] = self(float(xs[k]), float(ys[k]))
        return F1, F2

    def partials(self, x: float, y: float, h: float | None = None):
        """``(dF1/dx, dF1/dy, dF2/dx, dF2/dy)`` at ``(x, y)``."""
        if self._partials is not None and h is None:
            if not self.domain.contains(x, y):
                raise DomainError(f"({x}, {y}) is outside the domain of {self.name}")
            return tuple(_as_components(d, self.arity, self.algebra_dim) for d in self._partials(x, y))
        return self.numeric_partials(x, y, h)

    def numeric_partials(self, x: float, y: float, h: float | None = None):
        if h is None:
            h = 1e-6 * max(1.0, abs(x), abs(y))
        stencil = [(x + h, y), (x - h, y), (x, y + h), (x, y - h)]
        if not all(self.domain.contains(*s) for s in stencil):
            raise StencilError(f"step {h:g} at ({x}, {y}) leaves the domain of {self.name}")
        (a1, a2), (b1, b2), (c1, c2), (d1, d2) = (self(*s) for s in stencil)
        return (
            (a1 - b1) / (2 * h),
            (c1 - d1) / (2 * h),
            (a2 - b2) / (2 * h),
            (c2 - d2) / (2 * h),
        )

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_complex(cls, func, derivative=None, *, arity: int = 1, domain=None, name="stem"):
        """Real stem from a holomorphic ``func(z)`` with ``iota`` read as ``1j``.

        ``func`` may return one complex number or a sequence of ``arity``.  If
        ``derivative`` is given, partials follow from ``dF/dx = F'`` and
        ``dF/dy = iota F'``.
        """

        def values(x, y):
            w = np.atleast_1d(np.asarray(func(complex(x, y)), dtype=complex))
            return w.real, w.imag

        partials = None
        if derivative is not None:
            def partials(x, y):
                d = np.atleast_1d(np.asarray(derivative(complex(x, y)), dtype=complex))
                return d.real, -d.imag, d.imag, d.real

        return cls(values, arity=arity, algebra_dim=1, partials=partials, domain=domain, name=name)

    @classmethod
    def from_xy(cls, func, partials=None, *, arity: int = 1, domain=None, name="stem"):
        """Real stem from ``func(x, y) -> complex`` (need not be holomorphic).

        ``partials(x, y)`` returns the complex pair ``(dF/dx, dF/dy)``.
        """

        def values(x, y):
            w = np.atleast_1d(np.asarray(func(x, y), dtype=complex))
            return w.real, w.imag

        part = None
        if partials is not None:
            def part(x, y):
                dx, dy = partials(x, y)
                dx = np.atleast_1d(np.asarray(dx, dtype=complex))
                dy = np.atleast_1d(np.asarray(dy, dtype=complex))
                return dx.real, dy.real, dx.imag, dy.imag

        return cls(values, arity=arity, algebra_dim=1, partials=part, domain=domain, name=name)

    @classmethod
    def polynomial(cls, coeffs: Sequence, name: str = "polynomial") -> "StemFunction":
        """``F(z) = sum_k z^k a_k`` with algebra coefficients on the right."""
        a = np.array([c.coeffs if isinstance(c, HyperNum) else c for c in coeffs], dtype=float)
        if a.ndim == 1:
            a = a[:, None]
        degree = a.shape[0] - 1
        powers = np.arange(degree + 1)

        def values(x, y):
            zk = complex(x, y) ** powers
            return zk.real @ a, zk.imag @ a

        def partials(x, y):
            z = complex(x, y)
            dk = np.zeros(degree + 1, dtype=complex)
            dk[1:] = powers[1:] * z ** (powers[1:] - 1)
            re, im = dk.real @ a, dk.imag @ a
            return re, -im, im, re

        return cls(values, arity=1, algebra_dim=a.shape[1], partials=partials, name=name)

    @classmethod
    def identity(cls) -> "StemFunction":
        return cls.from_complex(lambda z: z, lambda z: 1.0, name="identity")

    @classmethod
    def stack(cls, *stems: "StemFunction", name: str | None = None) -> "StemFunction":
        """Concatenate stems into one of combined arity (same algebra, same domain)."""
        dims = {s.algebra_dim for s in stems}
        if len(dims) != 1:
            raise AlgebraError("stacked stems must share the algebra dimension")
        algebra_dim = dims.pop()
        domain = stems[0].domain

        def values(x, y):
            parts = [s(x, y) for s in stems]
            return np.vstack([p[0] for p in parts]), np.vstack([p[1] for p in parts])

        partials = None
        if all(s.has_analytic_partials for s in stems):
            def partials(x, y):
                parts = [s.partials(x, y) for s in stems]
                return tuple(np.vstack([p[k] for p in parts]) for k in range(4))

        return cls(
            values,
            arity=sum(s.arity for s in stems),
            algebra_dim=algebra_dim,
            partials=partials,
            domain=domain,
            name=name or "(" + ", ".join(s.name for s in stems) + ")",
        )


# -- slice functions --------------------------------------------------------------

def embed(components: np.ndarray, dim: int) -> np.ndarray:
    """Embed ``(n, a)`` component values into the algebra of dimension ``dim``."""
    n, a = components.shape
    if a == dim:
        return components
    if a == 1:
        out = np.zeros((n, dim))
        out[:, 0] = components[:, 0]
        return out
    raise AlgebraError(f"cannot embed {a}-dimensional values into dimension {dim}")


def times_unit(unit: np.ndarray, components: np.ndarray) -> np.ndarray:
    """Left product ``unit * c`` for every row ``c`` of ``components``."""
    if components.shape[1] == 1:
        return components * unit
    return mul_coeffs(np.broadcast_to(unit, components.shape), components)


def slice_values(F: StemFunction, x: float, y: float, unit: np.ndarray) -> np.ndarray:
    """Coefficients of ``F1 + unit F2`` at ``(x, y)``, shape ``(arity, dim)``."""
    f1, f2 = F(x, y)
    dim = unit.size
    return embed(f1, dim) + times_unit(unit, f2)


def _hypernums(arr: np.ndarray) -> tuple:
    return tuple(HyperNum(row) for row in arr)


def eval_slice(F: StemFunction, p: SlicePoint) -> tuple:
    """Values of the induced slice function at ``p`` (one HyperNum per component)."""
    return _hypernums(slice_values(F, p.x, p.y, p.unit.coeffs))


@dataclass(frozen=True)
class IntrinsicReport:
    even_residual: float
    odd_residual: float
    samples: int
    tol: float

    @property
    def residual(self) -> float:
        return max(self.even_residual, self.odd_residual)

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def __bool__(self):
        return self.passed


def check_intrinsic(F: StemFunction, samples: int = 64, tol: float = VERDICT_TOL, seed=0) -> IntrinsicReport:
    """Worst violation of ``F1(z) = F1(conj z)`` and ``F2(z) = -F2(conj z)``."""
    if samples <= 0:
        raise ConfigurationError("check_intrinsic needs at least one sample")
    pts = F.domain.sample(seed, samples)
    if pts.size == 0:
        raise ConfigurationError("domain sampler returned no points")
    even = odd = 0.0
    for x, y in pts:
        a1, a2 = F(x, y)
        b1, b2 = F(x, -y)
        scale = max(1.0, float(np.max(np.abs(a1))), float(np.max(np.abs(a2))))
        even = max(even, float(np.max(np.abs(a1 - b1))) / scale)
        odd = max(odd, float(np.max(np.abs(a2 + b2))) / scale)
    return IntrinsicReport(even, odd, len(pts), tol)


@dataclass(frozen=True)
class HolomorphyVerdict:
    holomorphic: bool
    residual: float

    def __bool__(self):
        return self.holomorphic


def check_holomorphic(F: StemFunction, z, tol: float = VERDICT_TOL) -> HolomorphyVerdict:
    """Cauchy-Riemann test ``F1_x = F2_y`` and ``F1_y = -F2_x`` at ``z = (x, y)``.

    The residual is scaled by ``max(1, largest partial)``.
    """
    x, y = float(z[0]), float(z[1])
    f1x, f1y, f2x, f2y = F.partials(x, y)
    scale = max(1.0, *(float(np.max(np.abs(d))) for d in (f1x, f1y, f2x, f2y)))
    r = max(float(np.max(np.abs(f1x - f2y))), float(np.max(np.abs(f1y + f2x)))) / scale
    return HolomorphyVerdict(r <= tol, r)


def slice_derivative(F: StemFunction, p: SlicePoint, tol: float | None = None) -> tuple:
    """Slice derivative: the function induced by ``F' = dF1/dx + iota dF2/dx``."""
    if tol is None:
        tol = VERDICT_TOL if F.has_analytic_partials else 1e-6
    verdict = check_holomorphic(F, (p.x, p.y), tol)
    if not verdict:
        raise UnsupportedError(
            f"{F.name} is not holomorphic at ({p.x}, {p.y}) (residual {verdict.residual:.3g})"
        )
    f1x, _, f2x, _ = F.partials(p.x, p.y)
    u = p.unit.coeffs
    return _hypernums(embed(f1x, u.size) + times_unit(u, f2x))


def spherical_derivative(F: StemFunction, p: SlicePoint) -> tuple:
    """``F2 / y`` off the real axis and its limit ``dF2/dy`` on it."""
    dim = p.dim
    if p.y > 0:
        _, f2 = F(p.x, p.y)
        return _hypernums(embed(f2 / p.y, dim))
    _, _, _, f2y = F.partials(p.x, 0.0)
    return _hypernums(embed(f2y, dim))


def representation_formula(fM: HyperNum, fN: HyperNum, M: HyperNum, N: HyperNum, L: HyperNum) -> HyperNum:
    """Predict ``f(x + L y)`` from ``f(x + M y)`` and ``f(x + N y)``.

    Evaluates ``(M-N)^-1 [M fM - N fN] + L ((M-N)^-1 [fM - fN])`` with the
    products grouped exactly as written.  For slice functions over the
    octonions the grouping is immaterial: ``M fM - N fN = (M-N) F1`` and the
    inverse property of alternative algebras gives back ``F1``.
    """
    diff = M - N
    if diff.norm() <= 1e-12:
        raise DegeneratePairError("representation formula needs M != N")
    d_inv = inv(diff)
    first = mul(d_inv, mul(M, fM) - mul(N, fN))
    second = mul(L, mul(d_inv, fM - fN))
    return first + second


def spherical_quotient(fM: HyperNum, fN: HyperNum, M: HyperNum, N: HyperNum, y: float) -> HyperNum:
    """``y^-1 (M-N)^-1 [f(x+My) - f(x+Ny)]``, the spherical derivative from two values."""
    diff = M - N
    if diff.norm() <= 1e-12:
        raise DegeneratePairError("spherical quotient needs M != N")
    if y == 0:
        raise DomainError("spherical quotient is undefined on the real axis")
    return mul(inv(diff), fM - fN) / y
