"""Logarithm and n-th root on their hypercomplex Riemann manifolds.

The logarithm manifold consists of pairs ``(q, p)`` with ``q = |q| exp(p)``
and ``p`` purely imaginary; the adapted exponential ``E(x + I y) =
(exp(x + I y), I y)`` parameterizes it and ``L(q, p) = log|q| + p`` inverts
``E``.  The root manifold carries ``s = n exp(I y / n)`` in the second factor
and ``R_n(q, s) = |q|^(1/n) s / n``.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .algebra import (
    HyperNum,
    ImaginaryUnit,
    SlicePoint,
    decompose,
    default_unit,
    exp,
    exp_coeffs,
    norm_coeffs,
    power_coeffs,
)
from .errors import BranchError, DomainError, NotOnManifoldError, ParameterError, PoleError

MANIFOLD_TOL = 1e-9


@dataclass(frozen=True)
class LogPoint:
    """A point ``(q, p)`` of the logarithm manifold; ``p`` is the argument of ``q``."""

    q: HyperNum
    p: HyperNum

    def residual(self) -> float:
        """``|q - |q| exp(p)|`` relative to ``max(1, |q|)``, plus any real part of ``p``."""
        r = self.q.norm()
        target = exp(self.p) * r
        return max((self.q - target).norm() / max(1.0, r), abs(self.p.re))

    def to_dict(self) -> dict:
        return {"q": self.q.coeffs.tolist(), "p": self.p.coeffs.tolist()}


@dataclass(frozen=True)
class RootPoint:
    """A point ``(q, s)`` of the n-th root manifold (or its closure), ``|s| = n``."""

    n: int
    q: HyperNum
    s: HyperNum

    def to_dict(self) -> dict:
        return {"n": self.n, "q": self.q.coeffs.tolist(), "s": self.s.coeffs.tolist()}


def adapted_exp(q: HyperNum) -> LogPoint:
    """``E(x + I y) = (exp(x + I y), I y)``."""
    p = q.im
    return LogPoint(exp(q), p)


def adapted_log(pt: LogPoint, tol: float = MANIFOLD_TOL) -> HyperNum:
    """``L(q, p) = log|q| + p`` after checking that ``(q, p)`` is on the manifold."""
    r = pt.q.norm()
    if r == 0.0:
        raise PoleError("log is undefined at q = 0")
    res = pt.residual()
    if res > tol:
        raise NotOnManifoldError(f"(q, p) is off the logarithm manifold (residual {res:.3g})")
    return pt.p + math.log(r)


def principal_argument(q: HyperNum) -> tuple[float, np.ndarray]:
    """Angle in ``[0, pi]`` and unit coefficients of ``q`` (unit is None-like zero for reals)."""
    c = q.coeffs
    y = float(np.sqrt(c[1:] @ c[1:]))
    theta = math.atan2(y, float(c[0]))
    unit = np.zeros_like(c)
    if y > 0:
        unit[1:] = c[1:] / y
    return theta, unit


def _branch_unit(q: HyperNum, negative_unit: ImaginaryUnit | None):
    if not np.any(q.coeffs):
        raise PoleError("no logarithm of 0")
    theta, unit = principal_argument(q)
    if not np.any(unit[1:]) and q.re < 0:
        if negative_unit is None:
            raise BranchError(
                "negative reals have a whole sphere of logarithms; pass negative_unit to pick one"
            )
        return math.pi, np.asarray(negative_unit.coeffs, dtype=float)
    return theta, unit


def principal_log(q: HyperNum, negative_unit: ImaginaryUnit | None = None) -> HyperNum:
    """``log|q| + I_q theta`` with ``theta = atan2(|Im q|, Re q)``.

    Negative reals raise :class:`BranchError` unless ``negative_unit`` selects
    the unit ``I`` of the logarithm ``log|q| + I pi``.
    """
    theta, unit = _branch_unit(q, negative_unit)
    c = unit * theta
    c[0] = math.log(q.norm())
    return HyperNum(c)


def log_preimages(q: HyperNum, ks=(0, 1, -1), units=None) -> list[HyperNum]:
    """Several solutions ``w`` of ``exp(w) = q``.

    For a non-real ``q`` these are ``log|q| + I_q (theta + 2 pi k)``.  For a
    real ``q`` every unit works: ``log|q| + I (theta + 2 pi k)`` for each
    given unit ``I`` (default: e1 and e2), where ``theta`` is 0 or ``pi``.
    """
    if not np.any(q.coeffs):
        raise PoleError("no logarithm of 0")
    theta, unit = principal_argument(q)
    r = math.log(q.norm())
    if np.any(unit[1:]):
        unit_list = [unit]
    else:
        if units is None:
            units = [default_unit(q.dim), ImaginaryUnit.basis(2, q.dim)]
        unit_list = [np.asarray(u.coeffs, dtype=float) for u in units]
    out = []
    for u in unit_list:
        for k in ks:
            c = u * (theta + 2 * math.pi * k)
            c[0] = r
            out.append(HyperNum(c))
    return out


def phi_n(n: int, p: SlicePoint) -> RootPoint:
    """``(exp(x + I y), n exp(I y / n))`` on ``x > 0``, ``|y| < pi n``."""
    _check_n(n)
    if not (p.x > 0 and abs(p.y) < math.pi * n):
        raise DomainError(f"phi_{n} needs x > 0 and |y| < {n} pi; got ({p.x}, {p.y})")
    q = exp(p.to_hypernum())
    s = HyperNum(exp_coeffs(SlicePoint(0.0, p.y / n, p.unit).coeffs()) * n)
    return RootPoint(int(n), q, s)


def nth_root(pt: RootPoint, tol: float = MANIFOLD_TOL) -> HyperNum:
    """``R_n(q, s) = |q|^(1/n) s / n`` (also on the closure: ``q = 0`` or ``s = -n``)."""
    n = _check_n(pt.n)
    if abs(pt.s.norm() - n) > tol:
        raise NotOnManifoldError(f"|s| = {pt.s.norm()} but the root manifold needs |s| = {n}")
    # s / n first: exact for real s = +-n, so the closure values come out exact.
    return (pt.s / n) * pt.q.norm() ** (1.0 / n)


def principal_nthroot(n: int, q: HyperNum, negative_unit: ImaginaryUnit | None = None) -> HyperNum:
    """``|q|^(1/n) exp(I_q theta / n)`` on the principal branch."""
    n = _check_n(n)
    theta, unit = _branch_unit(q, negative_unit)
    c = unit * (theta / n)
    return HyperNum(exp_coeffs(c) * q.norm() ** (1.0 / n))


def slice_power(q: HyperNum, n: int) -> HyperNum:
    return HyperNum(power_coeffs(q.coeffs, n))


def _check_n(n) -> int:
    if int(n) != n or n <= 1:
        raise ParameterError(f"n must be an integer > 1, got {n}")
    return int(n)
