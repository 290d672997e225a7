"""Real, quaternion and octonion arithmetic on coefficient vectors.

Elements are stored as real vectors over the ordered basis
``(e0 = 1, e1, ..., e_{dim-1})`` with ``dim`` in {1, 4, 8}.  The quaternion
table is the usual one (``e1 e2 = e3``); octonions are pairs of quaternions
multiplied with the Cayley-Dickson rule

    (a, b)(c, d) = (ac - conj(d) b, da + b conj(c)).

The ``*_coeffs`` functions work on arrays of shape ``(..., dim)`` and are
what the rest of the package uses on hot paths.  :class:`HyperNum` is the
immutable value type exposed to callers.
"""
from __future__ import annotations

from dataclasses import dataclass
import numbers

import numpy as np

from .errors import AlgebraError, ConfigurationError, DivisionByZeroError, InvalidUnitError

DIMS = (1, 4, 8)
UNIT_TOL = 1e-9


# -- vectorised kernels -------------------------------------------------------

def conj_coeffs(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    out = -a
    out[..., 0] = a[..., 0]
    return out


def _qmul(a, b):
    a0, a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    b0, b1, b2, b3 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def _omul(a, b):
    p, q = a[..., :4], a[..., 4:]
    r, s = b[..., :4], b[..., 4:]
    first = _qmul(p, r) - _qmul(conj_coeffs(s), q)
    second = _qmul(s, p) + _qmul(q, conj_coeffs(r))
    return np.concatenate([first, second], axis=-1)


def mul_coeffs(a, b) -> np.ndarray:
    """Algebra product of coefficient arrays (broadcasts over leading axes)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dim = a.shape[-1]
    if b.shape[-1] != dim:
        raise AlgebraError(f"dimension mismatch: {dim} vs {b.shape[-1]}")
    if dim == 1:
        return a * b
    if dim == 4:
        return _qmul(a, b)
    if dim == 8:
        return _omul(a, b)
    raise AlgebraError(f"unsupported dimension {dim}")


def norm_coeffs(a) -> np.ndarray:
    return np.sqrt(np.sum(np.square(a), axis=-1))


def inv_coeffs(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    n2 = np.sum(a * a, axis=-1, keepdims=True)
    if np.any(n2 == 0.0):
        raise DivisionByZeroError("inverse of zero")
    return conj_coeffs(a) / n2


def exp_coeffs(a) -> np.ndarray:
    """exp(x + v) = e^x (cos|v| + v sin|v|/|v|), with sin(y)/y taken via sinc."""
    a = np.asarray(a, dtype=float)
    x = a[..., 0]
    y = norm_coeffs(a[..., 1:])
    ex = np.exp(x)
    out = np.empty_like(a)
    out[..., 0] = ex * np.cos(y)
    out[..., 1:] = (ex * np.sinc(y / np.pi))[..., None] * a[..., 1:]
    return out


def power_coeffs(a, n: int) -> np.ndarray:
    """``a**n`` by repeated left multiplication (power-associative, so exact)."""
    if n < 0:
        return power_coeffs(inv_coeffs(a), -n)
    a = np.asarray(a, dtype=float)
    out = np.zeros_like(a)
    out[..., 0] = 1.0
    for _ in range(n):
        out = mul_coeffs(a, out)
    return out


# -- value types --------------------------------------------------------------

class HyperNum:
    """An immutable element of R, H or O."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float).reshape(-1)
        if c.size not in DIMS:
            raise AlgebraError(f"coefficient vector of length {c.size}; expected one of {DIMS}")
        c.flags.writeable = False
        self._c = c

    @classmethod
    def _trusted(cls, c: np.ndarray) -> "HyperNum":
        """Wrap a fresh float array without validation (internal fast path)."""
        obj = cls.__new__(cls)
        c.flags.writeable = False
        obj._c = c
        return obj

    @classmethod
    def real(cls, value: float, dim: int) -> "HyperNum":
        c = np.zeros(dim)
        c[0] = value
        return cls(c)

    @classmethod
    def basis(cls, index: int, dim: int) -> "HyperNum":
        if not 0 <= index < dim:
            raise AlgebraError(f"basis index {index} out of range for dim {dim}")
        c = np.zeros(dim)
        c[index] = 1.0
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def dim(self) -> int:
        return self._c.size

    @property
    def re(self) -> float:
        return float(self._c[0])

    @property
    def im(self) -> "HyperNum":
        c = self._c.copy()
        c[0] = 0.0
        return HyperNum(c)

    def conj(self) -> "HyperNum":
        return HyperNum(conj_coeffs(self._c))

    def norm(self) -> float:
        return float(np.sqrt(self._c @ self._c))

    __abs__ = norm

    def is_real(self) -> bool:
        return not np.any(self._c[1:])

    def isclose(self, other, tol: float = 1e-12) -> bool:
        other = _coerce(other, self.dim)
        return bool(np.max(np.abs(self._c - other._c)) <= tol)

    def _check(self, other) -> "HyperNum":
        other = _coerce(other, self.dim)
        if other.dim != self.dim:
            raise AlgebraError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return HyperNum(self._c + other._c)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return HyperNum(self._c - other._c)

    def __rsub__(self, other):
        other = self._check(other)
        return HyperNum(other._c - self._c)

    def __neg__(self):
        return HyperNum(-self._c)

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            return HyperNum(self._c * float(other))
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, numbers.Real):
            return HyperNum(self._c * float(other))
        return mul(other, self)

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            if other == 0:
                raise DivisionByZeroError("division by zero")
            return HyperNum(self._c / float(other))
        return mul(self, inv(other))

    def __pow__(self, n: int):
        return HyperNum(power_coeffs(self._c, int(n)))

    def __eq__(self, other):
        if not isinstance(other, HyperNum):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(tuple(self._c))

    def __repr__(self):
        return f"{type(self).__name__}({self._c.tolist()})"


def _coerce(value, dim: int) -> HyperNum:
    if isinstance(value, HyperNum):
        return value
    if isinstance(value, numbers.Real):
        return HyperNum.real(float(value), dim)
    return HyperNum(value)


class ImaginaryUnit(HyperNum):
    """A purely imaginary element of norm one; squares to -1."""

    __slots__ = ()

    def __init__(self, coeffs, tol: float = UNIT_TOL):
        super().__init__(coeffs)
        if self.dim == 1:
            raise InvalidUnitError("the real line has no imaginary units")
        if abs(self._c[0]) > tol or abs(self.norm() - 1.0) > tol:
            raise InvalidUnitError(f"not an imaginary unit: {self._c.tolist()}")

    @classmethod
    def from_imag(cls, vector) -> "ImaginaryUnit":
        """Normalise the imaginary part of ``vector`` (real part is dropped)."""
        c = np.array(vector, dtype=float).reshape(-1)
        c[0] = 0.0
        n = float(np.sqrt(c @ c))
        if n == 0.0:
            raise InvalidUnitError("zero imaginary part has no direction")
        return cls(c / n)

    @classmethod
    def basis(cls, index: int, dim: int) -> "ImaginaryUnit":
        if index == 0:
            raise InvalidUnitError("e0 is real")
        return cls(HyperNum.basis(index, dim).coeffs)


@dataclass(frozen=True)
class SlicePoint:
    """The decomposition ``q = x + unit * y`` with ``y >= 0``."""

    x: float
    y: float
    unit: ImaginaryUnit

    def __post_init__(self):
        if self.y < 0:
            raise AlgebraError(f"SlicePoint requires y >= 0, got {self.y}")
        if not isinstance(self.unit, ImaginaryUnit):
            raw = self.unit.coeffs if isinstance(self.unit, HyperNum) else self.unit
            object.__setattr__(self, "unit", ImaginaryUnit(raw))

    @property
    def dim(self) -> int:
        return self.unit.dim

    def coeffs(self) -> np.ndarray:
        c = self.unit.coeffs * self.y
        c[0] = self.x
        return c

    def to_hypernum(self) -> HyperNum:
        return HyperNum(self.coeffs())


@dataclass(frozen=True)
class Basis:
    """Ordered real basis ``(1, I, I_2, ..., I_{dim-1})`` of the algebra."""

    units: tuple

    @property
    def dim(self) -> int:
        return len(self.units)

    @property
    def matrix(self) -> np.ndarray:
        """Coefficient matrix with the basis vectors as columns."""
        return np.column_stack([u.coeffs for u in self.units])

    def is_orthonormal(self, tol: float = 1e-12) -> bool:
        m = self.matrix
        return bool(np.max(np.abs(m.T @ m - np.eye(self.dim))) <= tol)

    def orientation(self) -> float:
        return float(np.linalg.det(self.matrix))


# -- operations ----------------------------------------------------------------

def mul(a: HyperNum, b: HyperNum) -> HyperNum:
    if a.dim != b.dim:
        raise AlgebraError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return HyperNum(mul_coeffs(a.coeffs, b.coeffs))


def conj(q: HyperNum) -> HyperNum:
    return q.conj()


def norm(q: HyperNum) -> float:
    return q.norm()


def inv(q: HyperNum) -> HyperNum:
    if not np.any(q.coeffs):
        raise DivisionByZeroError("inverse of zero")
    return HyperNum(inv_coeffs(q.coeffs))


def exp(q: HyperNum) -> HyperNum:
    return HyperNum(exp_coeffs(q.coeffs))


def default_unit(dim: int) -> ImaginaryUnit:
    return ImaginaryUnit.basis(1, dim)


def decompose(q: HyperNum, fallback: ImaginaryUnit | None = None) -> SlicePoint:
    """Split ``q`` as ``x + I y``; real points take ``fallback`` (default e1)."""
    c = q.coeffs
    y = float(np.sqrt(c[1:] @ c[1:]))
    if y > 0.0:
        u = np.concatenate([[0.0], c[1:] / y])
        return SlicePoint(float(c[0]), y, ImaginaryUnit(u))
    if fallback is None:
        fallback = default_unit(q.dim)
    return SlicePoint(float(c[0]), 0.0, fallback)


def reconstruct(x: float, y: float, unit: HyperNum) -> HyperNum:
    c = np.array(unit.coeffs) * y
    c[0] = x
    return HyperNum(c)


def complete_basis(unit: HyperNum, variant: int = 0) -> Basis:
    """Complete ``{1, unit}`` to a positively oriented orthonormal basis.

    Gram-Schmidt (as a QR factorization) runs over ``1, unit`` followed by the
    canonical imaginary vectors in index order (``variant=0``) or reverse
    index order (``variant=1``).  The canonical vector most aligned with
    ``unit`` is left out, which keeps every step well conditioned.  If the
    result is negatively oriented the last vector is negated.
    """
    return complete_bases([unit], variant)[0]


def complete_bases(units, variant: int = 0) -> list[Basis]:
    """:func:`complete_basis` for a sequence of units, factored in one stack."""
    C = np.array([np.asarray(u.coeffs, dtype=float) for u in units], dtype=float)
    if C.ndim != 2 or C.shape[0] == 0:
        return []
    m, dim = C.shape
    if dim == 1:
        raise InvalidUnitError("the real line has no imaginary units")
    bad = (np.abs(C[:, 0]) > UNIT_TOL) | (np.abs(np.sqrt(np.einsum("ij,ij->i", C, C)) - 1.0) > UNIT_TOL)
    if bad.any():
        raise InvalidUnitError(f"not an imaginary unit: {C[np.argmax(bad)].tolist()}")
    if variant not in (0, 1):
        raise ConfigurationError(f"variant must be 0 or 1, got {variant}")
    C[:, 0] = 0.0
    C /= np.sqrt(np.einsum("ij,ij->i", C, C))[:, None]
    skip = np.argmax(np.abs(C), axis=1)
    A = np.zeros((m, dim, dim))
    A[:, 0, 0] = 1.0
    A[:, :, 1] = C
    idx = np.arange(1, dim)
    for r in range(m):
        order = idx[idx != skip[r]]
        if variant == 1:
            order = order[::-1]
        A[r, order, np.arange(2, dim)] = 1.0
    Q, R = np.linalg.qr(A)
    Q = Q * np.sign(np.diagonal(R, axis1=1, axis2=2))[:, None, :]
    Q[:, :, 0] = 0.0
    Q[:, 0, 0] = 1.0
    Q[:, :, 1] = C
    flip = np.linalg.det(Q) < 0
    Q[flip, :, -1] *= -1.0
    # Columns are orthonormal with zero real part by construction.
    Q = np.ascontiguousarray(np.swapaxes(Q, 1, 2))
    return [
        Basis(tuple([HyperNum._trusted(q[0])] + [ImaginaryUnit._trusted(q[k]) for k in range(1, dim)]))
        for q in Q
    ]
