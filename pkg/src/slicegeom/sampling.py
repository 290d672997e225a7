"""Seeded random points on the unit sphere of imaginary units and on slices."""
from __future__ import annotations

import numpy as np

from .algebra import ImaginaryUnit, SlicePoint


def rng_for(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unit_coeffs(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """Uniform samples of the imaginary unit sphere, shape ``(count, dim)``.

    Normalised Gaussian imaginary parts; uniform on the (dim-2)-sphere.
    """
    g = rng.standard_normal((count, dim - 1))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    out = np.zeros((count, dim))
    out[:, 1:] = g
    return out


def random_units(rng: np.random.Generator, dim: int, count: int) -> list[ImaginaryUnit]:
    return [ImaginaryUnit(c) for c in random_unit_coeffs(rng, dim, count)]


def random_hypernum_coeffs(rng: np.random.Generator, dim: int, count: int, scale: float = 1.0) -> np.ndarray:
    return scale * rng.standard_normal((count, dim))


def random_slice_points(
    rng: np.random.Generator,
    dim: int,
    count: int,
    x_range=(-2.0, 2.0),
    y_range=(0.0, 2.0),
    real_fraction: float = 0.0,
) -> list[SlicePoint]:
    """Random slice points; a ``real_fraction`` share is placed on the real axis."""
    xs = rng.uniform(x_range[0], x_range[1], count)
    ys = rng.uniform(y_range[0], y_range[1], count)
    if real_fraction > 0:
        ys[rng.uniform(size=count) < real_fraction] = 0.0
    units = random_unit_coeffs(rng, dim, count)
    return [SlicePoint(float(x), float(y), ImaginaryUnit(u)) for x, y, u in zip(xs, ys, units)]


def grid_slice_points(
    rng: np.random.Generator,
    dim: int,
    nx: int,
    ny: int,
    x_range=(-2.0, 2.0),
    y_range=(0.0, 2.0),
) -> list[SlicePoint]:
    """A tensor grid in (x, y); each grid point gets a seeded random unit."""
    xs = np.linspace(x_range[0], x_range[1], nx)
    ys = np.linspace(y_range[0], y_range[1], ny)
    units = random_unit_coeffs(rng, dim, nx * ny)
    pts = []
    for k, (x, y) in enumerate((x, y) for x in xs for y in ys):
        pts.append(SlicePoint(float(x), float(y), ImaginaryUnit(units[k])))
    return pts
