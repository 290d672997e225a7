import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import e, slice_poly
from slicegeom import HyperNum, ImaginaryUnit, SlicePoint, mul
from slicegeom.errors import DegeneratePairError, DomainError, UnsupportedError
from slicegeom.differential import stem_conformality_residual
from slicegeom.manifolds import catenoid_stem, helicoid_stem
from slicegeom.sampling import random_units, rng_for
from slicegeom.stem import (
    StemFunction,
    SymmetricDomain,
    check_holomorphic,
    check_intrinsic,
    eval_slice,
    representation_formula,
    slice_derivative,
    spherical_derivative,
    spherical_quotient,
)

SQUARE = StemFunction.from_complex(lambda z: z * z, lambda z: 2 * z, name="z^2")
CONJ = StemFunction.from_xy(lambda x, y: complex(x, -y), lambda x, y: (1.0, -1j), name="conj")
CONST = StemFunction.from_complex(lambda z: 3.0, lambda z: 0.0, name="3")
IDENT = StemFunction.identity()


def unit(k, dim=4):
    return ImaginaryUnit.basis(k, dim)


def point(x, y, u):
    return SlicePoint(x, y, u)


# -- evaluation -------------------------------------------------------------------

@pytest.mark.parametrize("dim", [4, 8])
def test_square_at_one_plus_two_j(dim, rng):
    for J in random_units(rng, dim, 20):
        (val,) = eval_slice(SQUARE, point(1.0, 2.0, J))
        q = HyperNum.real(1.0, dim) + J * 2.0
        assert val.isclose(mul(q, q), 1e-14)
        assert val.isclose(HyperNum.real(-3.0, dim) + J * 4.0, 1e-14)


def test_real_point_gives_f1():
    F = helicoid_stem()
    vals = eval_slice(F, point(0.7, 0.0, unit(2)))
    f1, _ = F(0.7, 0.0)
    for v, c in zip(vals, f1):
        assert v == HyperNum.real(float(c[0]), 4)


@pytest.mark.parametrize("dim", [4, 8])
def test_identity_stem_reproduces_the_point(dim, rng):
    for J in random_units(rng, dim, 10):
        p = point(-0.3, 1.7, J)
        (val,) = eval_slice(IDENT, p)
        assert val.isclose(p.to_hypernum(), 1e-15)


def test_outside_domain_is_a_domain_error():
    with pytest.raises(DomainError):
        eval_slice(catenoid_stem(), point(0.0, 4.0, unit(1)))


@pytest.mark.parametrize("dim", [4, 8])
def test_real_stems_preserve_slices(dim, rng):
    F = StemFunction.polynomial([0.5, -1.0, 2.0, 0.25])
    for J in random_units(rng, dim, 50):
        x, y = rng.uniform(-2, 2), rng.uniform(0, 2)
        (val,) = eval_slice(F, point(x, y, J))
        c = val.coeffs
        perp = c[1:] - (c[1:] @ J.coeffs[1:]) * J.coeffs[1:]
        assert np.max(np.abs(perp)) < 1e-13


# -- intrinsic and holomorphic -------------------------------------------------------

def test_intrinsic_checks():
    rep = check_intrinsic(SQUARE)
    assert rep.passed and rep.residual == 0.0
    bad = StemFunction.from_xy(lambda x, y: complex(x, 1.0))
    rep = check_intrinsic(bad)
    assert not rep.passed and rep.odd_residual > 0.5
    assert check_intrinsic(CONJ).passed


@pytest.mark.parametrize("F", [helicoid_stem(), catenoid_stem(), SQUARE], ids=lambda f: f.name)
def test_f2_vanishes_on_the_real_axis(F):
    for x in np.linspace(-2, 2, 9):
        _, f2 = F(float(x), 0.0)
        assert np.max(np.abs(f2)) == 0.0


def test_symmetric_domain_samples_are_symmetric():
    for dom in (SymmetricDomain.plane(), SymmetricDomain.strip(math.pi), SymmetricDomain.strip(2.0, x_min=0.0)):
        pts = dom.sample(3, 200)
        assert dom.check_symmetric(pts)
        assert all((x, -y) in dom for x, y in pts)


def test_strip_sampler_includes_real_points():
    pts = SymmetricDomain.strip(math.pi).sample(0, 64)
    assert np.any(pts[:, 1] == 0.0)


def test_holomorphy_checks():
    assert check_holomorphic(SQUARE, (1.0, 1.0))
    assert not check_holomorphic(CONJ, (0.3, -0.2))


def test_helicoid_stem_is_conformal_but_not_holomorphic():
    # dG/dx = cosh x (cos y + iota sin y) differs from -iota dG/dy = sinh x (...).
    F = helicoid_stem()
    verdict = check_holomorphic(F, (1.0, math.pi / 3))
    assert not verdict
    want = (math.cosh(1.0) - math.sinh(1.0)) * 0.5
    f1x, _, _, f2y = F.partials(1.0, math.pi / 3)
    assert f1x[0, 0] - f2y[0, 0] == pytest.approx(want, abs=1e-15)
    assert stem_conformality_residual(F, 1.0, math.pi / 3) < 1e-15


def test_holomorphy_with_numeric_partials():
    F = StemFunction.from_complex(lambda z: z ** 3)
    assert not F.has_analytic_partials
    assert check_holomorphic(F, (0.4, 0.9), tol=1e-6)
    G = StemFunction.from_xy(lambda x, y: complex(x, -y))
    assert not check_holomorphic(G, (0.4, 0.9), tol=1e-6)


# -- derivatives ---------------------------------------------------------------------

def test_slice_derivative_examples(rng):
    (J,) = random_units(rng, 4, 1)
    (d,) = slice_derivative(SQUARE, point(1.0, 2.0, J))
    assert d.isclose(HyperNum.real(2.0, 4) + J * 4.0, 1e-14)
    (d,) = slice_derivative(CONST, point(0.5, 0.5, J))
    assert d == HyperNum(np.zeros(4))
    (d,) = slice_derivative(IDENT, point(-1.0, 3.0, J))
    assert d == HyperNum.real(1.0, 4)


def test_slice_derivative_rejects_non_holomorphic_stems():
    with pytest.raises(UnsupportedError):
        slice_derivative(CONJ, point(0.5, 0.5, unit(1)))


@pytest.mark.parametrize("dim", [4, 8])
def test_slice_derivative_matches_difference_along_alpha(dim, rng):
    F = StemFunction.polynomial([1.0, 0.0, -0.5, 0.2, 0.1])
    h = 1e-5
    for J in random_units(rng, dim, 30):
        x, y = rng.uniform(-1.5, 1.5), rng.uniform(0, 1.5)
        (d,) = slice_derivative(F, point(x, y, J))
        (a,) = eval_slice(F, point(x + h, y, J))
        (b,) = eval_slice(F, point(x - h, y, J))
        assert ((a - b) / (2 * h)).isclose(d, 1e-6)


def test_spherical_derivative_examples():
    (s,) = spherical_derivative(SQUARE, point(1.0, 1.0, unit(1)))
    assert s.isclose(HyperNum.real(2.0, 4), 1e-15)
    (s,) = spherical_derivative(SQUARE, point(1.5, 0.0, unit(1)))
    assert s.isclose(HyperNum.real(3.0, 4), 1e-15)
    (s,) = spherical_derivative(CONST, point(0.2, 0.7, unit(2)))
    assert s == HyperNum(np.zeros(4))


# -- representation formula -----------------------------------------------------------

def _poly_value(coeffs, x, y, u):
    return HyperNum(slice_poly(coeffs, x, y, u.coeffs))


def test_representation_formula_square_example():
    i, j, k = unit(1), unit(2), unit(3)
    sq = [np.zeros(4), np.zeros(4), e(0, 4)]
    fM = _poly_value(sq, 1.0, 1.0, i)
    fN = _poly_value(sq, 1.0, 1.0, j)
    assert fM == HyperNum(2 * e(1, 4)) and fN == HyperNum(2 * e(2, 4))
    got = representation_formula(fM, fN, i, j, k)
    assert got.isclose(HyperNum(2 * e(3, 4)), 1e-15)
    one_k = HyperNum.real(1.0, 4) + k
    assert got.isclose(mul(one_k, one_k), 1e-15)


def test_representation_formula_collapses_at_l_equal_m(rng):
    M, N = random_units(rng, 8, 2)
    fM = HyperNum(rng.normal(size=8))
    fN = HyperNum(rng.normal(size=8))
    assert representation_formula(fM, fN, M, N, M).isclose(fM, 1e-12)


def test_representation_formula_of_a_constant(rng):
    M, N, L = random_units(rng, 4, 3)
    c = HyperNum(rng.normal(size=4))
    assert representation_formula(c, c, M, N, L).isclose(c, 1e-14)


def test_representation_formula_needs_distinct_units():
    i = unit(1)
    with pytest.raises(DegeneratePairError):
        representation_formula(i, i, i, i, unit(2))


@pytest.mark.parametrize("dim", [4, 8])
@given(seed=st.integers(0, 2**32 - 1), degree=st.integers(0, 6))
def test_representation_formula_predicts_polynomials(dim, seed, degree):
    rng = rng_for(seed)
    coeffs = list(rng.normal(size=(degree + 1, dim)))
    M, N, L = random_units(rng, dim, 3)
    x, y = rng.uniform(-1.5, 1.5), rng.uniform(0.05, 1.5)
    fM, fN = _poly_value(coeffs, x, y, M), _poly_value(coeffs, x, y, N)
    want = _poly_value(coeffs, x, y, L)
    got = representation_formula(fM, fN, M, N, L)
    assert (got - want).norm() <= 1e-10 * max(1.0, want.norm())
    # The package's own slice evaluation agrees with the oracle.
    (ev,) = eval_slice(StemFunction.polynomial(coeffs), SlicePoint(x, y, L))
    assert (ev - want).norm() <= 1e-12 * max(1.0, want.norm())


@pytest.mark.parametrize("dim", [4, 8])
@given(seed=st.integers(0, 2**32 - 1))
def test_spherical_quotient_matches_f2_over_y(dim, seed):
    rng = rng_for(seed)
    coeffs = rng.normal(size=(5, dim))
    F = StemFunction.polynomial(list(coeffs))
    M, N = random_units(rng, dim, 2)
    x, y = rng.uniform(-1.5, 1.5), rng.uniform(0.05, 1.5)
    fM, fN = _poly_value(coeffs, x, y, M), _poly_value(coeffs, x, y, N)
    got = spherical_quotient(fM, fN, M, N, y)
    (want,) = spherical_derivative(F, SlicePoint(x, y, M))
    assert (got - want).norm() <= 1e-10 * max(1.0, want.norm())
