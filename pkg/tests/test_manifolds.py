import math

import numpy as np
import pytest

from _oracles import e
from slicegeom import HyperNum, ImaginaryUnit, SlicePoint, complete_basis, inv
from slicegeom.differential import conformality_audit
from slicegeom.errors import ConfigurationError, DomainError, ParameterError, PoleError
from slicegeom.manifolds import (
    CHART_NAMES,
    certify_chart,
    chart_from_stem,
    get_chart,
    graph_stem,
    param_catenoid,
    param_deformation,
    param_helicoid,
    param_sphere,
    psi,
    psi_counterexample,
    sphere_chart_inverse,
    sphere_transition,
)
from slicegeom.sampling import random_hypernum_coeffs, random_slice_points, random_units, rng_for
from slicegeom.stem import StemFunction, eval_slice

I4, J4, K4 = (ImaginaryUnit.basis(k, 4) for k in (1, 2, 3))


def pt(x, y, u=I4):
    return SlicePoint(x, y, u)


# -- sphere ------------------------------------------------------------------------

@pytest.mark.parametrize("dim", [4, 8])
def test_north_chart_origin_is_the_south_pole(dim):
    out = param_sphere("north", SlicePoint(0.0, 0.0, ImaginaryUnit.basis(1, dim)))
    np.testing.assert_array_equal(out, -e(dim, dim + 1))


@pytest.mark.parametrize("dim", [4, 8])
def test_unit_norm_points_land_on_the_equator(dim, rng):
    for u in random_units(rng, dim, 20):
        t = rng.uniform(0, math.pi)
        p = SlicePoint(math.cos(t), math.sin(t), u)
        out = param_sphere("north", p)
        np.testing.assert_allclose(out[:-1], p.coeffs(), atol=1e-15)
        assert abs(out[-1]) < 1e-15


@pytest.mark.parametrize("pole", ["north", "south"])
@pytest.mark.parametrize("dim", [4, 8])
def test_sphere_is_conformal_with_the_stereographic_factor(pole, dim, rng):
    chart = get_chart(f"sphere-{pole}", dim)
    for p in random_slice_points(rng, dim, 200, (-3, 3), (0, 3), real_fraction=0.1):
        J = chart.jacobian(p).matrix
        k = 4.0 / (1.0 + p.x ** 2 + p.y ** 2) ** 2
        np.testing.assert_allclose(J.T @ J, k * np.eye(dim), atol=1e-10 * max(1.0, k))
        assert abs(np.linalg.norm(chart(p)) - 1.0) <= 1e-13


def test_south_chart_formula():
    x, y = 0.4, 1.1
    out = param_sphere("south", pt(x, y, J4))
    r = 1 + x * x + y * y
    np.testing.assert_allclose(out[:4], [2 * x / r, 0, -2 * y / r, 0], atol=1e-15)
    assert out[4] == pytest.approx((1 - x * x - y * y) / r, abs=1e-15)


def test_transition_examples():
    assert sphere_transition(HyperNum.real(2.0, 4)) == HyperNum.real(0.5, 4)
    assert sphere_transition(I4).isclose(-I4, 1e-15)
    with pytest.raises(PoleError):
        sphere_transition(HyperNum(np.zeros(8)))


@pytest.mark.parametrize("dim", [4, 8])
def test_transition_equals_chart_inversion(dim):
    from slicegeom import decompose

    rng = rng_for(9)
    for c in random_hypernum_coeffs(rng, dim, 300, scale=2.0):
        q = HyperNum(c)
        on_sphere = param_sphere("north", decompose(q))
        back = sphere_chart_inverse("south", on_sphere)
        want = inv(q)
        assert (back - want).norm() <= 1e-12 * max(1.0, want.norm())
        assert sphere_transition(q).isclose(want, 1e-15)


def test_chart_inverse_rejects_its_pole():
    with pytest.raises(PoleError):
        sphere_chart_inverse("north", e(4, 5))
    with pytest.raises(PoleError):
        sphere_chart_inverse("south", -e(4, 5))


# -- helicoid and catenoid ----------------------------------------------------------

def test_helicoid_values():
    np.testing.assert_array_equal(param_helicoid(pt(0.0, 0.0)), np.zeros(7))
    x = 0.9
    want = np.zeros(7)
    want[0] = math.sinh(x)
    np.testing.assert_allclose(param_helicoid(pt(x, 0.0, K4)), want, atol=1e-15)


def _helicoid_matrix(x, y):
    if y == 0:
        s = math.sinh(x)
        return np.array([
            [math.cosh(x), 0, 0, 0],
            [0, s, 0, 0],
            [0, 0, s, 0],
            [0, 0, 0, s],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
        ])
    c = math.sinh(x) * math.sin(y) / y
    return np.array([
        [math.cosh(x) * math.cos(y), -math.sinh(x) * math.sin(y), 0, 0],
        [math.cosh(x) * math.sin(y), math.sinh(x) * math.cos(y), 0, 0],
        [0, 0, c, 0],
        [0, 0, 0, c],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
    ])


@pytest.mark.parametrize("x,y", [(1.0, math.pi / 2), (-0.5, 0.3), (1.3, 0.0), (0.2, 2.5)])
def test_helicoid_jacobian_matches_the_closed_form(x, y):
    chart = get_chart("helicoid", 4)
    J = chart.jacobian(pt(x, y), complete_basis(I4)).matrix
    np.testing.assert_allclose(J, _helicoid_matrix(x, y), atol=1e-15)


def test_helicoid_reference_point_entries():
    J = get_chart("helicoid", 4).jacobian(pt(1.0, math.pi / 2)).matrix
    assert J[1, 0] == pytest.approx(math.cosh(1.0), abs=1e-15)
    assert J[0, 1] == pytest.approx(-math.sinh(1.0), abs=1e-15)
    assert J[2, 2] == pytest.approx(math.sinh(1.0) * 2 / math.pi, abs=1e-15)


def test_catenoid_values_and_domain():
    np.testing.assert_array_equal(param_catenoid(pt(0.0, 0.0)), [1, 0, 0, 0, 0])
    with pytest.raises(DomainError):
        param_catenoid(pt(0.0, math.pi))
    with pytest.raises(DomainError):
        param_catenoid(pt(0.0, 3.5))


def test_catenoid_perp_factor():
    chart = get_chart("catenoid", 8)
    x, y = 0.7, 1.9
    rep = conformality_audit(chart.jacobian(pt(x, y, ImaginaryUnit.basis(3, 8))))
    assert rep.perp_block.factor == pytest.approx((math.cosh(x) * math.sin(y) / y) ** 2, rel=1e-14)
    assert rep.slice_conformal


def test_catenoid_real_axis_is_fully_conformal():
    x = -1.1
    J = get_chart("catenoid", 4).jacobian(pt(x, 0.0), complete_basis(I4)).matrix
    np.testing.assert_allclose(J[:, 0], [math.sinh(x), 0, 0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(J[1:4, 1:], math.cosh(x) * np.eye(3), atol=1e-15)
    rep = conformality_audit(J)
    assert rep.conformal
    assert rep.full.factor == pytest.approx(math.cosh(x) ** 2, rel=1e-15)


# -- deformation family ------------------------------------------------------------

@pytest.mark.parametrize("dim", [4, 8])
def test_deformation_endpoints(dim, rng):
    for p in random_slice_points(rng, dim, 50, (-2, 2), (0, 3.0), real_fraction=0.1):
        h = param_deformation(0.0, p)
        c = param_deformation(math.pi / 2, p)
        hel = param_helicoid(p)
        cat = param_catenoid(p)
        np.testing.assert_allclose(h[:dim], hel[:dim], atol=1e-14)
        np.testing.assert_allclose(h[dim + 1:], hel[dim:], atol=1e-14)
        assert h[dim] == 0.0
        np.testing.assert_allclose(c[:dim], cat[:dim], atol=1e-14)
        assert c[dim] == pytest.approx(cat[dim], abs=1e-14)
        np.testing.assert_allclose(c[dim + 1:], 0.0, atol=1e-14)


@pytest.mark.parametrize("theta", np.linspace(0, math.pi / 2, 7))
def test_deformation_slice_block_equal_norms(theta, rng):
    chart = get_chart("deformation", 4, theta=theta)
    for p in random_slice_points(rng, 4, 40, (-2, 2), (0, 3.0), real_fraction=0.1):
        J = chart.jacobian(p).matrix
        n0, n1 = np.sum(J[:, 0] ** 2), np.sum(J[:, 1] ** 2)
        A = math.cosh(p.x) * math.cos(theta) + math.sinh(p.x) * math.sin(theta)
        B = math.sinh(p.x) * math.cos(theta) + math.cosh(p.x) * math.sin(theta)
        assert n0 == pytest.approx(A * A + math.sin(theta) ** 2, rel=1e-13)
        assert n1 == pytest.approx(B * B + math.cos(theta) ** 2, rel=1e-13)
        assert abs((A * A + math.sin(theta) ** 2) - (B * B + math.cos(theta) ** 2)) <= 1e-12 * max(1.0, A * A)


def test_deformation_is_continuous_in_theta(rng):
    thetas = np.arange(0.0, math.pi / 2, 1e-3)
    for p in random_slice_points(rng, 4, 5, (-2, 2), (0, 3.0)):
        vals = np.array([param_deformation(t, p) for t in thetas])
        scale = max(1.0, float(np.max(np.abs(vals))))
        assert np.max(np.abs(np.diff(vals, axis=0))) <= 1e-2 * scale


@pytest.mark.parametrize("theta", [-0.1, math.pi / 2 + 0.01, 4.0])
def test_deformation_rejects_theta_outside_range(theta):
    with pytest.raises(ParameterError):
        get_chart("deformation", 4, theta=theta)


# -- psi ---------------------------------------------------------------------------

def test_psi_fixes_the_axes():
    for u in (I4, J4, K4):
        assert psi(u) == u


def test_psi_on_the_diagonal():
    u = ImaginaryUnit(np.array([0, 1, 1, 1]) / math.sqrt(3))
    s = 1 / math.sqrt(3)
    raw = np.array([0, s ** 3, s, s ** 3])
    want = raw / math.sqrt(1 / 27 + 1 / 3 + 1 / 27)
    np.testing.assert_allclose(psi(u).coeffs, want, atol=1e-15)


def test_psi_is_odd(rng):
    for u in random_units(rng, 4, 50):
        assert psi(-u).isclose(-psi(u), 1e-15)


def test_psi_map_is_well_defined_on_conjugate_parameters(rng):
    for u in random_units(rng, 4, 20):
        a = psi_counterexample(SlicePoint(0.3, 1.2, u))
        b = get_chart("psi", 4).map_coeffs(SlicePoint(0.3, 1.2, u).coeffs())
        np.testing.assert_allclose(a, b, atol=1e-15)


def test_psi_perp_block_fails_at_non_real_points():
    chart = get_chart("psi", 4)
    fails = 0
    for p in chart.sample_points(rng_for(1), 100):
        rep = conformality_audit(chart.jacobian(p))
        fails += rep.perp_block.verdict == "fail"
        assert rep.slice_block.passed
    assert fails == 100


def test_psi_norm_ratio_at_i():
    chart = get_chart("psi", 4)
    for x, y in [(1.0, 1.0), (-0.5, 0.3), (2.0, 1.7)]:
        rep = conformality_audit(chart.jacobian(pt(x, y), complete_basis(I4)))
        assert rep.perp_block.norm_ratio == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_psi_only_exists_in_dimension_4():
    with pytest.raises(ConfigurationError):
        get_chart("psi", 8)


# -- catalog ----------------------------------------------------------------------

def test_registry_names():
    for name in CHART_NAMES:
        assert get_chart(name, 4).name.startswith(name.split("-")[0])
    assert get_chart("sphere", 4).name == "sphere-north"
    with pytest.raises(ConfigurationError):
        get_chart("torus", 4)
    with pytest.raises(ConfigurationError):
        get_chart("helicoid", 5)


@pytest.mark.parametrize("name", ["sphere-north", "sphere-south", "helicoid", "catenoid", "deformation", "nroot", "log"])
@pytest.mark.parametrize("dim", [4, 8])
def test_induced_map_agrees_with_eval_slice(name, dim):
    chart = get_chart(name, dim)
    for p in chart.sample_points(rng_for(2), 100, real_fraction=0.1):
        vals = np.concatenate([v.coeffs for v in eval_slice(chart.stem, p)])
        np.testing.assert_allclose(chart(p), vals[chart.rows], atol=1e-12)


@pytest.mark.parametrize("name", ["sphere-north", "sphere-south", "helicoid", "catenoid", "deformation", "nroot"])
@pytest.mark.parametrize("dim", [4, 8])
def test_catalog_charts_pass_their_expected_class(name, dim):
    chart = get_chart(name, dim)
    for p in chart.sample_points(rng_for(3), 1000, real_fraction=0.05):
        rep = conformality_audit(chart.jacobian(p), 1e-9)
        assert rep.passes(chart.expected_class), (p, rep.failing_blocks())


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("dim", [4, 8])
def test_graphs_of_slice_regular_functions_are_slice_conformal(seed, dim):
    rng = rng_for(seed)
    coeffs = list(rng.normal(size=rng.integers(2, 6)))
    f = StemFunction.polynomial(coeffs)
    chart = chart_from_stem(graph_stem(f), dim)
    for p in chart.sample_points(rng, 200, real_fraction=0.05):
        assert conformality_audit(chart.jacobian(p)).slice_conformal


def test_graph_chart_from_expression():
    chart = get_chart("graph:z^2 + 1", 8)
    p = SlicePoint(0.5, 0.5, ImaginaryUnit.basis(6, 8))
    out = chart(p)
    q = p.to_hypernum()
    np.testing.assert_allclose(out[:8], q.coeffs, atol=1e-15)
    np.testing.assert_allclose(out[8:], (q * q + HyperNum.real(1.0, 8)).coeffs, atol=1e-14)


@pytest.mark.parametrize("name", ["helicoid", "catenoid", "deformation", "nroot"])
def test_catalog_certificates_pass(name):
    assert certify_chart(get_chart(name, 4)).passed


def test_psi_certificate_reports_the_perp_block():
    cert = certify_chart(get_chart("psi", 4))
    assert not cert.passed
    assert cert.failing_blocks == ["perp"]
