import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slicegeom import HyperNum, ImaginaryUnit, SlicePoint, exp
from slicegeom.errors import BranchError, DomainError, NotOnManifoldError, ParameterError, PoleError
from slicegeom.logroot import (
    LogPoint,
    RootPoint,
    adapted_exp,
    adapted_log,
    log_preimages,
    nth_root,
    phi_n,
    principal_log,
    principal_nthroot,
    slice_power,
)
from slicegeom.sampling import random_hypernum_coeffs, random_units, rng_for

I4, J4, K4 = (ImaginaryUnit.basis(k, 4) for k in (1, 2, 3))


def H(*c):
    return HyperNum(c)


def real(v, dim=4):
    return HyperNum.real(v, dim)


# -- E and L ---------------------------------------------------------------------

def test_adapted_exp_examples():
    pt = adapted_exp(HyperNum(np.zeros(4)))
    assert pt.q == real(1.0) and pt.p == HyperNum(np.zeros(4))
    pt = adapted_exp(H(1, math.pi / 3, 0, 0))
    want = H(math.e * math.cos(math.pi / 3), math.e * math.sin(math.pi / 3), 0, 0)
    assert pt.q.isclose(want, 1e-15)
    assert pt.p == H(0, math.pi / 3, 0, 0)
    pt = adapted_exp(I4 * math.pi)
    assert pt.q.isclose(real(-1.0), 1e-15)
    assert pt.p.isclose(I4 * math.pi, 0)


def test_adapted_log_examples():
    assert adapted_log(LogPoint(real(1.0), HyperNum(np.zeros(4)))) == HyperNum(np.zeros(4))
    assert adapted_log(LogPoint(real(-1.0), I4 * math.pi)).isclose(I4 * math.pi, 1e-15)


def test_adapted_log_validates_the_point():
    with pytest.raises(NotOnManifoldError):
        adapted_log(LogPoint(real(1.0), I4 * 0.5))
    with pytest.raises(PoleError):
        adapted_log(LogPoint(HyperNum(np.zeros(4)), HyperNum(np.zeros(4))))


@pytest.mark.parametrize("dim", [4, 8])
def test_log_exp_round_trips(dim):
    rng = rng_for(21)
    for c in random_hypernum_coeffs(rng, dim, 1000, scale=2.0):
        q = HyperNum(c)
        pt = adapted_exp(q)
        assert pt.residual() <= 1e-12
        assert (adapted_log(pt) - q).norm() <= 1e-12 * max(1.0, q.norm())
        again = adapted_exp(adapted_log(pt))
        assert (again.q - pt.q).norm() <= 1e-12 * max(1.0, pt.q.norm())
        assert (again.p - pt.p).norm() <= 1e-12 * max(1.0, pt.p.norm())


def test_log_point_serializes():
    d = adapted_exp(H(0.5, 0.1, 0.2, 0.3)).to_dict()
    assert set(d) == {"q", "p"} and len(d["q"]) == 4
    json.dumps(d)


# -- principal log -------------------------------------------------------------------

def test_principal_log_examples():
    assert principal_log(real(1.0)) == HyperNum(np.zeros(4))
    assert principal_log(I4).isclose(I4 * (math.pi / 2), 1e-15)
    q = (real(math.cos(1.0)) + J4 * math.sin(1.0)) * math.e
    assert principal_log(q).isclose(real(1.0) + J4, 1e-15)


def test_principal_log_rejects_negative_reals_and_zero():
    with pytest.raises(BranchError):
        principal_log(real(-2.0))
    with pytest.raises(PoleError):
        principal_log(HyperNum(np.zeros(8)))


def test_principal_log_negative_unit_override():
    got = principal_log(real(-2.0), negative_unit=K4)
    assert got.isclose(real(math.log(2.0)) + K4 * math.pi, 1e-15)
    assert exp(got).isclose(real(-2.0), 1e-15)


@pytest.mark.parametrize("dim", [4, 8])
@given(seed=st.integers(0, 2**32 - 1))
def test_exp_of_principal_log(dim, seed):
    q = HyperNum(random_hypernum_coeffs(rng_for(seed), dim, 1, scale=3.0)[0])
    if q.norm() < 1e-6:
        return
    w = principal_log(q)
    assert (exp(w) - q).norm() <= 1e-12 * max(1.0, q.norm())
    assert 0.0 <= np.linalg.norm(w.coeffs[1:]) < math.pi


def test_preimage_sampler_exhibits_the_obstruction():
    for dim in (4, 8):
        x = real(-2.0, dim)
        ws = log_preimages(x, ks=(0,))
        assert len(ws) >= 2
        assert (ws[0] - ws[1]).norm() > 1.0
        for w in ws:
            assert w.re == pytest.approx(math.log(2.0), abs=1e-15)
            assert abs(np.linalg.norm(w.coeffs[1:]) - math.pi) < 1e-15
            assert (exp(w) - x).norm() <= 1e-12


def test_preimages_of_a_non_real_point_differ_by_full_turns():
    q = H(0.3, 0.4, -0.2, 1.0)
    ws = log_preimages(q, ks=(0, 1, -1))
    for w in ws:
        assert (exp(w) - q).norm() <= 1e-12
    assert ws[0].isclose(principal_log(q), 1e-15)


# -- n-th roots ------------------------------------------------------------------------

def test_phi_examples():
    pt = phi_n(2, SlicePoint(1.0, 0.0, I4))
    assert pt.q.isclose(real(math.e), 1e-15) and pt.s == real(2.0)
    pt = phi_n(2, SlicePoint(1.0, math.pi, I4))
    assert pt.q.isclose(real(-math.e), 1e-15)
    assert pt.s.isclose(I4 * 2.0, 1e-15)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_phi_s_has_norm_n(n, rng):
    for u in random_units(rng, 8, 20):
        p = SlicePoint(rng.uniform(0.01, 2), rng.uniform(0, math.pi * n * 0.999), u)
        assert abs(phi_n(n, p).s.norm() - n) <= 1e-12


@pytest.mark.parametrize("x,y", [(0.0, 1.0), (-1.0, 0.5), (1.0, 2 * math.pi)])
def test_phi_domain(x, y):
    with pytest.raises(DomainError):
        phi_n(2, SlicePoint(x, y, I4))


@pytest.mark.parametrize("n", [1, 0, -3, 2.5])
def test_bad_root_order(n):
    with pytest.raises(ParameterError):
        principal_nthroot(n, real(4.0))


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_root_closure_values_are_exact(n):
    for r in np.linspace(0.0, 10.0, 41):
        plus = nth_root(RootPoint(n, real(r), real(float(n))))
        minus = nth_root(RootPoint(n, real(r), real(-float(n))))
        assert plus == real(r ** (1.0 / n))
        assert minus == real(-(r ** (1.0 / n)))


def test_root_at_q_zero_is_zero(rng):
    (u,) = random_units(rng, 4, 1)
    assert nth_root(RootPoint(3, HyperNum(np.zeros(4)), u * 3.0)) == HyperNum(np.zeros(4))


def test_cube_root_of_minus_eight():
    pt = phi_n(3, SlicePoint(math.log(8.0), math.pi, I4))
    r = nth_root(pt)
    assert r.isclose(exp(I4 * (math.pi / 3)) * 2.0, 1e-14)
    assert slice_power(r, 3).isclose(real(-8.0), 1e-13)
    assert exp(HyperNum([math.log(8.0), math.pi, 0, 0])).isclose(real(-8.0), 1e-14)


def test_root_validates_the_point():
    with pytest.raises(NotOnManifoldError):
        nth_root(RootPoint(2, real(1.0), real(1.5)))


@pytest.mark.parametrize("n", [2, 3, 6])
def test_root_of_phi_is_exp_over_n(n, rng):
    for u in random_units(rng, 8, 30):
        w = SlicePoint(rng.uniform(0.01, 2), rng.uniform(0, math.pi * n * 0.99), u)
        r = nth_root(phi_n(n, w))
        assert (slice_power(r, n) - exp(w.to_hypernum())).norm() <= 1e-11 * max(1.0, math.exp(w.x))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_root_closure_is_the_limit_towards_y_equal_pi_n(n):
    u = J4
    x = 0.8
    limit = nth_root(RootPoint(n, real(abs(math.exp(x))), real(-float(n))))
    errs = []
    for eps in (1e-1, 1e-3, 1e-5, 1e-7):
        r = nth_root(phi_n(n, SlicePoint(x, math.pi * n - eps, u)))
        errs.append((r - limit).norm())
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 1e-6


def test_principal_root_examples():
    assert principal_nthroot(2, real(4.0)).isclose(real(2.0), 1e-15)
    with pytest.raises(BranchError):
        principal_nthroot(2, real(-4.0))
    assert principal_nthroot(4, J4).isclose(exp(J4 * (math.pi / 8)), 1e-15)
    assert principal_nthroot(2, real(-4.0), negative_unit=I4).isclose(I4 * 2.0, 1e-15)


@pytest.mark.parametrize("n", range(2, 8))
@pytest.mark.parametrize("dim", [4, 8])
def test_principal_root_power_identity(n, dim):
    rng = rng_for(n * 10 + dim)
    for c in random_hypernum_coeffs(rng, dim, 300, scale=2.0):
        q = HyperNum(c)
        r = principal_nthroot(n, q)
        assert (slice_power(r, n) - q).norm() <= 1e-11 * max(1.0, q.norm())


def test_root_point_serializes():
    d = phi_n(3, SlicePoint(0.5, 1.0, K4)).to_dict()
    assert d["n"] == 3 and len(d["s"]) == 4
    json.dumps(d)
