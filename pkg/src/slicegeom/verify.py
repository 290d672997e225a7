"""The acceptance battery.

Each criterion is a function ``(seed) -> CriterionResult``.  Results carry
the worst metric seen, the tolerance it is judged against and a short
detail string.  Nothing time dependent enters a result, so reports are
byte-identical for a fixed seed.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .algebra import (
    HyperNum,
    ImaginaryUnit,
    SlicePoint,
    complete_bases,
    complete_basis,
    conj_coeffs,
    decompose,
    exp,
    inv_coeffs,
    mul_coeffs,
    norm_coeffs,
    power_coeffs,
)
from .differential import certify_theorem, conformality_audit
from .logroot import (
    RootPoint,
    adapted_exp,
    adapted_log,
    log_preimages,
    nth_root,
    principal_log,
    principal_nthroot,
)
from .manifolds import (
    ManifoldChart,
    catenoid_stem,
    certify_chart,
    deformation_stem,
    get_chart,
    helicoid_stem,
    nroot_stem,
    param_sphere,
    sphere_chart_inverse,
    sphere_transition,
)
from .sampling import random_hypernum_coeffs, random_unit_coeffs, rng_for
from .stem import StemFunction, eval_slice, representation_formula

DIMS = (4, 8)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    metric: float
    tolerance: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: metric={self.metric:.3e} tol={self.tolerance:.0e} {self.detail}"

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "name": self.name,
            "passed": self.passed,
            "metric": self.metric,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def _result(number, name, metric, tol, detail, extra_ok=True) -> CriterionResult:
    metric = float(metric)
    return CriterionResult(number, name, bool(metric <= tol and extra_ok), metric, tol, detail)


# -- 1 ------------------------------------------------------------------------

def algebra_laws(seed=0, pairs: int = 10_000) -> CriterionResult:
    rng = rng_for(seed)
    worst = {"norm": 0.0, "alternative": 0.0, "conj": 0.0}
    for dim in DIMS:
        p = random_hypernum_coeffs(rng, dim, pairs)
        q = random_hypernum_coeffs(rng, dim, pairs)
        np_, nq = norm_coeffs(p), norm_coeffs(q)
        pq = mul_coeffs(p, q)
        worst["norm"] = max(worst["norm"], np.max(np.abs(norm_coeffs(pq) - np_ * nq) / (np_ * nq)))
        lhs = conj_coeffs(pq)
        rhs = mul_coeffs(conj_coeffs(q), conj_coeffs(p))
        worst["conj"] = max(worst["conj"], np.max(norm_coeffs(lhs - rhs) / (np_ * nq)))
        if dim == 8:
            scale = nq * nq * np_
            left = norm_coeffs(mul_coeffs(mul_coeffs(q, q), p) - mul_coeffs(q, mul_coeffs(q, p))) / scale
            right = norm_coeffs(mul_coeffs(mul_coeffs(p, q), q) - mul_coeffs(p, mul_coeffs(q, q))) / scale
            worst["alternative"] = max(worst["alternative"], np.max(left), np.max(right))
    detail = ", ".join(f"{k}={v:.2e}" for k, v in worst.items())
    return _result(1, "algebra laws", max(worst.values()), 1e-12, f"{pairs} pairs per dim; {detail}")


# -- 2 ------------------------------------------------------------------------

def representation_formula_check(seed=0, stems: int = 1000) -> CriterionResult:
    rng = rng_for(seed)
    worst = 0.0
    for dim in DIMS:
        units = random_unit_coeffs(rng, dim, 3 * stems).reshape(stems, 3, dim)
        for k in range(stems):
            degree = int(rng.integers(0, 7))
            F = StemFunction.polynomial(random_hypernum_coeffs(rng, dim, degree + 1))
            x, y = rng.uniform(-1.5, 1.5), rng.uniform(0.05, 1.5)
            M, N, L = (ImaginaryUnit(u) for u in units[k])
            fM = eval_slice(F, SlicePoint(x, y, M))[0]
            fN = eval_slice(F, SlicePoint(x, y, N))[0]
            direct = eval_slice(F, SlicePoint(x, y, L))[0]
            predicted = representation_formula(fM, fN, M, N, L)
            scale = max(fM.norm(), fN.norm(), direct.norm(), 1e-300)
            worst = max(worst, (predicted - direct).norm() / scale)
    return _result(2, "representation formula", worst, 1e-10, f"{stems} polynomial stems per dim, degree <= 6")


# -- 3 ------------------------------------------------------------------------

def catalog_charts(dim: int) -> list[ManifoldChart]:
    names = ["sphere-north", "sphere-south", "helicoid", "catenoid", "deformation", "nroot", "log", "graph:z^3 - 2*z"]
    if dim == 4:
        names.append("psi")
    return [get_chart(name, dim) for name in names]


def jacobian_oracle(seed=0, points: int = 1000) -> CriterionResult:
    worst, worst_name = 0.0, ""
    charts = 0
    for dim in DIMS:
        for chart in catalog_charts(dim):
            charts += 1
            pts = chart.sample_points(seed, points, real_fraction=0.05)
            bases = complete_bases([p.unit for p in pts])
            numeric = chart.numeric_jacobians(pts, bases)
            for p, basis, Jn in zip(pts, bases, numeric):
                err = np.max(np.abs(chart.jacobian(p, basis).matrix - Jn.matrix))
                if err > worst:
                    worst, worst_name = float(err), f"{chart.name}/dim{dim}"
    return _result(3, "jacobian oracle", worst, 1e-6, f"{charts} charts x {points} points; worst at {worst_name}")


# -- 4 ------------------------------------------------------------------------

def adapted_coordinates(chart: ManifoldChart, J: np.ndarray, basis) -> np.ndarray:
    """Rewrite the rows of ``J`` in the coordinates of the basis ``(1, I, I_2, ...)``."""
    B = basis.matrix
    blocks, row = [], 0
    for kind in chart.layout:
        if kind == "full":
            blocks.append(B.T @ J[row:row + chart.dim])
            row += chart.dim
        elif kind == "imag":
            blocks.append(B[1:, 1:].T @ J[row:row + chart.dim - 1])
            row += chart.dim - 1
        else:
            blocks.append(J[row:row + 1])
            row += 1
    return np.vstack(blocks)


def _diag(dim: int, value: float) -> np.ndarray:
    return value * np.eye(dim - 2)


def helicoid_matrix(x: float, y: float, dim: int) -> np.ndarray:
    """Closed-form helicoid differential in ``K x Im K`` adapted coordinates."""
    sh, ch = math.sinh(x), math.cosh(x)
    c, s = math.cos(y), math.sin(y)
    perp = sh * s / y if y != 0 else sh
    top = np.zeros((dim, dim))
    top[:2, :2] = [[ch * c, -sh * s], [ch * s, sh * c]]
    top[2:, 2:] = _diag(dim, perp)
    return np.vstack([top, np.eye(dim)[1:]])


def catenoid_matrix(x: float, y: float, dim: int) -> np.ndarray:
    """Closed-form catenoid differential in ``K x R`` adapted coordinates."""
    sh, ch = math.sinh(x), math.cosh(x)
    c, s = math.cos(y), math.sin(y)
    perp = ch * s / y if y != 0 else ch
    top = np.zeros((dim, dim))
    top[:2, :2] = [[sh * c, -ch * s], [sh * s, ch * c]]
    top[2:, 2:] = _diag(dim, perp)
    last = np.zeros((1, dim))
    last[0, 0] = 1.0
    return np.vstack([top, last])


def nroot_matrix(x: float, y: float, dim: int, n: int) -> np.ndarray:
    """Closed-form n-th root manifold differential in ``K x K`` adapted coordinates.

    The y = 0 case has a zero first row in the second factor (the real
    part of ``n exp(I y / n)`` has vanishing derivatives there).
    """
    sh, ch = math.sinh(x), math.cosh(x)
    c, s = math.cos(y), math.sin(y)
    cn, sn = math.cos(y / n), math.sin(y / n)
    perp1 = sh * s / y if y != 0 else sh
    perp2 = n * sn / y if y != 0 else 1.0
    top = np.zeros((dim, dim))
    top[:2, :2] = [[ch * c, -sh * s], [ch * s, sh * c]]
    top[2:, 2:] = _diag(dim, perp1)
    bottom = np.zeros((dim, dim))
    bottom[:2, 1] = [-sn, cn]
    bottom[2:, 2:] = _diag(dim, perp2)
    return np.vstack([top, bottom])


def closed_form_matrices(seed=0, points: int = 100) -> CriterionResult:
    n = 2
    cases = [
        ("helicoid", lambda x, y, d: helicoid_matrix(x, y, d)),
        ("catenoid", lambda x, y, d: catenoid_matrix(x, y, d)),
        ("nroot", lambda x, y, d: nroot_matrix(x, y, d, n)),
    ]
    worst, on_axis = 0.0, 0
    for dim in DIMS:
        for name, closed_form in cases:
            chart = get_chart(name, dim, n=n)
            for p in chart.sample_points(seed, points, real_fraction=0.2):
                basis = complete_basis(p.unit)
                J = adapted_coordinates(chart, chart.jacobian(p, basis).matrix, basis)
                worst = max(worst, float(np.max(np.abs(J - closed_form(p.x, p.y, dim)))))
                on_axis += p.y == 0.0
    return _result(4, "closed-form matrices", worst, 1e-12, f"helicoid, catenoid, nroot(n={n}); {on_axis} real-axis points")


# -- 5 ------------------------------------------------------------------------

def sphere_checks(seed=0, points: int = 500) -> CriterionResult:
    rng = rng_for(seed)
    gram = image = transition = 0.0
    for dim in DIMS:
        for pole in ("north", "south"):
            chart = get_chart(f"sphere-{pole}", dim)
            for p in chart.sample_points(rng, points, real_fraction=0.05):
                J = chart.jacobian(p).matrix
                k = 4.0 / (1.0 + p.x ** 2 + p.y ** 2) ** 2
                gram = max(gram, float(np.max(np.abs(J.T @ J - k * np.eye(dim)))) / k)
                image = max(image, abs(float(np.linalg.norm(param_sphere(pole, p))) - 1.0))
        for q in random_hypernum_coeffs(rng, dim, points):
            qn = HyperNum(q)
            south = sphere_chart_inverse("south", param_sphere("north", decompose(qn)))
            expected = HyperNum(inv_coeffs(q))
            scale = expected.norm()
            transition = max(
                transition,
                (south - expected).norm() / scale,
                (sphere_transition(qn) - expected).norm() / scale,
            )
    ok = gram <= 1e-10 and image <= 1e-13
    detail = f"gram={gram:.2e} (tol 1e-10), image={image:.2e} (tol 1e-13), transition={transition:.2e}"
    return _result(5, "sphere", transition, 1e-12, detail, ok)


# -- 6 ------------------------------------------------------------------------

def zero_f2_stem() -> StemFunction:
    """``F = (x^2 - y^2) + iota 0``: intrinsic, but F2 vanishes identically."""
    return StemFunction.from_xy(
        lambda x, y: complex(x * x - y * y, 0.0),
        lambda x, y: (complex(2 * x, 0.0), complex(-2 * y, 0.0)),
        name="zero-F2",
    )


def certifier(seed=0) -> CriterionResult:
    outcomes = []
    for stem in (helicoid_stem(), catenoid_stem(), nroot_stem(3), deformation_stem(math.pi / 3)):
        for dim in DIMS:
            cert = certify_theorem(stem, dim=dim, seed=seed)
            outcomes.append((f"{stem.name}/dim{dim}", cert.passed))
    bad = certify_theorem(zero_f2_stem(), seed=seed)
    outcomes.append(("zero-F2 fails (b)", not bad.passed and "b" in bad.failing_conditions))
    psi_cert = certify_chart(get_chart("psi", 4), seed=seed)
    outcomes.append(("psi fails perp", not psi_cert.passed and psi_cert.failing_blocks == ["perp"]))
    failed = [name for name, ok in outcomes if not ok]
    detail = f"{len(outcomes) - len(failed)}/{len(outcomes)} as expected" + (f"; wrong: {failed}" if failed else "")
    return _result(6, "theorem certifier", len(failed), 0, detail)


# -- 7 ------------------------------------------------------------------------

def psi_control(seed=0, points: int = 100) -> CriterionResult:
    from .cli import run_audit

    rng = rng_for(seed)
    chart = get_chart("psi", 4)
    i = ImaginaryUnit.basis(1, 4)
    basis = complete_basis(i)
    worst, perp_failures = 0.0, 0
    for x, y in zip(rng.uniform(-2, 2, points), rng.uniform(0.05, 2, points)):
        rep = conformality_audit(chart.jacobian(SlicePoint(float(x), float(y), i), basis))
        a, b = rep.perp_block.column_norms
        worst = max(worst, abs(a / b - math.sqrt(2.0)))
        perp_failures += rep.slice_block.passed and "perp" in rep.failing_blocks()
    code, _ = run_audit(chart, points=points, seed=seed, tol=1e-9)
    ok = perp_failures == points and code == 1
    detail = f"perp fails at {perp_failures}/{points}; audit exit code {code}"
    return _result(7, "psi negative control", worst, 1e-9, detail, ok)


# -- 8 ------------------------------------------------------------------------

def deformation_family(seed=0, nx: int = 50, ny: int = 50, nt: int = 20) -> CriterionResult:
    xs = np.linspace(-2.0, 2.0, nx)
    ys = np.linspace(-0.95 * math.pi, 0.95 * math.pi, ny)
    worst = 0.0
    for theta in np.linspace(0.0, math.pi / 2, nt):
        stem = deformation_stem(float(theta))
        st, ct = math.sin(theta), math.cos(theta)
        for x in xs:
            A = math.cosh(x) * ct + math.sinh(x) * st
            B = math.cosh(x) * st + math.sinh(x) * ct
            for y in ys:
                f1x, f1y, f2x, f2y = stem.partials(float(x), float(y))
                col0 = float(np.sum(f1x ** 2 + f2x ** 2))
                col1 = float(np.sum(f1y ** 2 + f2y ** 2))
                lhs, rhs = A * A + st * st, B * B + ct * ct
                worst = max(worst, abs(lhs - rhs), abs(col0 - lhs), abs(col1 - rhs))
    ends = 0.0
    rng = rng_for(seed)
    for dim in DIMS:
        helicoid = get_chart("helicoid", dim)
        catenoid = get_chart("catenoid", dim)
        h0 = get_chart("deformation", dim, theta=0.0)
        h1 = get_chart("deformation", dim, theta=math.pi / 2)
        for p in h0.sample_points(rng, 200, real_fraction=0.1):
            ends = max(ends, float(np.max(np.abs(h0.components(p) - helicoid.components(p)))))
            ends = max(ends, float(np.max(np.abs(h1.components(p) - catenoid.components(p)))))
    detail = f"{nx}x{ny}x{nt} grid; endpoints max deviation {ends:.2e} (tol 1e-14)"
    return _result(8, "deformation family", worst, 1e-12, detail, ends <= 1e-14)


# -- 9 ------------------------------------------------------------------------

def log_root_round_trips(seed=0, points: int = 10_000) -> CriterionResult:
    rng = rng_for(seed)
    le = el = 0.0
    for dim in DIMS:
        for c in random_hypernum_coeffs(rng, dim, points // 2, scale=2.0):
            q = HyperNum(c)
            le = max(le, (adapted_log(adapted_exp(q)) - q).norm() / max(1.0, q.norm()))
            el = max(el, (exp(principal_log(q)) - q).norm() / q.norm())
    roots = 0.0
    for dim in DIMS:
        for n in range(2, 8):
            for c in random_hypernum_coeffs(rng, dim, 200, scale=2.0):
                r = principal_nthroot(n, HyperNum(c))
                roots = max(roots, float(np.linalg.norm(power_coeffs(r.coeffs, n) - c) / np.linalg.norm(c)))
    closure = 0.0
    for n in range(2, 8):
        for r in np.linspace(0.0, 10.0, 41):
            q = HyperNum.real(float(r), 4)
            minus = nth_root(RootPoint(n, q, HyperNum.real(-float(n), 4)))
            plus = nth_root(RootPoint(n, q, HyperNum.real(float(n), 4)))
            expect = float(r) ** (1.0 / n)
            closure = max(closure, float(np.max(np.abs(minus.coeffs - HyperNum.real(-expect, 4).coeffs))))
            closure = max(closure, float(np.max(np.abs(plus.coeffs - HyperNum.real(expect, 4).coeffs))))
    ok = roots <= 1e-11 and closure == 0.0
    detail = f"L.E={le:.2e}, exp.log={el:.2e}, roots={roots:.2e} (tol 1e-11), closure={closure:.1e} (exact)"
    return _result(9, "log/root round trips", max(le, el), 1e-12, detail, ok)


# -- 10 -----------------------------------------------------------------------

def obstruction_witness(seed=0) -> CriterionResult:
    worst, distinct = 0.0, 0
    for dim in DIMS:
        x = HyperNum.real(-2.0, dim)
        logs = log_preimages(x, ks=(0,))
        for w in logs:
            worst = max(worst, (exp(w) - x).norm())
        pairs = [(a, b) for k, a in enumerate(logs) for b in logs[k + 1:]]
        distinct += sum((a - b).norm() > 1e-12 for a, b in pairs) > 0 and len(logs) >= 2
    ok = distinct == len(DIMS)
    return _result(10, "obstruction witness", worst, 1e-12, f"x = -2; >= 2 distinct logarithms in {distinct}/{len(DIMS)} dims", ok)


# -- battery ------------------------------------------------------------------

CRITERIA = {
    1: algebra_laws,
    2: representation_formula_check,
    3: jacobian_oracle,
    4: closed_form_matrices,
    5: sphere_checks,
    6: certifier,
    7: psi_control,
    8: deformation_family,
    9: log_root_round_trips,
    10: obstruction_witness,
}


def run_battery(seed=0, numbers=None) -> list[CriterionResult]:
    numbers = sorted(CRITERIA) if numbers is None else sorted(numbers)
    return [CRITERIA[k](seed) for k in numbers]


def render(results: list[CriterionResult]) -> str:
    return "\n".join(r.line() for r in results) + "\n"


def determinism(seed=0, numbers=None, reference: list[CriterionResult] | None = None) -> CriterionResult:
    """Rerun the battery and compare the rendered report byte for byte."""
    first = render(reference if reference is not None else run_battery(seed, numbers))
    second = render(run_battery(seed, numbers))
    same = first.encode() == second.encode()
    return _result(11, "determinism", 0.0 if same else 1.0, 0.0, "rerun report identical" if same else "rerun report differs")
