"""Slice-function geometry over the quaternions and octonions.

The package covers division-algebra arithmetic, stem functions and the
slice functions they induce, real differentials assembled from the
standard set of curves, conformality audits, a catalog of parameterized
hypercomplex Riemann manifolds, and the logarithm and n-th root branches.
"""
from .algebra import (
    Basis,
    HyperNum,
    ImaginaryUnit,
    SlicePoint,
    complete_bases,
    complete_basis,
    conj,
    decompose,
    default_unit,
    exp,
    inv,
    mul,
    norm,
    reconstruct,
)
from .differential import (
    Certificate,
    ConformalityReport,
    CurveSet,
    DifferentialMatrix,
    certify_theorem,
    conformality_audit,
    jacobian_numeric,
    jacobian_slice_analytic,
    standard_curves,
)
from .errors import (
    AlgebraError,
    BranchError,
    ConfigurationError,
    DomainError,
    NotOnManifoldError,
    ParseError,
    PoleError,
    SliceGeomError,
)
from .expr import StemExpr, parse_stem_expr, stem_from_expr
from .logroot import (
    LogPoint,
    RootPoint,
    adapted_exp,
    adapted_log,
    log_preimages,
    nth_root,
    phi_n,
    principal_log,
    principal_nthroot,
)
from .manifolds import (
    CHART_NAMES,
    ManifoldChart,
    certify_chart,
    get_chart,
    param_catenoid,
    param_deformation,
    param_helicoid,
    param_nroot,
    param_sphere,
    psi,
    psi_counterexample,
    sphere_transition,
)
from .stem import (
    StemFunction,
    SymmetricDomain,
    check_holomorphic,
    check_intrinsic,
    eval_slice,
    representation_formula,
    slice_derivative,
    spherical_derivative,
)

__version__ = "0.1.0"
