"""Lower semilinear copulas built from their diagonal sections."""
from __future__ import annotations

from .concordance import (
    ConcordanceReport,
    RegionPoint,
    blomqvist,
    footrule,
    gamma,
    midpoint_construct,
    region_scan,
    report,
    rho,
    rho_minus_tau,
    tau,
    tau_convexity_gap,
)
from .diagonal import (
    DELTA_M,
    DELTA_PI,
    ConvexMix,
    Diagonal,
    LowerL,
    MarshallOlkinStar,
    PiecewiseLinear,
    PiecewiseRatio,
    Power,
    UpperU,
    ValidationReport,
    eta,
    evaluate,
    from_dict,
    lower_l,
    make_pwl,
    mix,
    phi,
    power,
    random_dlsl,
    si_counterexample,
    to_dict,
    upper_u,
    validate_dlsl,
    w_delta,
)
from .errors import (
    DegenerateInput,
    DomainError,
    InvalidInput,
    LSLError,
    MalformedKnots,
    NoConvergence,
    ResolutionMismatch,
    SearchFailure,
)
from .lsl import (
    ConditionalLaw,
    SampleBatch,
    check_ltd,
    check_pqd,
    conditional_law,
    kernel_cdf,
    sample,
    si_profile,
    singular_mass,
    surface,
)
from .star import (
    IterationTrace,
    StarResult,
    is_idempotent,
    iterate_star,
    mo_star_diagonal,
    star,
    star_surface,
)

__version__ = "0.1.0"
