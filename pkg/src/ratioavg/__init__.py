"""Haar-ensemble averages of products of ratios of characteristic
polynomials over O(N), SO(N) and USp(N).

The closed-form sign sums (closed_form), the exact weight-expansion engine
that pins them down (series, weights, rootsys), and two independent
numerical oracles (haar Monte Carlo, quad Weyl-integration quadrature)
cross-verify each other; the cli module ties them together.
"""

from .closed_form import (
    EvalResult,
    TorusPoint,
    character_chi,
    ratio_average,
    so_from_o,
)
from .errors import (
    DegenerateConfiguration,
    DomainError,
    InconsistentRecursion,
    RangeViolation,
    RatioavgError,
    TailTooLarge,
    UnsupportedGroup,
)
from .haar import (
    GroupElement,
    MCEstimate,
    SampleStream,
    integrand,
    mc_estimate,
    mc_estimate_batch,
    sample,
    sample_many,
)
from .quad import QuadSpec, quad_average
from .rootsys import (
    LinForm,
    RootSystemData,
    SignConfig,
    apply_sign_config,
    build_root_data,
    enumerate_cosets,
)
from .series import (
    CasimirReport,
    WeightSeries,
    compute_B,
    evaluate_series,
    expand_J,
    export_coefficients,
    verify_casimir,
)
from .weights import (
    Weight,
    casimir_eigenvalue,
    highest_weight,
    satisfies_constraints,
    vanishing_test,
)

__version__ = "0.1.0"

__all__ = [
    "CasimirReport",
    "DegenerateConfiguration",
    "DomainError",
    "EvalResult",
    "GroupElement",
    "InconsistentRecursion",
    "LinForm",
    "MCEstimate",
    "QuadSpec",
    "RangeViolation",
    "RatioavgError",
    "RootSystemData",
    "SampleStream",
    "SignConfig",
    "TailTooLarge",
    "TorusPoint",
    "UnsupportedGroup",
    "Weight",
    "WeightSeries",
    "apply_sign_config",
    "build_root_data",
    "casimir_eigenvalue",
    "character_chi",
    "compute_B",
    "enumerate_cosets",
    "evaluate_series",
    "expand_J",
    "export_coefficients",
    "highest_weight",
    "integrand",
    "mc_estimate",
    "mc_estimate_batch",
    "quad_average",
    "ratio_average",
    "sample",
    "sample_many",
    "satisfies_constraints",
    "so_from_o",
    "vanishing_test",
    "verify_casimir",
]
