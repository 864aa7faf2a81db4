"""Anonymous moment estimation over a simulated quantum sensing network."""

from .anonymity import (
    QfiReport,
    max_secure_N,
    qfi_inverse,
    qfi_matrix,
    qfi_report,
    security_margin,
)
from .charfn import CharValue, char_fn, char_fn_grid
from .estimator import (
    EstimatorReport,
    MomentPlan,
    dt_max,
    expectation_C,
    fd_moment,
    optimal_dt,
    uncertainty,
    variance_C,
)
from .fields import FieldConfig, UniformFieldDistribution, draw_fields, exact_moment
from .protocol import (
    OutcomeDistribution,
    SampleRun,
    estimate_moment_mc,
    outcome_distribution,
    sample_protocol,
)

__version__ = "0.1.0"

__all__ = [
    "CharValue",
    "EstimatorReport",
    "FieldConfig",
    "MomentPlan",
    "OutcomeDistribution",
    "QfiReport",
    "SampleRun",
    "UniformFieldDistribution",
    "char_fn",
    "char_fn_grid",
    "draw_fields",
    "dt_max",
    "estimate_moment_mc",
    "exact_moment",
    "expectation_C",
    "fd_moment",
    "max_secure_N",
    "optimal_dt",
    "outcome_distribution",
    "qfi_inverse",
    "qfi_matrix",
    "qfi_report",
    "sample_protocol",
    "security_margin",
    "uncertainty",
    "variance_C",
]
