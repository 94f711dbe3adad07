"""American put pricing by a front-fixing Crank-Nicolson scheme with an
exponential-kernel fractional time derivative, plus validation tooling."""

from .analysis import (
    AmplificationQuery,
    AmplificationResult,
    AuditReport,
    Lemma1Report,
    OrderEstimate,
    StudyRow,
    amplification_factor,
    lemma1_check,
    monotonicity_audit,
    observed_order,
    y_truncation_study,
)
from .cfkernel import (
    CFWeights,
    ClassicalStep,
    HistoryAccumulator,
    cf_derivative_apply,
    cf_weights,
    empty_history,
    history_push,
    history_sum_naive,
)
from .errors import (
    DenominatorNearZeroError,
    DomainError,
    FronfixError,
    NonConvergenceError,
    SingularPivotError,
    ValidationError,
)
from .model import (
    GridSpec,
    ModelParams,
    SolutionSurface,
    ValidationReport,
    build_grid,
    from_fixed_domain,
    to_fixed_domain,
    validate_params,
)
from .oracles import (
    OraclePrice,
    binomial_american_put,
    european_put_closed_form,
    psor_american_put,
)
from .scheme import (
    FixedPointOptions,
    SchemeCoefficients,
    SolverRun,
    StepState,
    assemble_step,
    boundary_node_update,
    coefficients,
    free_boundary_update,
    initial_state,
    price_at,
    run_solver,
    time_step,
)
from .tridiag import TridiagonalSystem, solve_tridiagonal

__version__ = "0.1.0"
