"""Collective-phase simulation of probabilistic GHZ conversion with
Bayesian phase estimation on the failure branch."""

from .backend import active_backend, configure_threads, kernels, requested_backend
from .bounds import (
    BoundReport,
    YieldReport,
    bound_report,
    distance_floor_crossing,
    distillation_rate,
    quantum_fisher_information,
    van_trees_distance_floor,
    van_trees_sigma_sq,
    yield_comparison,
)
from .channel import (
    BranchOutcome,
    OsbpOperators,
    apply_dephasing,
    build_osbp,
    failure_branch_state,
    osbp_branch,
    osbp_diagonals,
    vidal_conversion_bound,
)
from .closed_forms import (
    NoUpdateOutcome,
    no_update_estimator_and_distance,
    no_update_outcome_probability,
    no_update_posterior,
    single_measurement_distance,
)
from .estimation import (
    ParityMeasurement,
    QutritMubMeasurement,
    StrategySpec,
    bayes_update,
    estimate_phase,
    estimate_phase_default,
    mub_coefficients,
    next_measurement,
    parity_likelihood,
    qutrit_mub_likelihood,
)
from .integrated import IntegratedState, StoredCopy, run_integrated, stored_fraction_halves
from .output import Curve, emit_csv, emit_svg, read_csv
from .phase_space import (
    EffectiveDensityMatrix,
    FailureBranchState,
    GhzPhaseState,
    PhaseDistribution,
    TwoParamQutrit,
    circular_moment,
    corrected_state,
    ghz_projector,
    grid_angles,
    hermitian_eigenvalues,
    make_vendor_qutrit,
    state_from_moments,
    trace_distance,
    wrap_phase,
)
from .runner import (
    CopyRecord,
    CurvePoint,
    RunRecord,
    TrialConfig,
    average_over_prior,
    enumerate_exact,
    run_failure_branch_trial,
    run_naive_trial,
)

__version__ = "0.1.0"
