"""Toolkit for local and non-local discrete Ginzburg-Landau lattices.

Simulates the combined lattice model on a truncated window, evaluates the
closed-form constants of its dissipative theory (absorbing and non-escaping
radii, annulus roots, closeness constants), and runs the verification
studies comparing trajectories, envelopes, tails, and sampled attractors.
"""

from .backend import BACKEND
from .errors import ConfigError, HypothesisError, NumericalError, StepUnderflowError
from .experiments import (
    AttractorSample,
    ClosenessReport,
    CongruenceResult,
    InitialFamily,
    RegimePoint,
    RegimeVerificationReport,
    TailReport,
    hausdorff_semidistance,
    identity_check,
    make_initial_family,
    run_closeness,
    run_congruence,
    run_regime_verification,
    run_tail_study,
    sample_attractor,
    tail_mass,
)
from .integrate import (
    BLOWUP_THRESHOLD,
    DEFAULT_TOLERANCES,
    ORACLE_TOLERANCES,
    ScalarTrajectory,
    Trajectory,
    integrate_adaptive,
    integrate_riccati,
    rk4_reference,
)
from .lattice import (
    BalanceTerms,
    Forcing,
    LatticeState,
    ModelParams,
    balance_residual,
    discrete_laplacian,
    inner,
    l2_distance,
    lipschitz_bound,
    nonlinear_part,
    norms,
    random_state,
    rhs_combined,
    unit_site,
    zeros,
)
from .regimes import (
    CRITICAL,
    SUBCRITICAL_FORCING,
    SUPERCRITICAL_ANNULUS,
    ClosenessConstants,
    RegimeReport,
    RiccatiConstants,
    bernoulli_envelope,
    classify_regime,
    closeness_constants,
    ldgl_gronwall_bound,
    nldgl_restricted_bound,
    riccati_constants,
)

__version__ = "0.1.0"
