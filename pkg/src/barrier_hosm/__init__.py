"""Barrier-function time-varying-gain higher-order sliding-mode control.

Hong's homogeneous controller for the perturbed integrator chain, its
Lyapunov function, the barrier gain, a Euler/zero-order-hold simulator and
the analysis tools that go with them.
"""
from .analysis import (
    SummaryMetrics,
    accuracy_metrics,
    compute_metrics,
    fit_decay,
    fit_decay_series,
    gain_envelope,
    h_min,
    sharp_trap_check,
    trap_check,
    verify_assumptions,
)
from .config import load_hong_params, load_scenario
from .controllers import (
    ControllerMode,
    GainFunctionSpec,
    GainKind,
    HongParams,
    Variant,
    control,
    psi_r,
    u0,
    v_chain,
)
from .errors import (
    ConfigurationError,
    ContractViolation,
    DivergenceError,
    DomainError,
    InsufficientDataError,
    ParameterError,
    ShapeError,
)
from .homogeneity import DilationProfile, apply_dilation, make_profile, signed_pow
from .lyapunov import (
    GainSchedule,
    GainState,
    Phase,
    RampKind,
    barrier_F,
    eta,
    gain_update,
    grad_V,
    in_domain,
    lyapunov_V,
    lyapunov_V_quad,
)
from .simulation import Bounds, Scenario, Trace, UncertaintySpec, chain_rhs, eval_uncertainty, simulate

__version__ = "0.1.0"
