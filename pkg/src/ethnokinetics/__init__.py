"""Excitable-dynamics models of ethnogenesis."""

from .appendix import (
    Prism,
    PrismSequence,
    brownian_range_bound,
    brownian_range_probabilities,
    build_prism_sequence,
    min_k_for_tau,
    prism_drift_check,
)
from .config import Scenario, load_scenario, scenario_from_text, scenario_to_text
from .equilibria import (
    EquilibriumReport,
    classify_equilibrium,
    equilibria_three_var,
    equilibria_two_var,
    trace_nullclines,
)
from .errors import (
    EthnoError,
    KnotMisalignment,
    NewtonDivergence,
    NonFiniteState,
    NoValidBase,
    ParamSignViolation,
    ParseError,
    ResidualTooLarge,
    UnknownPreset,
    ValidationError,
)
from .integrate import (
    ExcitationReport,
    RealScale,
    TimeGrid,
    Trajectory,
    detect_excitation,
    integrate_ode,
    scale_to_real,
)
from .interaction import DominanceReport, DualTrajectory, dominance_report, integrate_interacting, interaction_grid
from .models import (
    InteractionSpec,
    LVParams,
    NoiseSpec,
    ThreeVarParams,
    TwoVarParams,
    drift_direct_three_var,
    drift_interaction,
    drift_log_three_var,
    model_rhs,
    rhs_lotka_volterra,
    rhs_three_var,
    rhs_two_var,
)
from .presets import PRESETS, get_preset
from .sde import (
    BrownianPath,
    EnsembleSummary,
    brownian_path,
    count_busts,
    ensemble_stats,
    integrate_sde_direct,
    integrate_sde_log,
)

__version__ = "0.1.0"
