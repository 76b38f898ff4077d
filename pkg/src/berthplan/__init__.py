"""Trajectory planning toolkit for automatic ship berthing.

The package covers the full pipeline: low-speed maneuvering dynamics of a
twin-rudder model ship, harbor-basin geometry and ship-domain containment,
a distance-dependent approach-speed corridor, direct multiple-shooting
transcription, a sequential quadratic programming solver, a bundled case
catalog with a stochastic scenario generator, and a command-line front end.
"""

from .constraints import (ActuatorBounds, SpeedLimitCoefficients,
                          build_actuator_bounds, corridor_fraction,
                          corridor_residuals, speed_limits)
from .dynamics import actuator_step, rk4_step, simulate, total_derivative
from .geometry import (Polygon, ShipDomain, collision_residuals, is_inside,
                       winding_number)
from .io import (ConfigError, ParseError, PortConfig, ScenarioConfig,
                 StudyConfig, bundled_path, load_port, load_scenario,
                 load_ship, load_study, spec_digest, write_trajectory_csv)
from .scenarios import (CaseDefinition, CaseRecord, FeasibilityReport,
                        PlanAttempt, RandomCase, audit_plan, case_config,
                        case_scenario, corridor_travel_time, draw_multiplier,
                        generate_random_case, planning_guess,
                        random_case_scenario, run_feasibility_study,
                        run_with_recomputation, start_admissible,
                        suggest_substeps, suggest_tf_bounds)
from .ship import ShipParams
from .solver import SolverOptions, SolverResult, solve, solve_qp
from .states import State, WindCondition
from .transcription import (OcpSpec, build_nlp, forward_rollout,
                            linear_initial_guess, paced_initial_guess,
                            simulate_plan)

__version__ = "0.1.0"

__all__ = [
    "ActuatorBounds", "SpeedLimitCoefficients", "build_actuator_bounds",
    "corridor_fraction", "corridor_residuals", "speed_limits",
    "actuator_step", "rk4_step", "simulate", "total_derivative",
    "Polygon", "ShipDomain", "collision_residuals", "is_inside",
    "winding_number",
    "ConfigError", "ParseError", "PortConfig", "ScenarioConfig",
    "StudyConfig", "bundled_path", "load_port", "load_scenario",
    "load_ship", "load_study", "spec_digest", "write_trajectory_csv",
    "CaseDefinition", "CaseRecord", "FeasibilityReport", "PlanAttempt",
    "RandomCase", "audit_plan", "case_config", "case_scenario",
    "corridor_travel_time", "draw_multiplier", "generate_random_case",
    "planning_guess", "random_case_scenario", "run_feasibility_study",
    "run_with_recomputation", "start_admissible", "suggest_substeps",
    "suggest_tf_bounds",
    "ShipParams",
    "SolverOptions", "SolverResult", "solve", "solve_qp",
    "State", "WindCondition",
    "OcpSpec", "build_nlp", "forward_rollout", "linear_initial_guess",
    "paced_initial_guess", "simulate_plan",
    "__version__",
]
