"""Multi-RAT downlink simulator with aerial jammers and allocation solvers.

Pipeline: generate a Scenario, draw a CsiSnapshot, build the SinrTable, then
hand it to a solver (two-phase heuristic, round-robin baseline, or the exact
small-instance search).  The harness wraps the pipeline into seeded,
reproducible sweeps.
"""

from ._kernels import BACKEND
from .allocator import (RefinementTrace, SolverConfig, initial_association,
                        proportional_bandwidth, refine_assignment,
                        round_robin_baseline, solve_heuristic,
                        sp_selection_for_ue)
from .channel import (ChannelParams, CsiSnapshot, build_csi_snapshot,
                      free_space_pathloss_db, jammer_ue_channel, load_snapshot,
                      pathloss_jammer_ue, pathloss_sp_ue, save_snapshot,
                      sp_ue_channel, steering_vector)
from .errors import (BudgetExceeded, DomainError, InfeasibleProblem,
                     MultiratError, ParseError, PlacementInfeasible,
                     ValidationError)
from .harness import (CSV_HEADER, ExperimentSpec, ResultRow, child_seeds,
                      desk_spec, emit_csv, emit_plot_data, full_spec,
                      measure_runtime, run_experiment)
from .oracle import (optimal_bandwidth_for_association, solve_exact,
                     winner_takes_all_bandwidth)
from .radio import (Assignment, PowerPlan, QosSlack, SinrTable, SolverReport,
                    Violation, empty_assignment, qos_slack, sinr_table,
                    success_probability, sum_rate, ue_rate,
                    uniform_power_plan, validate_assignment)
from .scenario import (NR5G, WIFI6, Jammer, JammerProfile, RadioProfile,
                       Scenario, ScenarioConfig, ServicePoint, UserEquipment,
                       generate, load_scenario, save_scenario, validate)

__version__ = "0.1.0"
