"""
Gradient-based pulse engineering: costs with exact gradients, L-BFGS-B minimisation,
the time-optimal sweep and robustification against distance fluctuations.
"""
from .cost import CostReport, ParameterLayout, layout_for, fluctuation_nodes, fluctuation_profile
from .cost import cost_exact, cost_regularized, cost_robust, endpoint_penalty, smoothness_penalty
from .exception import GrapeError, PlanValidationError, ConvergenceError
from .gradient import amplitude_gradient, fidelity_gradient, AmplitudeGradient, FidelityGradient
from .optimize import MinimizeResult, minimize, lbfgsb
from .plan import OptimizationPlan
from .sweep import SweepPoint, TimeSweepResult, RobustifyResult
from .sweep import initial_pulse, half_sine, multistart, time_sweep, robustify, window_infidelity
