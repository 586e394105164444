"""Genuine tripartite steering under a sequential Bell-measurement protocol."""
from .qcore import BellOutcome, DensityMatrix, partial_trace, trace_distance, validate_density
from .states import FamilyParams, XStateParams, extract_x_params, rho1, rho2, rho3, rho4_closed
from .measures import cgm_closed, cgm_pure, cgm_x, s_gen
from .steering import (SteeringSettings, UntrustedParty, closed_S, steering_value,
                       violates_genuine_steering)
from .optimize import OptimizerConfig, bisect_threshold, grid_sweep, maximize_settings

__version__ = "0.1.0"
