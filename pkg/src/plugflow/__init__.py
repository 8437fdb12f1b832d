"""plugflow: a parametric trapped-orbit plug with insertion dynamics.

A numerical laboratory for a one-parameter family of 3D plug flows built
from a rotationally symmetric base field and two twisted self-insertions.
Sweeping the parameter through zero moves the flow between a tame regime
(two periodic orbits, all other orbits wandering) and a chaotic one (an
embedded full 2-shift with positive topological entropy), with the
aperiodic boundary case in between.
"""

from .config import InsertionParams, IntegratorParams, PlugConfig
from .wilson import StopCondition, WilsonParams, f_eval, field_eval, g_eval, \
    verify_wilson_hypotheses, wilson_flow

__all__ = [
    "InsertionParams",
    "IntegratorParams",
    "PlugConfig",
    "StopCondition",
    "WilsonParams",
    "f_eval",
    "field_eval",
    "g_eval",
    "verify_wilson_hypotheses",
    "wilson_flow",
]

__version__ = "0.1.0"
