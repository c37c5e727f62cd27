"""twomode: solver and simulator for a driven-dissipative two-mode system.

A photon mode with linear loss is coherently coupled to an exciton mode
with pump gain, Kerr nonlinearity and gain saturation.  The package
computes the complex two-branch spectrum, enumerates and classifies the
nonzero steady states, integrates the full nonlinear dynamics, and maps
(gamma_c, p) phase diagrams with their critical points.
"""

__version__ = "0.1.0"

from .dynamics import (
    AsymptoticVerdict,
    Overflow,
    Trajectory,
    canonical_start,
    classify_trajectory,
    dominant_frequency,
    gauge_distance,
    integrate,
    integration_verdict,
    random_start,
    settle,
)
from .kernel import BACKEND
from .model import ModelParams, SpectrumPair, TwoModeState, rhs, spectrum, spectrum_arrays
from .phase_diagram import (
    CriticalPoints,
    PhaseCell,
    SweepGrid,
    compute_cell,
    locate_ep,
    locate_et,
    sweep,
    thresholds,
    transition_line,
)
from .stability import StabilityReport, classify, jacobian
from .steady import (
    SolveTolerances,
    SteadyState,
    eq3_density,
    photon_amplitude,
    relative_phase,
    solve_steady_states,
    stationarity_cubic,
)
