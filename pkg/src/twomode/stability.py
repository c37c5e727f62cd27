"""Linear stability of steady states from the 4x4 real Jacobian.

The fixed point only exists in the frame co-rotating at its real energy E
(in the lab frame it is a limit cycle), so the flow is linearised there.
The saturable nonlinearity couples deviations to their conjugates,
g*(2*|psi_x|^2*d + psi_x^2*conj(d)), which breaks complex linearity and
forces the real 4x4 form in (Re d_c, Im d_c, Re d_x, Im d_x).

Global U(1) symmetry guarantees one exact zero eigenvalue (direction
i*psi); it is excluded from the margin by smallest magnitude, which stays
robust near coalescence points where decaying modes also approach zero.
Analytic trace: tr J = 2*(p - 2*g2*x - gamma_c), the density derivative
of the total gain flux x*(p - g2*x) minus the photon loss, per quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .steady import MARGINAL, STABLE, UNSTABLE, SteadyState

__all__ = [
    "StabilityReport",
    "GaugeModeMissing",
    "jacobian",
    "jacobian_matrix",
    "classify",
    "classify_state",
]

TOL_GAUGE = 1e-7
TOL_STAB = 1e-7


class GaugeModeMissing(RuntimeError):
    """No near-zero eigenvalue found: the input is not an accurate steady state."""


@dataclass(frozen=True)
class StabilityReport:
    """Eigenvalues of the linearised flow and the resulting verdict."""

    eigenvalues: tuple[complex, complex, complex, complex]
    gauge_index: int
    verdict: str
    margin: float          # max Re(lambda) excluding the gauge mode
    n_zero_modes: int = 1  # eigenvalues with |lambda| < TOL_GAUGE; > 1 flags degeneracy


def _block_linear(c: complex) -> np.ndarray:
    # d/dt (u, v) for d(delta)/dt = -i*c*delta, delta = u + i*v
    a, b = c.real, c.imag
    return np.array([[b, a], [-a, b]])


def _block_conjugate(c: complex) -> np.ndarray:
    # d/dt (u, v) for d(delta)/dt = -i*c*conj(delta)
    a, b = c.real, c.imag
    return np.array([[b, -a], [-a, -b]])


def jacobian_matrix(
    params: ModelParams, psi_c: complex, psi_x: complex, energy: float
) -> np.ndarray:
    """Jacobian of the rotating-frame flow around an arbitrary fixed point."""
    g = params.g1 - 1j * params.g2
    x2 = abs(psi_x) ** 2
    j = np.zeros((4, 4))
    j[0:2, 0:2] = _block_linear((params.e_c - 1j * params.gamma_c) - energy)
    j[0:2, 2:4] = _block_linear(params.omega_r + 0j)
    j[2:4, 0:2] = _block_linear(params.omega_r + 0j)
    j[2:4, 2:4] = _block_linear(
        (params.e_x + 1j * params.p) - energy + 2.0 * g * x2
    ) + _block_conjugate(g * psi_x * psi_x)
    return j


def jacobian(params: ModelParams, ss: SteadyState) -> np.ndarray:
    """4x4 real Jacobian at a solver-produced steady state (gauge phi_x = 0)."""
    s = ss.state()
    return jacobian_matrix(params, s.psi_c, s.psi_x, ss.energy)


def classify_state(
    params: ModelParams,
    psi_c: complex,
    psi_x: complex,
    energy: float,
    tol_gauge: float = TOL_GAUGE,
    tol_stab: float = TOL_STAB,
) -> StabilityReport:
    """Eigen-decompose the Jacobian and classify; see classify()."""
    j = jacobian_matrix(params, psi_c, psi_x, energy)
    ev = np.linalg.eigvals(j)
    order = np.argsort(np.abs(ev))
    gauge_index = int(order[0])
    n_zero = int(np.sum(np.abs(ev) < tol_gauge))
    if n_zero == 0:
        raise GaugeModeMissing(
            f"smallest |lambda| = {np.abs(ev[gauge_index]):.3e} >= {tol_gauge:.0e}; "
            "the underlying steady state is inaccurate"
        )
    rest = np.delete(ev, gauge_index)
    margin = float(np.max(rest.real))
    if n_zero > 1:
        verdict = MARGINAL
    elif margin < -tol_stab:
        verdict = STABLE
    elif margin > tol_stab:
        verdict = UNSTABLE
    else:
        verdict = MARGINAL
    return StabilityReport(
        eigenvalues=tuple(ev),
        gauge_index=gauge_index,
        verdict=verdict,
        margin=margin,
        n_zero_modes=n_zero,
    )


def classify(params: ModelParams, ss: SteadyState) -> StabilityReport:
    """Stability verdict for a steady state.

    Exactly one eigenvalue must sit below TOL_GAUGE (the U(1) mode); if
    several do the verdict is Marginal and n_zero_modes flags it, and if
    none does GaugeModeMissing is raised.  The margin is the largest real
    part among the remaining three eigenvalues.
    """
    s = ss.state()
    return classify_state(params, s.psi_c, s.psi_x, ss.energy)
