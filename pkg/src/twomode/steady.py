"""Steady-state enumeration via an exact real cubic in the exciton density.

Im E = 0 applied to either spectrum branch reduces, after eliminating the
square root, to P(x) = 0 with

    P(x) = gamma_c*(p - g2*x)*[(g1*x - delta)^2 + (p - g2*x - gamma_c)^2]
           - omega_r^2*(p - g2*x - gamma_c)^2 ,

a cubic in x = n_x^2.  Writing the radicand as 4*omega_r^2 + (A + iB)^2
with A = g1*x - delta, B = p - g2*x + gamma_c, D = p - g2*x - gamma_c,
Im E = 0 forces the root's imaginary part to be -+D and its real part
-+A*B/D; eliminating the root gives (A^2 + D^2)(B^2 - D^2) = 4*omega_r^2*D^2,
which expands to P(x) = 0 (the quartic terms cancel identically).  Real
roots with x > 0 and p - g2*x >= 0 are exactly the candidate stationary
densities; D = 0 roots satisfy both branches at once (the coexistence
line), so branch membership is always re-checked against the spectrum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import ModelParams, TwoModeState, rhs, spectrum, spectrum_derivative

__all__ = [
    "UPPER",
    "LOWER",
    "STABLE",
    "UNSTABLE",
    "MARGINAL",
    "UNKNOWN",
    "SteadyState",
    "SolveTolerances",
    "NegativeGain",
    "PhaseIndeterminate",
    "DegenerateReduction",
    "NoConvergenceWarning",
    "stationarity_cubic",
    "cubic_discriminant",
    "cubic_discriminant_exact",
    "solve_steady_states",
    "photon_amplitude",
    "relative_phase",
    "eq3_density",
]

UPPER = "upper"
LOWER = "lower"

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"
UNKNOWN = "unknown"


class NegativeGain(ValueError):
    """Saturated gain p - g2*x is negative: the root is inadmissible."""


class PhaseIndeterminate(ValueError):
    """The closed-form relative phase is 0/0 and no energy was supplied."""


class DegenerateReduction(ValueError):
    """No density dependence left in the stationarity condition (g1 = g2 = 0)."""


class NoConvergenceWarning(UserWarning):
    """Root refinement failed for one candidate; the root was dropped."""


@dataclass(frozen=True)
class SolveTolerances:
    """Acceptance tolerances for the steady-state solver (dimensionless units)."""

    imag: float = 1e-9       # |Im E| < imag * max(1, |E|)
    x: float = 1e-9          # roots closer than x * max(1, x) are one root
    gain: float = 1e-12      # admit p - g2*x >= -gain
    degenerate: float = 1e-9  # |D| below which both branches are probed (informational)
    residual: float = 1e-10  # rotating-frame residual bound


@dataclass(frozen=True)
class SteadyState:
    """One nonzero fixed point in its co-rotating frame (gauge phi_x = 0)."""

    x: float
    n_x: float
    n_c: float
    phi_cx: float
    energy: float
    branch: str
    stability: str = UNKNOWN

    def state(self) -> TwoModeState:
        return TwoModeState(self.n_c * complex(math.cos(self.phi_cx), math.sin(self.phi_cx)), self.n_x)

    def residual(self, params: ModelParams) -> float:
        """Max magnitude of d(psi)/dt + i*E*psi; zero for an exact fixed point."""
        s = self.state()
        d = rhs(params, s)
        r_c = d.psi_c + 1j * self.energy * s.psi_c
        r_x = d.psi_x + 1j * self.energy * s.psi_x
        return max(abs(r_c), abs(r_x))


def stationarity_cubic(params: ModelParams) -> tuple[float, float, float, float]:
    """Coefficients (c3, c2, c1, c0) of P(x), highest degree first."""
    if params.g1 == 0 and params.g2 == 0:
        raise DegenerateReduction("g1 = g2 = 0 leaves no density dependence")
    g1, g2 = params.g1, params.g2
    gam, p, om = params.gamma_c, params.p, params.omega_r
    delta = params.delta()
    al = g1 * g1 + g2 * g2
    be = -2.0 * (g1 * delta + g2 * (p - gam))
    ka = delta * delta + (p - gam) ** 2
    c3 = -gam * g2 * al
    c2 = gam * (p * al - g2 * be) - om * om * g2 * g2
    c1 = gam * (p * be - g2 * ka) + 2.0 * om * om * g2 * (p - gam)
    c0 = gam * p * ka - om * om * (p - gam) ** 2
    return (c3, c2, c1, c0)


def cubic_discriminant(coeffs) -> float:
    """Discriminant of a*x^3 + b*x^2 + c*x + d (zero iff a repeated root)."""
    a, b, c, d = coeffs
    return (
        18.0 * a * b * c * d
        - 4.0 * b**3 * d
        + b * b * c * c
        - 4.0 * a * c**3
        - 27.0 * a * a * d * d
    )


def cubic_discriminant_exact(params: ModelParams) -> Fraction:
    """Discriminant of the stationarity cubic in exact rational arithmetic.

    The discriminant has a triple zero in p at the branch-coalescence
    point, where float evaluation loses all significant digits; exact
    Fractions keep the sign reliable for bisection.
    """
    g1, g2 = Fraction(params.g1), Fraction(params.g2)
    gam, p = Fraction(params.gamma_c), Fraction(params.p)
    om = Fraction(params.omega_r)
    delta = Fraction(params.e_c) - Fraction(params.e_x)
    al = g1 * g1 + g2 * g2
    be = -2 * (g1 * delta + g2 * (p - gam))
    ka = delta * delta + (p - gam) ** 2
    a = -gam * g2 * al
    b = gam * (p * al - g2 * be) - om * om * g2 * g2
    c = gam * (p * be - g2 * ka) + 2 * om * om * g2 * (p - gam)
    d = gam * p * ka - om * om * (p - gam) ** 2
    return 18 * a * b * c * d - 4 * b**3 * d + b * b * c * c - 4 * a * c**3 - 27 * a * a * d * d


def photon_amplitude(params: ModelParams, x: float) -> float:
    """Closed-form photon amplitude n_c = n_x * sqrt((p - g2*x)/gamma_c)."""
    if params.gamma_c <= 0:
        raise ValueError("photon_amplitude requires gamma_c > 0")
    u = params.p - params.g2 * x
    if u < 0:
        raise NegativeGain(f"p - g2*x = {u} < 0 at x = {x}")
    return math.sqrt(x) * math.sqrt(u / params.gamma_c)


def relative_phase(params: ModelParams, x: float, n_c: float, energy: float | None = None) -> float:
    """Relative phase phi_c - phi_x in (-pi, pi] from the closed arctangent form.

    arg( (delta - g1*x) / (omega_r*(rho - 1/rho)) - i*gamma_c*rho/omega_r ),
    rho = n_c/n_x.  When rho = 1 and delta = g1*x simultaneously (the
    coexistence degeneracy) the form is 0/0; supplying the real energy
    resolves it through the eigenvector relation phi = -arg(E - e_c +
    i*gamma_c), which stays unique at the coalescence point.
    """
    if x <= 0:
        raise ValueError("relative_phase requires x > 0")
    if n_c <= 0:
        raise PhaseIndeterminate("zero photon amplitude leaves the phase undefined")
    n_x = math.sqrt(x)
    rho = n_c / n_x
    rr = rho - 1.0 / rho
    num = params.delta() - params.g1 * x
    if abs(rr) < 1e-12 and abs(num) < 1e-12:
        if energy is None:
            raise PhaseIndeterminate("0/0 arctangent arguments; pass the state energy to resolve")
        phi = -math.atan2(params.gamma_c, energy - params.e_c)
    elif rr == 0.0:
        raise PhaseIndeterminate("n_c = n_x makes the first-term denominator vanish")
    else:
        phi = math.atan2(-(params.gamma_c * rho) / params.omega_r, num / (params.omega_r * rr))
    if phi <= -math.pi:
        phi += 2.0 * math.pi
    return phi


def eq3_density(params: ModelParams, energy: float) -> complex:
    """Implicit closed-form density at a real energy E:

    x = (1/g) * (E - e_x - i*p - omega_r^2 / (E - e_c + i*gamma_c)).

    For a true steady state the result is real and equals the root of the
    stationarity cubic; the imaginary part measures inconsistency.
    """
    g = params.g1 - 1j * params.g2
    return (
        energy
        - params.e_x
        - 1j * params.p
        - params.omega_r**2 / (energy - params.e_c + 1j * params.gamma_c)
    ) / g


def _polish_multiple(coeffs, x0: float) -> float:
    """Newton iteration on P/P' (quadratic convergence even at double roots)."""
    c = np.asarray(coeffs, dtype=float)
    dc = np.polyder(c)
    ddc = np.polyder(dc)
    x = x0
    for _ in range(60):
        f = np.polyval(c, x)
        fp = np.polyval(dc, x)
        fpp = np.polyval(ddc, x)
        den = fp * fp - f * fpp
        if den == 0.0:
            break
        step = f * fp / den
        x -= step
        if abs(step) < 1e-14 * max(1.0, abs(x)):
            break
    return x


def _refine_on_branch(params: ModelParams, x: float, upper: bool) -> float:
    """Drive Im E of one branch to machine floor by Newton in the density.

    np.roots resolves a double root of the cubic only to ~sqrt(eps); the
    coexistence-pair roots are simple zeros of the per-branch Im E, so a
    few Newton steps on Im E directly recover full precision.
    """
    for _ in range(60):
        sp = spectrum(params, x)
        e = sp.e_upper if upper else sp.e_lower
        f = e.imag
        if abs(f) < 1e-15 * max(1.0, abs(e)):
            break
        d = spectrum_derivative(params, x, upper)
        if d is None or d.imag == 0.0:
            break
        x_new = x - f / d.imag
        if x_new <= 0.0:
            x_new = 0.5 * x
        if abs(x_new - x) < 1e-16 * max(1.0, abs(x)):
            x = x_new
            break
        x = x_new
    return x


def solve_steady_states(
    params: ModelParams, tol: SolveTolerances | None = None
) -> list[SteadyState]:
    """All nonzero steady states (0 to 3), stability not yet classified.

    Cubic roots come from the companion matrix (np.roots), are polished on
    P/P', then refined per branch on Im E.  A root where both branches
    reach Im E = 0 (|D| ~ 0, the coexistence case) yields one record per
    branch at the same density.  Candidates whose rotating-frame residual
    exceeds tol.residual are dropped with a NoConvergenceWarning.
    """
    if params.g2 <= 0:
        raise ValueError("steady-state solving requires g2 > 0 (gain saturation)")
    if params.gamma_c <= 0:
        raise ValueError("steady-state solving requires gamma_c > 0")
    tol = tol or SolveTolerances()

    coeffs = stationarity_cubic(params)
    c = np.array(coeffs, dtype=float)
    c = np.trim_zeros(c, "f")
    if c.size <= 1:
        return []
    raw = np.roots(c)

    candidates: list[float] = []
    for z in raw:
        if abs(z.imag) >= 1e-5 * max(1.0, abs(z.real)):
            continue
        x = _polish_multiple(coeffs, float(z.real))
        if x > 0 and params.p - params.g2 * x >= -tol.gain:
            candidates.append(x)
    candidates.sort()
    xs: list[float] = []
    for x in candidates:
        if not xs or abs(x - xs[-1]) > tol.x * max(1.0, abs(x)):
            xs.append(x)

    states: list[SteadyState] = []
    seen: list[tuple[float, str]] = []
    for x0 in xs:
        sp0 = spectrum(params, x0)
        for branch, e0 in ((UPPER, sp0.e_upper), (LOWER, sp0.e_lower)):
            # loose gate before the expensive per-branch refinement
            if abs(e0.imag) >= 1e-4 * max(1.0, abs(e0)):
                continue
            x = _refine_on_branch(params, x0, branch == UPPER)
            sp = spectrum(params, x)
            e = sp.e_upper if branch == UPPER else sp.e_lower
            if abs(e.imag) >= tol.imag * max(1.0, abs(e)):
                continue
            if x <= 0 or params.p - params.g2 * x < -tol.gain:
                continue
            if any(branch == b and abs(x - xb) <= tol.x * max(1.0, abs(x)) for xb, b in seen):
                continue
            u = max(params.p - params.g2 * x, 0.0)
            n_x = math.sqrt(x)
            n_c = n_x * math.sqrt(u / params.gamma_c)
            try:
                phi = relative_phase(params, x, n_c, energy=e.real)
            except PhaseIndeterminate:
                phi = -0.5 * math.pi
            ss = SteadyState(x=x, n_x=n_x, n_c=n_c, phi_cx=phi, energy=e.real, branch=branch)
            res = ss.residual(params)
            if res > tol.residual:
                warnings.warn(
                    f"dropping root x={x:.6g} ({branch}): residual {res:.2e} exceeds "
                    f"{tol.residual:.0e}",
                    NoConvergenceWarning,
                    stacklevel=2,
                )
                continue
            seen.append((x, branch))
            states.append(ss)

    states.sort(key=lambda s: (s.x, s.branch != UPPER))
    return states
