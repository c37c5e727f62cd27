"""Time integration and long-time classification of the nonlinear dynamics.

Fixed-step 4th-order Runge-Kutta (deterministic across runs and backends)
with an overflow guard; settle() classifies the asymptotic behaviour into
steady / oscillating / decayed / diverged from gauge-invariant observables
|psi_c|^2, |psi_x|^2 only, since the global phase drifts at the state
energy and is not observable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernel
from .model import ModelParams, TwoModeState, spectrum
from .steady import LOWER, UPPER, SolveTolerances, SteadyState, solve_steady_states

__all__ = [
    "OVERFLOW_LIMIT",
    "Trajectory",
    "Overflow",
    "AsymptoticVerdict",
    "integrate",
    "settle",
    "classify_trajectory",
    "canonical_start",
    "random_start",
    "gauge_distance",
    "integration_verdict",
    "dominant_frequency",
]

OVERFLOW_LIMIT = 1e6

STEADY = "steady"
OSCILLATING = "oscillating"
DECAYED = "decayed"
DIVERGED = "diverged"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled trajectory; times[k] = k * dt * stride."""

    times: np.ndarray
    psi_c: np.ndarray
    psi_x: np.ndarray
    dt: float
    stride: int
    overflowed: bool = False

    def __len__(self) -> int:
        return len(self.times)

    @property
    def n_c2(self) -> np.ndarray:
        return np.abs(self.psi_c) ** 2

    @property
    def n_x2(self) -> np.ndarray:
        return np.abs(self.psi_x) ** 2

    def state(self, i: int) -> TwoModeState:
        return TwoModeState(complex(self.psi_c[i]), complex(self.psi_x[i]))

    @property
    def states(self) -> list[TwoModeState]:
        return [self.state(i) for i in range(len(self))]


class Overflow(RuntimeError):
    """Amplitude exceeded the overflow guard; carries the partial trajectory."""

    def __init__(self, trajectory: Trajectory):
        super().__init__(
            f"amplitude exceeded {OVERFLOW_LIMIT:g} at t ~ "
            f"{trajectory.times[-1] if len(trajectory) else 0.0:g}"
        )
        self.trajectory = trajectory


@dataclass(frozen=True)
class AsymptoticVerdict:
    """Long-time classification of one trajectory.

    frequency is the dominant angular frequency of |psi_c|^2 (> 0 iff
    oscillating); envelope holds the (|psi_c|^2, |psi_x|^2) oscillation
    half-amplitudes; transient_end is the discarded initial span.
    """

    kind: str
    transient_end: float
    final_state: TwoModeState | None = None
    frequency: float | None = None
    envelope: tuple[float, float] | None = None


def integrate(
    params: ModelParams,
    initial: TwoModeState,
    dt: float = 0.01,
    t_end: float = 100.0,
    stride: int = 1,
) -> Trajectory:
    """RK4-propagate `initial` to t_end, sampling every `stride` steps.

    dt must not exceed 0.02 (>= 150 steps per bare coupling period).
    Raises Overflow carrying the partial trajectory if any amplitude
    passes the guard; divergence is itself a meaningful outcome.
    """
    if dt <= 0 or dt > 0.02:
        raise ValueError(f"dt must be in (0, 0.02], got {dt}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    n_steps = int(round(t_end / dt))
    out_c, out_x, n_filled, overflowed = kernel.rk4_propagate(
        params.e_c,
        params.e_x,
        params.omega_r,
        params.gamma_c,
        params.p,
        params.g1,
        params.g2,
        complex(initial.psi_c),
        complex(initial.psi_x),
        dt,
        n_steps,
        stride,
        OVERFLOW_LIMIT,
    )
    times = np.arange(n_filled) * (dt * stride)
    traj = Trajectory(
        times=times,
        psi_c=out_c[:n_filled],
        psi_x=out_x[:n_filled],
        dt=dt,
        stride=stride,
        overflowed=bool(overflowed),
    )
    if overflowed:
        raise Overflow(traj)
    return traj


def dominant_frequency(times: np.ndarray, signal: np.ndarray) -> tuple[float, float]:
    """Dominant angular frequency of a uniformly sampled real signal.

    Returns (omega, peak_ratio) where peak_ratio is the spectral peak over
    the spectral median (DC excluded).  The peak bin is sharpened by
    quadratic interpolation of log magnitudes.
    """
    sig = np.asarray(signal, dtype=float)
    sig = sig - sig.mean()
    # Hann window: leakage suppression makes the log-parabola bin
    # interpolation accurate to ~1e-4 of the frequency
    mag = np.abs(np.fft.rfft(sig * np.hanning(len(sig))))
    if len(mag) < 3:
        return 0.0, 0.0
    k = int(np.argmax(mag[1:]) + 1)
    median = float(np.median(mag[1:]))
    ratio = float(mag[k] / median) if median > 0 else math.inf
    shift = 0.0
    if 1 <= k < len(mag) - 1 and mag[k - 1] > 0 and mag[k + 1] > 0:
        la, lb, lc = math.log(mag[k - 1]), math.log(mag[k]), math.log(mag[k + 1])
        den = la - 2.0 * lb + lc
        if den != 0.0:
            shift = 0.5 * (la - lc) / den
    dt_sample = float(times[1] - times[0])
    domega = 2.0 * math.pi / (len(sig) * dt_sample)
    return (k + shift) * domega, ratio


def _envelope_drift(times: np.ndarray, signal: np.ndarray, window: float = 100.0):
    """(drift per `window` time units, mean half-amplitude) of an oscillation."""
    t0, t1 = float(times[0]), float(times[-1])
    n_win = max(int((t1 - t0) / window), 2)
    edges = np.linspace(t0, t1, n_win + 1)
    amps, centers = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        m = (times >= a) & (times <= b)
        if np.count_nonzero(m) < 4:
            continue
        amps.append(0.5 * float(np.ptp(signal[m])))
        centers.append(0.5 * (a + b))
    if len(amps) < 2:
        return math.inf, 0.0
    mean_amp = float(np.mean(amps))
    if mean_amp == 0.0:
        return 0.0, 0.0
    drift = abs(amps[-1] - amps[0]) / mean_amp
    return drift * window / (centers[-1] - centers[0]), mean_amp


def settle(
    params: ModelParams,
    initial: TwoModeState,
    horizon: float = 800.0,
    dt: float = 0.01,
    stride: int = 5,
    transient_fraction: float = 0.5,
) -> AsymptoticVerdict:
    """Integrate to `horizon`, discard the transient, classify the tail.

    In order: Diverged on overflow; Decayed if tail amplitudes stay below
    1e-8; Steady if both |psi|^2 tails vary by < 1e-6 relative; Oscillating
    if |psi_c|^2 has a discrete spectral peak >= 10x the spectral median
    with envelope drift < 1% per 100 time units.  Otherwise Inconclusive
    (returned, not raised).
    """
    if horizon < 500.0:
        raise ValueError(f"horizon must be >= 500, got {horizon}")
    try:
        traj = integrate(params, initial, dt=dt, t_end=horizon, stride=stride)
    except Overflow as ov:
        t_abort = float(ov.trajectory.times[-1]) if len(ov.trajectory) else 0.0
        return AsymptoticVerdict(kind=DIVERGED, transient_end=t_abort)
    return classify_trajectory(traj, transient_fraction)


def classify_trajectory(traj: Trajectory, transient_fraction: float = 0.5) -> AsymptoticVerdict:
    """Classify an already-integrated trajectory; see settle() for the rules."""
    if not 0.0 < transient_fraction < 1.0:
        raise ValueError("transient_fraction must be in (0, 1)")
    if traj.overflowed:
        t_abort = float(traj.times[-1]) if len(traj) else 0.0
        return AsymptoticVerdict(kind=DIVERGED, transient_end=t_abort)

    cut = int(len(traj) * transient_fraction)
    transient_end = float(traj.times[cut])
    t = traj.times[cut:]
    nc2 = traj.n_c2[cut:]
    nx2 = traj.n_x2[cut:]

    if float(np.max(np.sqrt(nc2 + nx2))) < 1e-8:
        return AsymptoticVerdict(kind=DECAYED, transient_end=transient_end)

    rel_c = float(np.ptp(nc2)) / max(float(np.max(nc2)), 1e-300)
    rel_x = float(np.ptp(nx2)) / max(float(np.max(nx2)), 1e-300)
    if rel_c < 1e-6 and rel_x < 1e-6:
        return AsymptoticVerdict(
            kind=STEADY, transient_end=transient_end, final_state=traj.state(len(traj) - 1)
        )

    omega, ratio = dominant_frequency(t, nc2)
    drift, _ = _envelope_drift(t, nc2)
    if ratio >= 10.0 and drift < 0.01 and omega > 0:
        return AsymptoticVerdict(
            kind=OSCILLATING,
            transient_end=transient_end,
            frequency=omega,
            envelope=(0.5 * float(np.ptp(nc2)), 0.5 * float(np.ptp(nx2))),
        )
    return AsymptoticVerdict(kind=INCONCLUSIVE, transient_end=transient_end)


def _degenerate_pair(states: list[SteadyState]) -> tuple[SteadyState, SteadyState] | None:
    """The closest-in-density (upper, lower) pair, or None."""
    uppers = [s for s in states if s.branch == UPPER]
    lowers = [s for s in states if s.branch == LOWER]
    best = None
    for su in uppers:
        for sl in lowers:
            d = abs(su.x - sl.x)
            if best is None or d < best[0]:
                best = (d, su, sl)
    if best is None:
        return None
    return best[1], best[2]


def canonical_start(params: ModelParams, kind: str) -> TwoModeState:
    """Deterministic reference initial conditions.

    "equal_superposition": mean of the closest upper/lower steady-state
    pair (on the coexistence line this is the degenerate pair itself).
    "near_upper": the highest-energy steady state, amplified by 2%.
    """
    states = solve_steady_states(params, SolveTolerances())
    if kind == "equal_superposition":
        pair = _degenerate_pair(states)
        if pair is None:
            raise ValueError("no upper/lower steady-state pair to superpose")
        vu, vl = pair[0].state(), pair[1].state()
        return TwoModeState(0.5 * (vu.psi_c + vl.psi_c), 0.5 * (vu.psi_x + vl.psi_x))
    if kind == "near_upper":
        if not states:
            raise ValueError("no steady states at these parameters")
        top = max(states, key=lambda s: s.energy).state()
        return TwoModeState(1.02 * top.psi_c, 1.02 * top.psi_x)
    raise ValueError(f"unknown canonical start {kind!r}")


def random_start(seed: int, amp_range: tuple[float, float] = (0.1, 2.0)) -> TwoModeState:
    """Seeded random initial state with |psi| in amp_range and uniform phases."""
    rng = np.random.default_rng(seed)
    r = rng.uniform(*amp_range, size=2)
    th = rng.uniform(-math.pi, math.pi, size=2)
    return TwoModeState(r[0] * np.exp(1j * th[0]), r[1] * np.exp(1j * th[1]))


def gauge_distance(a: TwoModeState, b: TwoModeState) -> float:
    """Distance in the gauge-invariant observables (n_c^2, n_x^2, psi_c*conj(psi_x))."""
    oa = np.array(
        [
            abs(a.psi_c) ** 2,
            abs(a.psi_x) ** 2,
            (a.psi_c * np.conj(a.psi_x)).real,
            (a.psi_c * np.conj(a.psi_x)).imag,
        ]
    )
    ob = np.array(
        [
            abs(b.psi_c) ** 2,
            abs(b.psi_x) ** 2,
            (b.psi_c * np.conj(b.psi_x)).real,
            (b.psi_c * np.conj(b.psi_x)).imag,
        ]
    )
    return float(np.linalg.norm(oa - ob))


def integration_verdict(
    params: ModelParams,
    ss: SteadyState,
    seed: int = 0,
    kick: float = 1e-5,
    t_end: float = 200.0,
    converge_tol: float = 1e-4,
) -> str:
    """Brute-force stability probe: kick the state, integrate, inspect distance.

    Returns "stable" if the perturbed trajectory returns within converge_tol
    of the fixed point by t_end, "unstable" if it leaves by more than 100x
    the kick, "ambiguous" otherwise.
    """
    rng = np.random.default_rng(seed)
    s0 = ss.state()
    dz = kick * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
    start = TwoModeState(s0.psi_c + dz[0], s0.psi_x + dz[1])
    try:
        traj = integrate(params, start, dt=0.01, t_end=t_end, stride=50)
    except Overflow:
        return "unstable"
    d_end = gauge_distance(traj.state(len(traj) - 1), s0)
    if d_end < converge_tol:
        return "stable"
    if d_end > 100.0 * kick:
        return "unstable"
    return "ambiguous"


def linear_vacuum_growth(params: ModelParams) -> float:
    """Largest Im E at zero density: > 0 means the vacuum is unstable (lasing)."""
    sp = spectrum(params, 0.0)
    return max(sp.e_upper.imag, sp.e_lower.imag)
