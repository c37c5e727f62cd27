import math

import numpy as np
import pytest

from twomode.dynamics import (
    OSCILLATING,
    STEADY,
    DECAYED,
    DIVERGED,
    Overflow,
    canonical_start,
    classify_trajectory,
    dominant_frequency,
    gauge_distance,
    integrate,
    random_start,
    settle,
)
from twomode.model import ModelParams, TwoModeState
from twomode.steady import UPPER, solve_steady_states


def test_linear_coherent_exchange_matches_closed_form():
    # resonant lossless linear limit: |psi_c(t)|^2 = cos^2(t)
    params = ModelParams(gamma_c=0.0, p=0.0, e_c=0.0, e_x=0.0, g1=1e-300, g2=0.0)
    traj = integrate(params, TwoModeState(1.0 + 0j, 0j), dt=0.01, t_end=10.0, stride=10)
    expect = np.cos(traj.times) ** 2
    assert np.max(np.abs(traj.n_c2 - expect)) < 1e-6


def test_pure_decay_matches_exponential():
    # coupling zeroed through the test hook: photon decays as e^{-gamma*t}
    params = ModelParams(gamma_c=0.8, p=0.0, e_c=0.0, e_x=0.0, omega_r=0.0, g1=0.1, g2=0.0)
    traj = integrate(params, TwoModeState(1.0 + 0j, 0j), dt=0.01, t_end=5.0, stride=25)
    expect = np.exp(-params.gamma_c * traj.times)
    assert np.max(np.abs(np.abs(traj.psi_c) - expect)) < 1e-8


def test_fourth_order_step_convergence():
    params = ModelParams(gamma_c=0.0, p=0.0, e_c=0.0, e_x=0.0, g1=1e-300, g2=0.0)
    exact = np.array([math.cos(10.0), 0.0, 0.0, -math.sin(10.0)])

    def end_error(dt):
        n = int(round(10.0 / dt))
        traj = integrate(params, TwoModeState(1.0 + 0j, 0j), dt=dt, t_end=10.0, stride=n)
        c, x = traj.psi_c[-1], traj.psi_x[-1]
        got = np.array([c.real, c.imag, x.real, x.imag])
        return np.max(np.abs(got - exact))

    errs = [end_error(dt) for dt in (0.02, 0.01, 0.005)]
    for e_coarse, e_fine in zip(errs, errs[1:]):
        ratio = e_coarse / e_fine
        assert 8.0 < ratio < 32.0, f"expected ~16x per halving, got {ratio}"


def test_trajectory_sampling_contract():
    params = ModelParams(gamma_c=0.5, p=0.5)
    traj = integrate(params, TwoModeState(0.1 + 0j, 0.1 + 0j), dt=0.01, t_end=3.0, stride=7)
    diffs = np.diff(traj.times)
    assert np.all(diffs > 0)
    np.testing.assert_allclose(diffs, 0.07, rtol=1e-12)
    assert len(traj) == int(round(3.0 / 0.01)) // 7 + 1
    with pytest.raises(ValueError):
        integrate(params, TwoModeState(0j, 0j), dt=0.05, t_end=1.0)


def test_overflow_raises_with_partial_trajectory():
    # pure linear gain (no saturation path at g2 ~ 0+, Kerr off-resonant):
    # amplitude must hit the guard
    params = ModelParams(gamma_c=0.0, p=2.0, e_c=0.0, e_x=0.0, g1=1e-300, g2=0.0)
    with pytest.raises(Overflow) as exc:
        integrate(params, TwoModeState(0.5 + 0j, 0.5 + 0j), dt=0.01, t_end=300.0, stride=10)
    traj = exc.value.trajectory
    assert traj.overflowed
    assert 0 < len(traj) < 3001
    verdict = classify_trajectory(traj)
    assert verdict.kind == DIVERGED


def test_settle_decayed_without_gain():
    params = ModelParams(gamma_c=0.6, p=0.0)
    verdict = settle(params, TwoModeState(0.05 + 0j, 0.05 + 0j), horizon=500.0)
    assert verdict.kind == DECAYED


def test_settle_steady_lands_on_solver_root():
    # single-solution regime: any moderate start relaxes onto the fixed point
    params = ModelParams(gamma_c=1.0, p=1.2)
    states = solve_steady_states(params)
    assert len(states) == 1
    verdict = settle(params, TwoModeState(0.5 + 0.1j, 0.8 - 0.3j), horizon=500.0)
    assert verdict.kind == STEADY
    target = states[0].state()
    got = verdict.final_state
    amp_dist = math.hypot(abs(got.psi_c) - abs(target.psi_c), abs(got.psi_x) - abs(target.psi_x))
    assert amp_dist < 1e-4
    assert gauge_distance(got, target) < 1e-4


def test_coexistence_line_oscillation_frequency():
    # equal superposition of the degenerate pair: permanent beating at the
    # spectral gap 2*sqrt(omega_r^2 - gamma_c^2)
    params = ModelParams(gamma_c=0.75, p=0.81)
    start = canonical_start(params, "equal_superposition")
    verdict = settle(params, start, horizon=800.0)
    assert verdict.kind == OSCILLATING
    gap = 2.0 * math.sqrt(1.0 - 0.75**2)
    assert verdict.frequency == pytest.approx(gap, rel=0.02)
    assert verdict.envelope[0] > 0.1


def test_coexistence_line_near_upper_start_settles_on_upper_branch():
    params = ModelParams(gamma_c=0.75, p=0.81)
    start = canonical_start(params, "near_upper")
    verdict = settle(params, start, horizon=800.0)
    assert verdict.kind == STEADY
    states = solve_steady_states(params)
    top = max(states, key=lambda s: s.energy)
    assert top.branch == UPPER
    assert gauge_distance(verdict.final_state, top.state()) < 1e-4


def test_settle_verdict_gauge_invariant():
    params = ModelParams(gamma_c=1.0, p=1.2)
    base = TwoModeState(0.5 + 0.1j, 0.8 - 0.3j)
    v0 = settle(params, base, horizon=500.0)
    ph = np.exp(1.2j)
    v1 = settle(params, TwoModeState(ph * base.psi_c, ph * base.psi_x), horizon=500.0)
    assert v0.kind == v1.kind
    assert gauge_distance(v0.final_state, v1.final_state) < 1e-8


def test_dominant_frequency_on_synthetic_tone():
    t = np.arange(0, 400, 0.05)
    w0 = 1.32288
    sig = 2.0 + 0.7 * np.cos(w0 * t + 0.4)
    w, ratio = dominant_frequency(t, sig)
    assert w == pytest.approx(w0, rel=1e-3)
    assert ratio > 100


def test_random_start_reproducible_and_in_range():
    a = random_start(123)
    b = random_start(123)
    assert a == b
    assert 0.1 <= abs(a.psi_c) <= 2.0
    assert 0.1 <= abs(a.psi_x) <= 2.0
    assert random_start(124) != a


def test_settle_horizon_validation():
    params = ModelParams(gamma_c=0.5, p=0.5)
    with pytest.raises(ValueError):
        settle(params, TwoModeState(0.1 + 0j, 0.1 + 0j), horizon=100.0)
