"""Phase diagrams over (gamma_c, p): sweeps, critical points, transitions.

Selection rule per cell: the lowest-energy dynamically stable solution
(a system weakly coupled to an energy sink relaxes there).  Critical
points: the branch-coalescence point EP at (gamma_c, p) = (omega_r,
omega_r + g2*delta/g1); the endpoint ET where the bistability window
closes (folds of the cubic merge); the coexistence line p = (g2/g1)*delta
+ gamma_c on which upper and lower branches share one density.

Fold detection is algebraic (cubic discriminant), not grid diffing, so
EP/ET localisation beats any grid resolution.  The discriminant has a
triple zero in p at the EP where double precision loses the sign, so the
EP verification bisects on the sign of the exact rational discriminant.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dynamics import linear_vacuum_growth
from .model import ModelParams
from .stability import MARGINAL, STABLE, GaugeModeMissing, classify
from .steady import (
    NoConvergenceWarning,
    SteadyState,
    cubic_discriminant,
    cubic_discriminant_exact,
    solve_steady_states,
    stationarity_cubic,
)

__all__ = [
    "REGION_NO_LASING",
    "REGION_SINGLE",
    "REGION_BISTABLE",
    "REGION_OSC_COEXISTENCE",
    "REGION_UNSTABLE_ONLY",
    "REGION_ERROR",
    "PhaseCell",
    "SweepGrid",
    "CriticalPoints",
    "EPResult",
    "ETResult",
    "ThresholdEvent",
    "NotBlueDetuned",
    "BracketInvalid",
    "compute_cell",
    "sweep",
    "locate_ep",
    "locate_et",
    "bistable_window",
    "fold_points",
    "transition_line",
    "thresholds",
    "r_line",
    "loop_jumps",
    "grid_csv_lines",
    "critical_points_json",
]

REGION_NO_LASING = "no_lasing"
REGION_SINGLE = "single"
REGION_BISTABLE = "bistable"
REGION_OSC_COEXISTENCE = "oscillatory_coexistence"
REGION_UNSTABLE_ONLY = "unstable_only"
REGION_ERROR = "error"

JUMP_TOL = 0.05


class NotBlueDetuned(ValueError):
    """The branch-coalescence point requires delta = e_c - e_x > 0."""


class BracketInvalid(ValueError):
    """The bistability window does not change character over the bracket."""


@dataclass(frozen=True)
class PhaseCell:
    """Per-grid-point summary of solutions, stability and selection."""

    gamma_c: float
    p: float
    n_solutions: int
    n_stable: int
    n_marginal: int
    region: str
    selected: tuple[float, float, float, float, str] | None = None
    # selected = (energy, x, n_c, phi_cx, branch) of the lowest-energy stable state


@dataclass(frozen=True)
class SweepGrid:
    """Row-major grid: cells[i*len(ps) + j] belongs to (gammas[i], ps[j])."""

    gammas: np.ndarray
    ps: np.ndarray
    cells: tuple[PhaseCell, ...]

    def cell(self, i: int, j: int) -> PhaseCell:
        return self.cells[i * len(self.ps) + j]


@dataclass(frozen=True)
class EPResult:
    gamma_c: float
    p_closed_form: float
    p_numeric: float | None
    x: float  # coalescence density delta/g1


@dataclass(frozen=True)
class ETResult:
    gamma_c: float
    p: float
    x: float
    bracket: tuple[float, float]  # final bisection bracket on gamma_c


@dataclass(frozen=True)
class ThresholdEvent:
    p: float
    kind: str  # "solutions" | "stable" | "vacuum"
    before: tuple[int, int]
    after: tuple[int, int]


@dataclass(frozen=True)
class CriticalPoints:
    ep: tuple[float, float]
    et: tuple[float, float] | None
    r_line_slope: float
    r_line_intercept: float
    transition: tuple[tuple[float, float], ...] = ()


def r_line(params: ModelParams) -> tuple[float, float]:
    """(slope, intercept) of the coexistence line p = slope*gamma_c + intercept."""
    return 1.0, (params.g2 / params.g1) * params.delta()


def _with(params: ModelParams, **kw) -> ModelParams:
    return dataclasses.replace(params, **kw)


def _solve_quiet(params: ModelParams) -> list[SteadyState]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoConvergenceWarning)
        return solve_steady_states(params)


def compute_cell(params: ModelParams) -> PhaseCell:
    """Solve and classify one parameter point; never raises."""
    try:
        states = _solve_quiet(params)
        verdicts = []
        for s in states:
            try:
                verdicts.append(classify(params, s).verdict)
            except GaugeModeMissing:
                verdicts.append(MARGINAL)
        n_sol = len(states)
        n_stab = sum(v == STABLE for v in verdicts)
        n_marg = sum(v == MARGINAL for v in verdicts)

        selected = None
        best_e = math.inf
        for s, v in zip(states, verdicts):
            if v == STABLE and s.energy < best_e:
                best_e = s.energy
                selected = (s.energy, s.x, s.n_c, s.phi_cx, s.branch)

        degenerate = any(
            a.branch != b.branch and abs(a.x - b.x) <= 1e-6 * max(1.0, abs(a.x))
            for i, a in enumerate(states)
            for b in states[i + 1 :]
        )
        if n_sol == 0:
            region = REGION_NO_LASING
        elif degenerate:
            region = REGION_OSC_COEXISTENCE
        elif n_stab == 0:
            region = REGION_UNSTABLE_ONLY
        elif n_stab == 1:
            region = REGION_SINGLE
        else:
            region = REGION_BISTABLE
        return PhaseCell(
            gamma_c=params.gamma_c,
            p=params.p,
            n_solutions=n_sol,
            n_stable=n_stab,
            n_marginal=n_marg,
            region=region,
            selected=selected,
        )
    except Exception:
        return PhaseCell(
            gamma_c=params.gamma_c,
            p=params.p,
            n_solutions=0,
            n_stable=0,
            n_marginal=0,
            region=REGION_ERROR,
        )


def _sweep_row(args) -> list[PhaseCell]:
    base_kw, gamma, ps = args
    return [compute_cell(ModelParams(gamma_c=gamma, p=float(p), **base_kw)) for p in ps]


def sweep(
    params_base: ModelParams,
    gamma_range: tuple[float, float] = (0.2, 1.6),
    p_range: tuple[float, float] = (0.05, 2.0),
    resolution: tuple[int, int] = (200, 200),
    jobs: int = 1,
) -> SweepGrid:
    """Grid of PhaseCells over (gamma_c, p), row-major in gamma then p.

    Rows are independent; jobs > 1 distributes them over processes with a
    deterministic in-order assembly, so output is identical for any job
    count.
    """
    n_gamma, n_p = resolution
    if n_gamma < 2 or n_p < 2:
        raise ValueError("resolution must be >= 2 per axis")
    gammas = np.linspace(gamma_range[0], gamma_range[1], n_gamma)
    ps = np.linspace(p_range[0], p_range[1], n_p)
    base_kw = dict(
        e_c=params_base.e_c,
        e_x=params_base.e_x,
        omega_r=params_base.omega_r,
        g1=params_base.g1,
        g2=params_base.g2,
    )
    tasks = [(base_kw, float(g), ps) for g in gammas]
    cells: list[PhaseCell] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for row in ex.map(_sweep_row, tasks, chunksize=4):
                cells.extend(row)
    else:
        for task in tasks:
            cells.extend(_sweep_row(task))
    return SweepGrid(gammas=gammas, ps=ps, cells=tuple(cells))


# ---------------------------------------------------------------------------
# critical points


def _count(params: ModelParams) -> int:
    return len(_solve_quiet(params))


def _double_root_location(params: ModelParams) -> float | None:
    """Density of the closest pair of cubic roots (the merging pair)."""
    c = np.array(stationarity_cubic(params))
    rr = np.roots(np.trim_zeros(c, "f"))
    if len(rr) < 2:
        return None
    best = None
    for i in range(len(rr)):
        for j in range(i + 1, len(rr)):
            d = abs(rr[i] - rr[j])
            if best is None or d < best[0]:
                best = (d, 0.5 * (rr[i] + rr[j]).real)
    return best[1]


def locate_ep(params: ModelParams) -> EPResult:
    """Closed-form branch-coalescence point plus numerical verification.

    Closed form: gamma_c = omega_r, p = omega_r + g2*delta/g1, merging at
    x = delta/g1 (blue detuning required).  Verification: at gamma_c =
    omega_r the cubic discriminant, evaluated in exact rational
    arithmetic, changes sign at exactly that p; float evaluation cannot
    resolve the sign because the zero is triple.
    """
    delta = params.delta()
    if delta <= 0:
        raise NotBlueDetuned(f"delta = {delta} <= 0")
    p_closed = params.omega_r + params.g2 * delta / params.g1
    x_ep = delta / params.g1
    if params.g2 == 0:
        return EPResult(params.omega_r, p_closed, None, x_ep)

    at_ep_gamma = _with(params, gamma_c=params.omega_r)

    def sign_at(pp: float) -> int:
        d = cubic_discriminant_exact(_with(at_ep_gamma, p=pp))
        return (d > 0) - (d < 0)

    # The zero is triple, so float evaluation cannot bracket it; exact
    # rational signs in a tight bracket around the closed form can.  The
    # bracket starts narrow to exclude the ordinary bistability folds
    # (which can sit ~1e-4 away in the strong-saturation regime).
    lo = hi = None
    for h in (1e-6, 1e-4, 1e-2):
        a, b = p_closed - h, p_closed + h
        if a <= 0:
            continue
        if sign_at(a) != sign_at(b):
            lo, hi = a, b
            break
    if lo is None:
        return EPResult(params.omega_r, p_closed, None, x_ep)

    s_lo = sign_at(lo)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        s_mid = sign_at(mid)
        if s_mid == 0:
            lo = hi = mid
            break
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, abs(hi)):
            break
    return EPResult(params.omega_r, p_closed, 0.5 * (lo + hi), x_ep)


def fold_points(params: ModelParams, gamma: float, p_range: tuple[float, float], n_scan: int = 2000) -> list[float]:
    """p values where the cubic acquires a double root (discriminant zeros)."""
    at_gamma = _with(params, gamma_c=gamma)

    def disc(pp: float) -> float:
        return cubic_discriminant(stationarity_cubic(_with(at_gamma, p=pp)))

    grid = np.linspace(p_range[0], p_range[1], n_scan)
    vals = np.array([disc(pp) for pp in grid])
    out = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            out.append(float(grid[i]))
        elif a * b < 0:
            out.append(float(brentq(disc, grid[i], grid[i + 1], xtol=1e-12)))
    return out


def bistable_window(
    params: ModelParams,
    gamma: float,
    p_range: tuple[float, float] = (0.02, 2.2),
    n_scan: int = 600,
    hint: tuple[float, float] | None = None,
) -> tuple[float, float] | None:
    """The maximal p-interval with three admissible solutions, or None.

    Edges are refined by bisection on the solution count.  Near the window
    closure the interval shrinks below any fixed scan step, so a (center,
    width) hint from a previous call triggers zoomed re-scans.
    """
    at_gamma = _with(params, gamma_c=gamma)

    def count(pp: float) -> int:
        return _count(_with(at_gamma, p=pp))

    spans = [(p_range[0], p_range[1], n_scan)]
    if hint is not None:
        c0, w0 = hint
        for zoom in (10.0, 100.0, 1e4):
            half = max(w0 * zoom, 1e-12)
            spans.append((max(c0 - half, p_range[0]), min(c0 + half, p_range[1]), 400))
    found = None
    for lo, hi, n in spans:
        grid = np.linspace(lo, hi, n)
        counts = np.array([count(pp) for pp in grid])
        idx = np.where(counts >= 3)[0]
        if len(idx):
            found = (grid, counts, idx)
            break
    if found is None:
        return None
    grid, counts, idx = found
    i0, i1 = int(idx[0]), int(idx[-1])

    def refine(p_out: float, p_in: float) -> float:
        lo_, hi_ = p_out, p_in
        for _ in range(50):
            mid = 0.5 * (lo_ + hi_)
            if count(mid) >= 3:
                hi_ = mid
            else:
                lo_ = mid
            if abs(hi_ - lo_) < 1e-12:
                break
        return hi_

    p_lo = refine(grid[i0 - 1], grid[i0]) if i0 > 0 else float(grid[0])
    if i1 < len(grid) - 1:
        lo_, hi_ = float(grid[i1]), float(grid[i1 + 1])
        for _ in range(50):
            mid = 0.5 * (lo_ + hi_)
            if count(mid) >= 3:
                lo_ = mid
            else:
                hi_ = mid
            if abs(hi_ - lo_) < 1e-12:
                break
        p_hi = lo_
    else:
        p_hi = float(grid[-1])
    return p_lo, p_hi


def _cusp_system(params: ModelParams, x: float, p: float, gamma: float) -> np.ndarray:
    """(P, dP/dx, d2P/dx2) of the stationarity cubic: all zero at a triple root."""
    g1, g2, om = params.g1, params.g2, params.omega_r
    delta = params.delta()
    u = p - g2 * x
    a = g1 * x - delta
    d = u - gamma
    pv = gamma * u * (a * a + d * d) - om * om * d * d
    p1 = -gamma * g2 * (a * a + d * d) + 2.0 * gamma * u * (a * g1 - d * g2) + 2.0 * om * om * g2 * d
    p2 = -4.0 * gamma * g2 * (a * g1 - d * g2) + 2.0 * gamma * u * (g1 * g1 + g2 * g2) - 2.0 * om * om * g2 * g2
    return np.array([pv, p1, p2])


def _cusp_newton(params: ModelParams, x0: float, p0: float, gamma0: float):
    v = np.array([x0, p0, gamma0], dtype=float)
    for _ in range(100):
        f = _cusp_system(params, *v)
        jac = np.zeros((3, 3))
        for k in range(3):
            h = 1e-7 * max(1.0, abs(v[k]))
            vp, vm = v.copy(), v.copy()
            vp[k] += h
            vm[k] -= h
            jac[:, k] = (_cusp_system(params, *vp) - _cusp_system(params, *vm)) / (2.0 * h)
        try:
            step = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError:
            return None
        v = v - step
        if float(np.max(np.abs(step))) < 1e-13 * max(1.0, float(np.max(np.abs(v)))):
            return v
    return None


def locate_et(
    params: ModelParams,
    gamma_bracket: tuple[float, float],
    p_range: tuple[float, float] = (0.02, 2.2),
    gamma_tol: float = 1e-6,
) -> ETResult:
    """Endpoint of the transition: the gamma_c where the bistability window closes.

    Bisection on window existence over gamma_bracket (window must exist at
    the lower end and be gone at the upper end), then a Newton polish on
    the triple-root system P = P' = P'' = 0 started inside the final
    bracket; the polished point is returned when consistent with it.
    """
    g_lo, g_hi = gamma_bracket
    win_lo = bistable_window(params, g_lo, p_range)
    win_hi = bistable_window(params, g_hi, p_range)
    if win_lo is None or win_hi is not None:
        raise BracketInvalid(
            f"window must exist at gamma={g_lo} and not at gamma={g_hi}; "
            f"got {win_lo} and {win_hi}"
        )
    hint = (0.5 * (win_lo[0] + win_lo[1]), max(win_lo[1] - win_lo[0], 1e-9))
    last_window = win_lo
    while g_hi - g_lo > gamma_tol:
        mid = 0.5 * (g_lo + g_hi)
        win = bistable_window(params, mid, p_range, hint=hint)
        if win is not None:
            g_lo = mid
            last_window = win
            hint = (0.5 * (win[0] + win[1]), max(win[1] - win[0], 1e-9))
        else:
            g_hi = mid
    p_mid = 0.5 * (last_window[0] + last_window[1])
    x_mid = _double_root_location(_with(params, gamma_c=g_lo, p=p_mid)) or params.delta() / params.g1

    polished = _cusp_newton(params, x_mid, p_mid, 0.5 * (g_lo + g_hi))
    if polished is not None and g_lo - 1e-4 <= polished[2] <= g_hi + 1e-4 and polished[0] > 0:
        return ETResult(gamma_c=float(polished[2]), p=float(polished[1]), x=float(polished[0]), bracket=(g_lo, g_hi))
    return ETResult(gamma_c=0.5 * (g_lo + g_hi), p=p_mid, x=x_mid, bracket=(g_lo, g_hi))


# ---------------------------------------------------------------------------
# transition line and thresholds


@dataclass(frozen=True)
class TransitionLine:
    points: tuple[tuple[float, float], ...]   # chained polyline vertices
    crosses_weak_coupling: bool               # any vertex with gamma_c > omega_r


def transition_line(grid: SweepGrid, jump_tol: float = JUMP_TOL, omega_r: float = 1.0) -> TransitionLine:
    """First-order transition polyline from selected-energy jumps.

    Marks shared edges of adjacent cells (along both axes) whose selected
    energies differ by more than jump_tol, then chains the edge midpoints
    into one polyline by nearest-neighbour walking from the lowest-gamma
    point.  An empty polyline is valid.
    """
    pts: list[tuple[float, float]] = []
    n_g, n_p = len(grid.gammas), len(grid.ps)

    def sel_energy(i, j):
        c = grid.cell(i, j)
        return c.selected[0] if c.selected is not None else None

    for i in range(n_g):
        for j in range(n_p):
            e0 = sel_energy(i, j)
            if e0 is None:
                continue
            if j + 1 < n_p:
                e1 = sel_energy(i, j + 1)
                if e1 is not None and abs(e1 - e0) > jump_tol:
                    pts.append((float(grid.gammas[i]), float(0.5 * (grid.ps[j] + grid.ps[j + 1]))))
            if i + 1 < n_g:
                e1 = sel_energy(i + 1, j)
                if e1 is not None and abs(e1 - e0) > jump_tol:
                    pts.append((float(0.5 * (grid.gammas[i] + grid.gammas[i + 1])), float(grid.ps[j])))

    if not pts:
        return TransitionLine(points=(), crosses_weak_coupling=False)

    # nearest-neighbour chain, scaled by grid steps to keep it isotropic
    dg = float(grid.gammas[1] - grid.gammas[0])
    dp = float(grid.ps[1] - grid.ps[0])
    remaining = sorted(set(pts))
    chain = [remaining.pop(0)]
    while remaining:
        g0, p0 = chain[-1]
        k = min(
            range(len(remaining)),
            key=lambda m: ((remaining[m][0] - g0) / dg) ** 2 + ((remaining[m][1] - p0) / dp) ** 2,
        )
        chain.append(remaining.pop(k))
    crosses = any(g > omega_r for g, _ in chain)
    return TransitionLine(points=tuple(chain), crosses_weak_coupling=crosses)


def thresholds(
    params: ModelParams,
    gamma_c: float,
    p_range: tuple[float, float] = (0.02, 2.0),
    n_scan: int = 800,
) -> list[ThresholdEvent]:
    """Threshold p values along a constant-gamma_c cut.

    Records every p where (n_solutions, n_stable) changes, refined by
    bisection, plus the vacuum instability threshold where max Im E at
    zero density crosses zero.
    """
    at_gamma = _with(params, gamma_c=gamma_c)

    def signature(pp: float) -> tuple[int, int]:
        cell = compute_cell(_with(at_gamma, p=pp))
        return cell.n_solutions, cell.n_stable

    grid = np.linspace(p_range[0], p_range[1], n_scan)
    sigs = [signature(pp) for pp in grid]
    events: list[ThresholdEvent] = []
    for i in range(len(grid) - 1):
        if sigs[i] == sigs[i + 1]:
            continue
        lo, hi = float(grid[i]), float(grid[i + 1])
        s_lo = sigs[i]
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if signature(mid) == s_lo:
                lo = mid
            else:
                hi = mid
        kind = "solutions" if sigs[i][0] != sigs[i + 1][0] else "stable"
        events.append(ThresholdEvent(p=hi, kind=kind, before=sigs[i], after=sigs[i + 1]))

    def vac(pp: float) -> float:
        return linear_vacuum_growth(_with(at_gamma, p=pp))

    v_lo, v_hi = vac(p_range[0]), vac(p_range[1])
    if v_lo < 0 < v_hi:
        p_vac = float(brentq(vac, p_range[0], p_range[1], xtol=1e-12))
        events.append(ThresholdEvent(p=p_vac, kind="vacuum", before=(0, 0), after=(0, 0)))
    events.sort(key=lambda e: e.p)
    return events


def loop_jumps(
    params: ModelParams,
    gamma_range: tuple[float, float],
    p_range: tuple[float, float],
    n_per_edge: int = 40,
    jump_tol: float = JUMP_TOL,
) -> tuple[int, bool]:
    """Selected-energy discontinuities along a rectangular parameter loop.

    Returns (number of jumps, whether the selection returns to its start).
    Cells without a stable selection are skipped (treated as no jump).
    """
    g0, g1_ = gamma_range
    p0, p1 = p_range
    path: list[tuple[float, float]] = []
    for t in np.linspace(0, 1, n_per_edge, endpoint=False):
        path.append((g0 + (g1_ - g0) * t, p0))
    for t in np.linspace(0, 1, n_per_edge, endpoint=False):
        path.append((g1_, p0 + (p1 - p0) * t))
    for t in np.linspace(0, 1, n_per_edge, endpoint=False):
        path.append((g1_ - (g1_ - g0) * t, p1))
    for t in np.linspace(0, 1, n_per_edge, endpoint=False):
        path.append((g0, p1 - (p1 - p0) * t))
    path.append(path[0])

    energies = []
    for g, p in path:
        cell = compute_cell(_with(params, gamma_c=g, p=p))
        energies.append(cell.selected[0] if cell.selected else None)
    jumps = 0
    prev = None
    for e in energies:
        if e is not None and prev is not None and abs(e - prev) > jump_tol:
            jumps += 1
        if e is not None:
            prev = e
    first = next((e for e in energies if e is not None), None)
    last = next((e for e in reversed(energies) if e is not None), None)
    returns = first is not None and last is not None and abs(first - last) <= jump_tol
    return jumps, returns


# ---------------------------------------------------------------------------
# serialisation

GRID_CSV_HEADER = "gamma_c,p,n_solutions,n_stable,region,sel_energy,sel_x,sel_nc,sel_phase,sel_branch"


def grid_csv_lines(grid: SweepGrid):
    """Yield CSV lines (no newline) for a sweep grid, header first."""
    yield GRID_CSV_HEADER
    for cell in grid.cells:
        if cell.selected is not None:
            e, x, nc, phi, br = cell.selected
            sel = f"{float(e)!r},{float(x)!r},{float(nc)!r},{float(phi)!r},{br}"
        else:
            sel = ",,,,"
        yield (
            f"{float(cell.gamma_c)!r},{float(cell.p)!r},{cell.n_solutions},"
            f"{cell.n_stable},{cell.region},{sel}"
        )


def critical_points_json(points: CriticalPoints) -> str:
    """The critical-points document: {"ep": [g, p], "et": [g, p], ...}."""
    doc = {
        "ep": list(points.ep),
        "et": list(points.et) if points.et is not None else None,
        "r_line": {"slope": points.r_line_slope, "intercept": points.r_line_intercept},
        "transition": [list(pt) for pt in points.transition],
    }
    return json.dumps(doc, indent=2)
