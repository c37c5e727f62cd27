"""The four figure kinds rendered from twomode CLI outputs.

Rendering is deterministic: fixed style, fixed dpi, Agg backend, no
timestamps in the image metadata; the same inputs yield byte-identical
files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, header_value, read_points, read_table

__all__ = ["FigureSpec", "render"]

STYLE = {
    "figure.figsize": (6.4, 4.8),
    "figure.dpi": 130,
    "savefig.dpi": 130,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": False,
}

STABLE_STYLE = dict(color="black", ls="solid", lw=1.4)
UNSTABLE_STYLE = dict(color="darkorange", ls="dashed", lw=1.4)
MARGINAL_STYLE = dict(color="gray", ls="dotted", lw=1.2)


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input files, figure kind, options, output path."""

    kind: str                      # heatmap | cut | spectrum | trajectory
    input: str
    out: str
    points: str | None = None     # critical-points JSON for overlays
    value: str = "sel_energy"     # heatmap colour column
    overlays: bool = True
    x_range: tuple[float, float] | None = None
    y_range: tuple[float, float] | None = None


def _save(fig, out: str) -> None:
    fig.savefig(out, metadata={"Software": None})
    plt.close(fig)


def _render_heatmap(spec: FigureSpec):
    header, cols = read_table(
        spec.input,
        ("gamma_c", "p", "n_solutions", "n_stable", "region", "sel_energy"),
    )
    if spec.value not in cols:
        raise SchemaError(f"{spec.input}: no column {spec.value!r} to map")
    gammas = np.unique(cols["gamma_c"])
    ps = np.unique(cols["p"])
    n_g, n_p = len(gammas), len(ps)
    if n_g * n_p != len(cols["gamma_c"]):
        raise SchemaError(f"{spec.input}: rows do not form a full gamma_c x p grid")
    values = np.asarray(cols[spec.value], dtype=float).reshape(n_g, n_p)

    fig, ax = plt.subplots()
    mesh = ax.pcolormesh(gammas, ps, values.T, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=spec.value)
    if spec.overlays and spec.points:
        _, doc = read_points(spec.points)
        ep = doc.get("ep")
        if ep:
            ax.plot([ep[0]], [ep[1]], marker="*", color="red", ms=14, mec="white", mew=0.5, ls="none")
        et = doc.get("et")
        if et:
            ax.plot([et[0]], [et[1]], marker="*", color="black", ms=14, mec="white", mew=0.5, ls="none")
        rl = doc.get("r_line")
        if rl and ep:
            g0 = float(gammas[0])
            g1 = min(float(ep[0]), float(gammas[-1]))  # the line terminates at the coalescence point
            if g1 > g0:
                gg = np.linspace(g0, g1, 64)
                ax.plot(gg, rl["slope"] * gg + rl["intercept"], color="white", ls="dashed", lw=1.2)
        tr = doc.get("transition") or []
        if tr:
            pts = np.asarray(tr, dtype=float)
            ax.plot(pts[:, 0], pts[:, 1], color="crimson", lw=0.8, alpha=0.9)
    ax.set_xlabel("photon decay rate")
    ax.set_ylabel("pump strength")
    ax.set_xlim(spec.x_range or (float(gammas[0]), float(gammas[-1])))
    ax.set_ylim(spec.y_range or (float(ps[0]), float(ps[-1])))
    return fig


def _verdict_style(verdict: str) -> dict:
    if verdict == "stable":
        return STABLE_STYLE
    if verdict == "unstable":
        return UNSTABLE_STYLE
    return MARGINAL_STYLE


def _render_cut(spec: FigureSpec):
    header, cols = read_table(
        spec.input, ("axis_value", "x", "energy", "branch", "verdict")
    )
    axis_name = header_value(header, "axis") or "axis_value"
    fig, ax = plt.subplots()
    verdicts = cols["verdict"]
    # stable solid black, unstable dashed orange; split runs so line styles
    # stay contiguous per stability stretch
    order = np.lexsort((cols["x"], cols["axis_value"]))
    a = cols["axis_value"][order]
    e = cols["energy"][order]
    v = verdicts[order]
    xs = cols["x"][order]
    # group points into per-branch-per-verdict scatter-lines
    for verdict in ("stable", "unstable", "marginal"):
        mask = v == verdict
        if not np.any(mask):
            continue
        style = _verdict_style(verdict)
        ax.plot(a[mask], e[mask], marker=".", ms=2.4, lw=0, color=style["color"],
                label=verdict)
    ax.set_xlabel(axis_name)
    ax.set_ylabel("energy")
    ax.legend(loc="best", fontsize=8)
    if spec.x_range:
        ax.set_xlim(spec.x_range)
    if spec.y_range:
        ax.set_ylim(spec.y_range)
    return fig


def _render_spectrum(spec: FigureSpec):
    _, cols = read_table(
        spec.input, ("x", "re_e_upper", "im_e_upper", "re_e_lower", "im_e_lower")
    )
    fig, (ax_im, ax_re) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 6.0))
    x = cols["x"]
    ax_im.plot(x, cols["im_e_upper"], color="tab:blue", label="upper")
    ax_im.plot(x, cols["im_e_lower"], color="tab:red", label="lower")
    ax_im.axhline(0.0, color="black", lw=0.6)
    ax_im.set_ylabel("Im E")
    ax_im.legend(loc="best", fontsize=8)
    ax_re.plot(x, cols["re_e_upper"], color="tab:blue")
    ax_re.plot(x, cols["re_e_lower"], color="tab:red")
    ax_re.set_xlabel("exciton density")
    ax_re.set_ylabel("Re E")
    if spec.x_range:
        ax_re.set_xlim(spec.x_range)
    return fig


def _render_trajectory(spec: FigureSpec):
    _, cols = read_table(spec.input, ("t", "nC2", "nX2"))
    fig, ax = plt.subplots()
    ax.plot(cols["t"], cols["nC2"], color="tab:blue", lw=1.0, label="|psi_c|^2")
    ax.plot(cols["t"], cols["nX2"], color="tab:red", lw=1.0, label="|psi_x|^2")
    ax.set_xlabel("time")
    ax.set_ylabel("mode occupations")
    ax.legend(loc="best", fontsize=8)
    if spec.x_range:
        ax.set_xlim(spec.x_range)
    if spec.y_range:
        ax.set_ylim(spec.y_range)
    return fig


_RENDERERS = {
    "heatmap": _render_heatmap,
    "cut": _render_cut,
    "spectrum": _render_spectrum,
    "trajectory": _render_trajectory,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure to spec.out; returns the output path."""
    if spec.kind not in _RENDERERS:
        raise SchemaError(f"unknown figure kind {spec.kind!r}")
    with plt.rc_context(STYLE):
        fig = _RENDERERS[spec.kind](spec)
        out = Path(spec.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        _save(fig, str(out))
    return out
