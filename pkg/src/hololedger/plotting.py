"""Static SVG figures for the command-line experiments.

Figures are built through matplotlib's object API (no pyplot state), with a
fixed SVG hash salt and no date stamp so reruns produce identical files.
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from numpy.typing import NDArray

from .euclidean import EuclideanParams, heat_kernel
from .holotn import CutScaling
from .measurement import RecordKind, RegimeLedger
from .qstate import WaveFunction

_SVG_RC = {"svg.hashsalt": "hololedger"}
_LORENTZIAN_Y, _EUCLIDEAN_Y = 1.0, 0.0
_KIND_COLORS = {
    RecordKind.UNITARY: "tab:blue",
    RecordKind.POST_NONSELECTIVE: "tab:red",
    RecordKind.POST_READ: "tab:green",
    RecordKind.EUCLIDEAN_DUAL: "tab:purple",
}


def _save(fig: Figure, path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(target, format="svg", metadata={"Date": None})
    return target


def plot_snapshots(
    states: Sequence[WaveFunction], times: Sequence[float], path: str | Path
) -> Path:
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot()
    for psi, t in zip(states, times):
        ax.plot(psi.grid.x, psi.probability_density(), label=f"t = {t:g}")
    ax.set_xlabel("x")
    ax.set_ylabel("|ψ|²")
    ax.set_title("Free evolution")
    ax.legend(loc="upper right", fontsize="small")
    return _save(fig, path)


def plot_endpoint_histogram(
    endpoints: NDArray[np.float64],
    duration: float,
    params: EuclideanParams,
    path: str | Path,
    bins: int = 50,
) -> Path:
    """Endpoint histogram of the sampled paths against K_E(x, x_start; τ)."""
    fig = Figure(figsize=(7, 4))
    ax = fig.add_subplot()
    ax.hist(endpoints, bins=bins, density=True, alpha=0.6, label="sampled endpoints")
    lo, hi = float(endpoints.min()), float(endpoints.max())
    xs = np.linspace(lo, hi, 400)
    ax.plot(
        xs,
        heat_kernel(xs, params.x_start, duration, params.m, params.hbar),
        color="black",
        label="heat kernel",
    )
    ax.set_xlabel("x(τ)")
    ax.set_ylabel("density")
    ax.legend(loc="upper right", fontsize="small")
    return _save(fig, path)


def plot_ledger_timeline(ledger: RegimeLedger, path: str | Path) -> Path:
    """Two rows: Lorentzian records on top, their Euclidean duals below."""
    fig = Figure(figsize=(8, 3))
    ax = fig.add_subplot()
    for start, end in ledger.windows():
        ax.axvspan(start, end, color="0.85", zorder=0)
    lorentzian_spans: dict[int, tuple[float, float]] = {}
    for index, record in enumerate(ledger.records):
        color = _KIND_COLORS[record.kind]
        if record.kind is RecordKind.EUCLIDEAN_DUAL:
            assert record.dual_of is not None
            start, end = lorentzian_spans[record.dual_of]
            mid = 0.5 * (start + end)
            ax.plot([start, end], [_EUCLIDEAN_Y, _EUCLIDEAN_Y], color=color, linewidth=6)
            ax.annotate(
                "",
                xy=(mid, _EUCLIDEAN_Y + 0.1),
                xytext=(mid, _LORENTZIAN_Y - 0.1),
                arrowprops={"arrowstyle": "->", "color": color},
            )
            ax.text(mid, _EUCLIDEAN_Y - 0.25, f"I={record.I:.0f}", ha="center", fontsize=7)
            continue
        start, end = record.span
        lorentzian_spans[index] = (start, end)
        ax.plot([start, end], [_LORENTZIAN_Y, _LORENTZIAN_Y], color=color, linewidth=6)
        ax.text(
            0.5 * (start + end),
            _LORENTZIAN_Y + 0.15,
            f"S={record.S_vN:.2g}, I={record.I:.2g}",
            ha="center",
            fontsize=7,
        )
    ax.set_yticks([_EUCLIDEAN_Y, _LORENTZIAN_Y], labels=["Euclidean", "Lorentzian"])
    ax.set_ylim(-0.6, 1.6)
    ax.set_xlabel("t")
    return _save(fig, path)


def plot_cut_scaling(scaling: CutScaling, path: str | Path) -> Path:
    logs = np.log2(np.asarray(scaling.lengths, dtype=np.float64))
    fig = Figure(figsize=(5, 4))
    ax = fig.add_subplot()
    ax.plot(logs, scaling.cuts, "o", label="minimal cut")
    ax.plot(
        logs,
        scaling.slope * logs + scaling.intercept,
        "-",
        label=f"fit, R² = {scaling.r_squared:.4f}",
    )
    ax.set_xlabel("log2 ℓ")
    ax.set_ylabel("cut (bonds)")
    ax.legend(loc="upper left", fontsize="small")
    return _save(fig, path)
