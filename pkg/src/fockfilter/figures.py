"""Matplotlib renderings saved next to the machine-readable reports."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .circuits import FilterResult, GhzResult, ProjectorResult
from .fock import ModeKey

_BAR_KW = {"edgecolor": "black", "linewidth": 0.6}


def save_filter_figure(result: FilterResult, path: str | Path) -> Path:
    """Herald probabilities and the photon-number weights before/after."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.2))

    labels = [",".join(str(c) for c in b.pattern.counts) for b in result.branches]
    probs = [b.probability for b in result.branches]
    ax1.bar(labels, probs, color="#4878cf", **_BAR_KW)
    ax1.set_xlabel("herald pattern")
    ax1.set_ylabel("probability")
    ax1.set_title("herald outcomes")

    inp = result.input
    before = [abs(inp.alpha) ** 2, abs(inp.beta) ** 2, abs(inp.gamma) ** 2]
    after = [0.0, 0.0, 0.0]
    out = result.corrected_output
    if out is not None:
        for n in range(3):
            after[n] = abs(out.amplitude_at({ModeKey("out"): n})) ** 2
    x = np.arange(3)
    width = 0.38
    ax2.bar(x - width / 2, before, width, label="input", color="#4878cf", **_BAR_KW)
    ax2.bar(x + width / 2, after, width, label="output", color="#d65f5f", **_BAR_KW)
    ax2.set_xticks(x)
    ax2.set_xticklabels(["0", "1", "2"])
    ax2.set_xlabel("photon number")
    ax2.set_ylabel("weight")
    ax2.set_title("one-photon term removed")
    ax2.legend(frameon=False)

    fig.tight_layout()
    out_path = Path(path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


_BASIS_LABELS = ("HH", "HV", "VH", "VV")


def save_projector_figure(result: ProjectorResult, path: str | Path) -> Path:
    """Input weights next to the surviving two-qubit weights."""
    fig, ax = plt.subplots(figsize=(5.2, 3.2))
    before = [abs(c) ** 2 for c in result.input.as_tuple()]
    after = [0.0, 0.0, 0.0, 0.0]
    out = result.output_state
    if out is not None:
        paths = out.registry.paths()
        a, b = paths[0], paths[1]
        combos = [("H", "H"), ("H", "V"), ("V", "H"), ("V", "V")]
        for i, (pa, pb) in enumerate(combos):
            amp = out.amplitude_at({ModeKey(a, pa): 1, ModeKey(b, pb): 1})
            after[i] = abs(amp) ** 2
    x = np.arange(4)
    width = 0.38
    ax.bar(x - width / 2, before, width, label="input", color="#4878cf", **_BAR_KW)
    ax.bar(x + width / 2, after, width, label="output", color="#d65f5f", **_BAR_KW)
    ax.set_xticks(x)
    ax.set_xticklabels(_BASIS_LABELS)
    ax.set_ylabel("weight")
    ax.set_title(f"parity projection (p = {result.success_probability:.4g})")
    ax.legend(frameon=False)
    fig.tight_layout()
    out_path = Path(path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def save_ghz_figure(result: GhzResult, path: str | Path) -> Path:
    """Per-step success probabilities and the cumulative decay."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.2))

    steps = np.arange(1, len(result.step_probabilities) + 1)
    ax1.bar(steps, result.step_probabilities, color="#4878cf", **_BAR_KW)
    ax1.axhline(0.125, color="black", linestyle="--", linewidth=0.8, label="1/8")
    ax1.set_xticks(steps)
    ax1.set_xlabel("growth step")
    ax1.set_ylabel("success probability")
    ax1.set_title("per-step heralding")
    ax1.legend(frameon=False)

    sizes = np.arange(2, result.n + 1)
    cumulative = np.cumprod(result.step_probabilities)
    ax2.semilogy(sizes, cumulative, "o-", color="#d65f5f", label="simulated")
    ax2.semilogy(sizes, 8.0 ** -(sizes - 1), "k--", linewidth=0.8, label=r"$8^{-(n-1)}$")
    ax2.set_xticks(sizes)
    ax2.set_xlabel("photons in the state")
    ax2.set_ylabel("cumulative probability")
    ax2.set_title("chained growth")
    ax2.legend(frameon=False)

    fig.tight_layout()
    out_path = Path(path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def save_sweep_figure(
    axes: Sequence[str],
    shape: Sequence[int],
    values: Sequence[Sequence[float]],
    success: Sequence[float],
    path: str | Path,
) -> Path | None:
    """Success probability over a 1-d or 2-d parameter grid.

    ``values[k]`` holds the grid values of axis ``axes[k]``; ``success``
    is row-major over the cartesian product.  Higher-dimensional sweeps
    get no figure.
    """
    out_path = Path(path)
    if len(axes) == 1:
        fig, ax = plt.subplots(figsize=(5.2, 3.2))
        ax.plot(values[0], success, "o-", color="#4878cf")
        ax.set_xlabel(axes[0])
        ax.set_ylabel("success probability")
        ax.set_title("herald success across the grid")
        fig.tight_layout()
        fig.savefig(out_path, dpi=150)
        plt.close(fig)
        return out_path
    if len(axes) == 2:
        grid = np.asarray(success, dtype=float).reshape(tuple(shape))
        fig, ax = plt.subplots(figsize=(5.4, 3.6))
        mesh = ax.pcolormesh(values[1], values[0], grid, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="success probability")
        ax.set_xlabel(axes[1])
        ax.set_ylabel(axes[0])
        ax.set_title("herald success across the grid")
        fig.tight_layout()
        fig.savefig(out_path, dpi=150)
        plt.close(fig)
        return out_path
    return None
