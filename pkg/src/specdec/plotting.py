"""Figures written next to the delimited outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import decimation as dec  # noqa: E402

FIGSIZE = (6.4, 4.0)


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def plot_spectrum(report: dec.SpectrumReport, path) -> None:
    xs = report.values()
    ks = [a.multiplicity for a in report.atoms]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.vlines(xs, 0.8, ks, color="0.3", lw=1)
    ax.plot(xs, ks, "o", ms=4)
    ax.set_yscale("log")
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("multiplicity")
    ax.set_title(f"spectrum of M_{{{report.m},{report.n}}}  (dim {report.total_count})")
    _save(fig, path)


def plot_measure(measure, path) -> None:
    xs, ws = measure.cumulative()
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.step(np.concatenate([[xs[0] - 0.02], xs]), np.concatenate([[0.0], ws]), where="post")
    ax.set_xlabel("z")
    ax.set_ylabel("cumulative weight")
    ax.set_ylim(0, 1.02)
    ax.set_title(f"eigenvalue counting measure, m={measure.m}, n={measure.n}")
    _save(fig, path)


def plot_orbit(m: int, points: np.ndarray, path) -> None:
    t = m / (m - 1)
    grid = np.linspace(0, 2 / (m - 1), 400)
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(FIGSIZE[0], 1.4 * FIGSIZE[1]), sharex=True)
    ax0.plot(grid, dec.R(m, grid), lw=1)
    ax0.axhline(t, color="0.6", lw=0.8, ls="--")
    ax0.set_ylabel("R(z)")
    ax1.hist(points, bins=200, color="0.3")
    ax1.set_xlabel("z")
    ax1.set_ylabel("backward-orbit points")
    _save(fig, path)
