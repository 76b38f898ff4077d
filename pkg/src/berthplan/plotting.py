"""Static vector-graphics rendering of berthing plans and study reports.

One figure per plan: the trajectory over the port basin, forward speed
against the distance-dependent corridor, state histories, and control
histories.  Figures are written straight to file (SVG by default) — there
is no interactive display path.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .constraints import speed_limits  # noqa: E402
from .transcription import OcpSpec, simulate_plan  # noqa: E402

__all__ = ["plot_plan", "plot_study"]

PRIMARY = "tab:blue"
COMPARE = "tab:red"


def _berth_distance(spec: OcpSpec, states: np.ndarray) -> np.ndarray:
    b = spec.berth_point
    return np.hypot(states[..., 0] - b[0], states[..., 1] - b[1])


def _draw_map(ax, spec: OcpSpec, x, color, label, footprints=True):
    tf, knots, _ = spec.layout.unpack(np.asarray(x, dtype=float))
    _, states, _, _ = simulate_plan(spec, x)
    ax.plot(states[:, 1], states[:, 0], color=color, lw=1.4, label=label)
    if footprints:
        stride = max(1, (knots.shape[0] - 1) // 10)
        outline = spec.domain.vertices(knots[::stride])
        for ring in outline:
            ring = np.vstack([ring, ring[:1]])
            ax.plot(ring[:, 1], ring[:, 0], color=color, lw=0.5, alpha=0.45)
    ax.plot(knots[0, 1], knots[0, 0], "o", color=color, ms=5)


def _draw_speed(ax, spec: OcpSpec, x, color, label):
    _, states, _, _ = simulate_plan(spec, x)
    d = _berth_distance(spec, states)
    ax.plot(d, states[:, 3], color=color, lw=1.4, label=label)
    _, knots, _ = spec.layout.unpack(np.asarray(x, dtype=float))
    dk = _berth_distance(spec, knots)
    ax.plot(dk, knots[:, 3], ".", color=color, ms=4)


def plot_plan(spec: OcpSpec, x, out_path, title: str | None = None,
              compare=None, labels=("with speed limits", "without")) -> Path:
    """Render one plan (optionally against a comparison plan) to a file.

    ``x`` is a solved decision vector for ``spec``; ``compare`` an optional
    second vector (typically the same scenario solved without the speed
    corridor) drawn in a contrasting color on the map and speed panels.
    Returns the written path.
    """
    out_path = Path(out_path)
    fig = plt.figure(figsize=(11.5, 7.0))
    grid = fig.add_gridspec(3, 2, width_ratios=(1.15, 1.0),
                            hspace=0.42, wspace=0.26)
    ax_map = fig.add_subplot(grid[:, 0])
    ax_speed = fig.add_subplot(grid[0, 1])
    ax_states = fig.add_subplot(grid[1, 1])
    ax_ctrl = fig.add_subplot(grid[2, 1])

    ring = spec.basin.vertices
    ax_map.fill(ring[:, 1], ring[:, 0], color="#d8e9f5", zorder=0)
    ax_map.plot(ring[:, 1], ring[:, 0], color="#3a3a3a", lw=1.2)
    ax_map.plot(spec.berth_point[1], spec.berth_point[0], "k*", ms=11,
                label="berth")
    _draw_map(ax_map, spec, x, PRIMARY, labels[0])
    if compare is not None:
        _draw_map(ax_map, spec, compare, COMPARE, labels[1],
                  footprints=False)
    ax_map.set_xlabel("y [m]")
    ax_map.set_ylabel("x [m]")
    ax_map.set_aspect("equal", adjustable="datalim")
    ax_map.legend(loc="best", fontsize=8)
    ax_map.set_title("trajectory over port")

    d_max = float(_berth_distance(spec, spec.x0.as_array()[None])[0])
    d_grid = np.linspace(0.0, 1.05 * d_max, 300)
    u_lo, u_hi = speed_limits(d_grid, spec.ship, spec.coefficients)
    ax_speed.fill_between(d_grid, u_lo, u_hi, color="#cde6cd", zorder=0,
                          label="speed corridor")
    ax_speed.plot(d_grid, u_lo, color="#3f7a3f", lw=0.8)
    ax_speed.plot(d_grid, u_hi, color="#3f7a3f", lw=0.8)
    _draw_speed(ax_speed, spec, x, PRIMARY, labels[0])
    if compare is not None:
        _draw_speed(ax_speed, spec, compare, COMPARE, labels[1])
    ax_speed.set_xlabel("distance to berth [m]")
    ax_speed.set_ylabel("u [m/s]")
    ax_speed.legend(loc="best", fontsize=8)
    ax_speed.set_title("forward speed vs corridor")

    times, states, commanded, actual = simulate_plan(spec, x)
    ax_states.plot(times, states[:, 3], color=PRIMARY, lw=1.2, label="u")
    ax_states.plot(times, states[:, 4], color="tab:orange", lw=1.2,
                   label="v")
    ax_states.plot(times, np.rad2deg(states[:, 5]), color="tab:green",
                   lw=1.2, label="r [deg/s]")
    ax_states.set_xlabel("t [s]")
    ax_states.set_ylabel("speed [m/s]")
    ax_states.legend(loc="best", fontsize=8, ncols=3)
    ax_states.set_title("velocities")

    ax_ctrl.plot(times, np.rad2deg(actual[:, 0]), color=PRIMARY, lw=1.2,
                 label="port rudder [deg]")
    ax_ctrl.plot(times, np.rad2deg(actual[:, 1]), color="tab:orange",
                 lw=1.2, label="stbd rudder [deg]")
    ax_ctrl.plot(times, np.rad2deg(commanded[:, 0]), color=PRIMARY,
                 lw=0.7, ls="--", alpha=0.6)
    ax_ctrl.plot(times, np.rad2deg(commanded[:, 1]), color="tab:orange",
                 lw=0.7, ls="--", alpha=0.6)
    ax_np = ax_ctrl.twinx()
    ax_np.plot(times, actual[:, 2], color="tab:green", lw=1.2,
               label="propeller [1/s]")
    ax_np.plot(times, actual[:, 3], color="tab:purple", lw=1.2,
               label="thruster [1/s]")
    ax_np.set_ylabel("revolutions [1/s]")
    ax_ctrl.set_xlabel("t [s]")
    ax_ctrl.set_ylabel("rudder [deg]")
    h1, l1 = ax_ctrl.get_legend_handles_labels()
    h2, l2 = ax_np.get_legend_handles_labels()
    ax_ctrl.legend(h1 + h2, l1 + l2, loc="best", fontsize=7, ncols=2)
    ax_ctrl.set_title("controls (solid actual, dashed commanded)")

    if title:
        fig.suptitle(title)
    fig.savefig(out_path, bbox_inches="tight")
    plt.close(fig)
    return out_path


def plot_study(report, out_path, distances=None, wall_times=None) -> Path:
    """Render a feasibility report: per-attempt success and timing.

    ``distances``/``wall_times`` are optional per-case overrides; by
    default they come from the report's records.
    """
    out_path = Path(out_path)
    fig, (ax_bar, ax_time) = plt.subplots(1, 2, figsize=(9.5, 4.0))

    rates = report.attempt_rates()
    ax_bar.bar(range(len(rates)), [100.0 * r for r in rates],
               color=PRIMARY)
    ax_bar.set_xlabel("attempts allowed")
    ax_bar.set_ylabel("feasible cases [%]")
    ax_bar.set_ylim(0.0, 105.0)
    ax_bar.set_xticks(range(len(rates)))
    ax_bar.set_title(f"cumulative feasibility ({report.n_cases} cases)")

    if distances is None:
        distances = [float(np.hypot(rec.case.start.x0, rec.case.start.y0))
                     for rec in report.records]
    if wall_times is None:
        wall_times = [rec.wall_time for rec in report.records]
    feasible = [rec.feasible_attempt is not None for rec in report.records]
    for d, t, ok in zip(distances, wall_times, feasible):
        ax_time.plot(d, t, "o" if ok else "x",
                     color=PRIMARY if ok else COMPARE, ms=6)
    ax_time.set_xlabel("initial berth distance [m]")
    ax_time.set_ylabel("compute time [s]")
    ax_time.set_title("compute time vs start distance")

    fig.tight_layout()
    fig.savefig(out_path, bbox_inches="tight")
    plt.close(fig)
    return out_path
