"""CSV and SVG emission for trajectories, campaign plans, and sweeps.

All output is a pure function of the input data, so repeated runs of the
same scenario produce byte-identical files.  The trajectory writer
re-checks the conservation and positivity invariants row by row before
anything reaches disk.  SVG charts are self-contained (inline polylines,
fixed 960x540 viewbox, no external assets).
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .campaign import CampaignPlan
from .integrator import ConservationViolated, PositivityViolated, Trajectory

TRAJECTORY_COLUMNS = (
    "t_days,S,E,I,R,S_pct,E_pct,I_pct,R_pct,V,effort_per_day"
)


def trajectory_csv_text(
    traj: Trajectory,
    conservation_tol: float = 1e-6,
    positivity_tol: float = 1e-9,
) -> str:
    """Render the trajectory table; tolerances are relative to N."""
    n = traj.params.n_total
    cons_tol = conservation_tol * n
    pos_tol = positivity_tol * n
    rows = [TRAJECTORY_COLUMNS]
    for k in range(len(traj.t)):
        t = float(traj.t[k])
        s, e, i, r = (
            float(traj.s[k]),
            float(traj.e[k]),
            float(traj.i[k]),
            float(traj.r[k]),
        )
        drift = abs(s + e + i + r - n)
        if drift > cons_tol:
            raise ConservationViolated(
                f"trajectory_csv_text: row at t = {t}: |S+E+I+R-N| = "
                f"{drift:.6g} exceeds {cons_tol:.6g}"
            )
        if min(s, e, i, r) < -pos_tol or max(s, e, i, r) > n + pos_tol:
            raise PositivityViolated(
                f"trajectory_csv_text: row at t = {t}: component outside "
                f"[-{pos_tol:.3g}, N+{pos_tol:.3g}]"
            )
        scale = 100.0 / n
        rows.append(
            f"{t!r},{s!r},{e!r},{i!r},{r!r},"
            f"{s * scale:.6f},{e * scale:.6f},{i * scale:.6f},"
            f"{r * scale:.6f},"
            f"{float(traj.v[k])!r},{float(traj.effort[k])!r}"
        )
    return "\n".join(rows) + "\n"


def write_trajectory_csv(
    traj: Trajectory,
    path: str | Path,
    conservation_tol: float = 1e-6,
    positivity_tol: float = 1e-9,
) -> Path:
    path = Path(path)
    path.write_text(
        trajectory_csv_text(traj, conservation_tol, positivity_tol)
    )
    return path


def campaign_daily_csv_text(plan: CampaignPlan) -> str:
    rows = ["day,vaccines_per_day"]
    rows += [f"{d},{v!r}" for d, v in plan.daily_cadence]
    return "\n".join(rows) + "\n"


def campaign_weekly_csv_text(plan: CampaignPlan) -> str:
    rows = ["week,vaccines_per_day"]
    rows += [f"{j},{v!r}" for j, v in plan.weekly_cadence]
    return "\n".join(rows) + "\n"


def write_campaign_csvs(
    plan: CampaignPlan, daily_path: str | Path, weekly_path: str | Path
) -> tuple[Path, Path]:
    daily_path = Path(daily_path)
    weekly_path = Path(weekly_path)
    daily_path.write_text(campaign_daily_csv_text(plan))
    weekly_path.write_text(campaign_weekly_csv_text(plan))
    return daily_path, weekly_path


# SVG helpers ----------------------------------------------------------

_WIDTH, _HEIGHT = 960, 540
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 20, 40, 50
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _nice_ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if mult * mag >= raw:
            step = mult * mag
            break
    else:
        step = 10.0 * mag
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi * (1.0 + 1e-12):
        ticks.append(0.0 if abs(v) < step * 1e-9 else v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:g}"


def line_chart_svg(
    series: list[tuple[str, np.ndarray, np.ndarray]],
    title: str,
    x_label: str,
    y_label: str,
) -> str:
    """Self-contained SVG line chart; series = [(label, x, y), ...]."""
    x_lo = min(float(np.min(x)) for _, x, _ in series)
    x_hi = max(float(np.max(x)) for _, x, _ in series)
    y_lo = min(0.0, min(float(np.min(y)) for _, _, y in series))
    y_hi = max(float(np.max(y)) for _, _, y in series)
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    y_hi *= 1.05
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def sx(v: float) -> float:
        return _MARGIN_L + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v: float) -> float:
        return _MARGIN_T + (y_hi - v) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>',
    ]
    axis = (
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{_HEIGHT - _MARGIN_B}" stroke="black"/>'
        f'<line x1="{_MARGIN_L}" y1="{_HEIGHT - _MARGIN_B}" '
        f'x2="{_WIDTH - _MARGIN_R}" y2="{_HEIGHT - _MARGIN_B}" '
        f'stroke="black"/>'
    )
    parts.append(axis)
    for tx in _nice_ticks(x_lo, x_hi):
        px = sx(tx)
        parts.append(
            f'<line x1="{px:.2f}" y1="{_HEIGHT - _MARGIN_B}" '
            f'x2="{px:.2f}" y2="{_HEIGHT - _MARGIN_B + 5}" stroke="black"/>'
            f'<text x="{px:.2f}" y="{_HEIGHT - _MARGIN_B + 20}" '
            f'text-anchor="middle" font-family="sans-serif" '
            f'font-size="12">{_fmt(tx)}</text>'
        )
    for ty in _nice_ticks(y_lo, y_hi):
        py = sy(ty)
        parts.append(
            f'<line x1="{_MARGIN_L - 5}" y1="{py:.2f}" x2="{_MARGIN_L}" '
            f'y2="{py:.2f}" stroke="black"/>'
            f'<line x1="{_MARGIN_L}" y1="{py:.2f}" '
            f'x2="{_WIDTH - _MARGIN_R}" y2="{py:.2f}" stroke="#dddddd" '
            f'stroke-dasharray="3,4"/>'
            f'<text x="{_MARGIN_L - 8}" y="{py + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{_fmt(ty)}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_HEIGHT - 12}" '
        f'text-anchor="middle" font-family="sans-serif" '
        f'font-size="13">{x_label}</text>'
        f'<text x="18" y="{_MARGIN_T + plot_h / 2:.1f}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {_MARGIN_T + plot_h / 2:.1f})">'
        f"{y_label}</text>"
    )
    for idx, (label, xs, ys) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(
            f"{sx(float(xv)):.2f},{sy(float(yv)):.2f}"
            for xv, yv in zip(xs, ys)
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        lx = _WIDTH - _MARGIN_R - 150
        ly = _MARGIN_T + 18 + 18 * idx
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
            f'<text x="{lx + 30}" y="{ly}" font-family="sans-serif" '
            f'font-size="12">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def populations_svg_text(traj: Trajectory, name: str) -> str:
    scale = 100.0 / traj.params.n_total
    series = [
        ("S %", traj.t, traj.s * scale),
        ("E %", traj.t, traj.e * scale),
        ("I %", traj.t, traj.i * scale),
        ("R %", traj.t, traj.r * scale),
    ]
    return line_chart_svg(
        series,
        title=f"{name}: populations as % of N",
        x_label="time (days)",
        y_label="% of total population",
    )


def effort_svg_text(traj: Trajectory, name: str) -> str:
    return line_chart_svg(
        [("effort", traj.t, traj.effort)],
        title=f"{name}: vaccination effort",
        x_label="time (days)",
        y_label="people per day",
    )
