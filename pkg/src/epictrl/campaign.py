"""Vaccination-campaign sizing from a closed-loop trajectory.

The instantaneous administration effort is mu*N*V(t) people per day.  Its
integral over the reporting window, divided by the target population n,
gives the average number of doses per target individual f.  The same
integral is then partitioned into daily and weekly schedules whose totals
reproduce n exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrator import Trajectory


class CampaignError(ValueError):
    """Invalid campaign sizing request."""


class NegativeTarget(CampaignError):
    """Target population came out negative."""


class ZeroTarget(CampaignError):
    """Target population is zero; doses per individual undefined."""


class ZeroEffort(CampaignError):
    """No vaccine was administered over the window; no cadence exists."""


class WindowExceedsHorizon(CampaignError):
    """Reporting window extends past the simulated horizon."""


def target_population(no_vax_r_star: float, vax_r_final: float) -> float:
    """People moved into the removed class by the campaign, over and above
    the no-vaccination endemic level."""
    if no_vax_r_star < 0.0:
        raise NegativeTarget(
            f"target_population: baseline removed level {no_vax_r_star} "
            "must be >= 0"
        )
    diff = vax_r_final - no_vax_r_star
    if diff < 0.0:
        raise NegativeTarget(
            f"target_population: campaign endpoint {vax_r_final} lies below "
            f"the baseline {no_vax_r_star}"
        )
    return diff


def _segment_integral(
    t: np.ndarray, y: np.ndarray, a: float, b: float
) -> float:
    # trapezoid over the stored piecewise-linear samples, with the segment
    # endpoints interpolated onto the grid
    inside = (t > a) & (t < b)
    knots = np.concatenate(([a], t[inside], [b]))
    vals = np.interp(knots, t, y)
    return float(np.trapezoid(vals, knots))


def effort_integral(traj: Trajectory, window: float) -> float:
    """Integral of mu*N*V over [0, window] days (people vaccinated)."""
    horizon = float(traj.t[-1])
    if window <= 0.0 or not math.isfinite(window):
        raise CampaignError(
            f"effort_integral: window = {window} must be positive"
        )
    if window > horizon * (1.0 + 1e-9):
        raise WindowExceedsHorizon(
            f"effort_integral: window = {window} exceeds the simulated "
            f"horizon {horizon}"
        )
    return _segment_integral(traj.t, traj.effort, 0.0, min(window, horizon))


@dataclass(frozen=True)
class CampaignPlan:
    """Sized campaign: total doses, doses per target individual, and the
    daily/weekly administration rates.

    daily_cadence[d] = (day index, doses per day over [d, d+1)); the weekly
    entries average over week_length days, with a shorter final week when
    the window is not a multiple.  target_exact records the trajectory-based
    target even when an explicit target_n overrode it.
    """

    target_n: float
    target_exact: float
    effort_integral: float
    f: float
    daily_cadence: tuple[tuple[int, float], ...]
    weekly_cadence: tuple[tuple[int, float], ...]
    window: float
    week_length: float


def build_plan(
    traj: Trajectory,
    no_vax_r_star: float,
    window: float,
    week_length: float = 7.0,
    target_n: float | None = None,
) -> CampaignPlan:
    """Size the campaign over [0, window].

    The target population defaults to the removed-population gain of this
    run over the no-vaccination endemic level; pass target_n to size against
    an externally specified cohort instead.
    """
    total = effort_integral(traj, window)
    r_final = float(np.interp(window, traj.t, traj.r))
    exact = target_population(no_vax_r_star, r_final)
    n = exact if target_n is None else float(target_n)
    if n < 0.0:
        raise NegativeTarget(f"build_plan: target_n = {n} must be >= 0")
    if n == 0.0:
        raise ZeroTarget(
            "build_plan: target population is zero; doses per individual "
            "is undefined"
        )
    if week_length <= 0.0:
        raise CampaignError(
            f"build_plan: week_length = {week_length} must be positive"
        )
    if total == 0.0:
        raise ZeroEffort(
            "build_plan: effort integral over the window is zero; a dose "
            "cadence cannot be derived from an unvaccinated run"
        )
    f = total / n
    daily = []
    for d in range(int(math.ceil(window - 1e-9))):
        hi = min(d + 1.0, window)
        people = _segment_integral(traj.t, traj.effort, float(d), hi) / f
        daily.append((d, people / (hi - d)))
    weekly = []
    for j in range(int(math.ceil(window / week_length - 1e-9))):
        lo = j * week_length
        hi = min((j + 1) * week_length, window)
        people = _segment_integral(traj.t, traj.effort, lo, hi) / f
        weekly.append((j, people / (hi - lo)))
    return CampaignPlan(
        target_n=n,
        target_exact=exact,
        effort_integral=total,
        f=f,
        daily_cadence=tuple(daily),
        weekly_cadence=tuple(weekly),
        window=window,
        week_length=week_length,
    )
