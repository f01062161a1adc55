"""Fixed-step RK4 integration of the closed-loop epidemic model.

The vaccination signal is state feedback, so it is recomputed at every RK
stage rather than held over the step.  Law-2 runs watch for the susceptible
population crossing zero; the crossing time t_s is located by bisection on
re-integrated sub-steps, the state is pinned to S = 0 there, and the run
continues under the post-switch law.  Every accepted step is checked against
the conservation and positivity invariants, and integration aborts on the
first violation, naming it and its time.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .control import (
    LAW1,
    LAW2,
    LAW_NONE,
    ControlLaw,
    GainTooNegative,
    NonPositiveGain,
    applied_v,
    law1_min_gain,
)
from .model import ModelParams, MuZero, State, validate_params


class IntegrationError(RuntimeError):
    """A trajectory invariant failed during integration."""


class ConservationViolated(IntegrationError):
    """|S+E+I+R - N| exceeded the conservation tolerance."""


class PositivityViolated(IntegrationError):
    """A component left [-tol, N+tol]."""


class NonFiniteState(IntegrationError):
    """The state became NaN or infinite (blow-up)."""


class NoSignChange(IntegrationError):
    """Switch-detection bracket does not straddle a zero of S."""


@dataclass(frozen=True)
class IntegrationConfig:
    """Step size and horizon in days, recording stride in steps, switch
    bisection tolerance in days, and the invariant tolerances relative
    to N."""

    step: float = 0.01
    horizon: float = 50.0
    record_stride: int = 10
    switch_tol: float = 1e-6
    positivity_tol: float = 1e-9
    conservation_tol: float = 1e-6


def validate_config(cfg: IntegrationConfig) -> IntegrationConfig:
    if not (cfg.step > 0.0 and math.isfinite(cfg.step)):
        raise ValueError(f"integrate: step = {cfg.step} must be > 0")
    if not (cfg.horizon >= cfg.step):
        raise ValueError(
            f"integrate: horizon = {cfg.horizon} must be >= step = {cfg.step}"
        )
    if not (0.0 < cfg.switch_tol < cfg.step):
        raise ValueError(
            f"integrate: switch_tol = {cfg.switch_tol} must lie in (0, step)"
        )
    if cfg.record_stride < 1:
        raise ValueError(
            f"integrate: record_stride = {cfg.record_stride} must be >= 1"
        )
    if cfg.positivity_tol < 0.0 or cfg.conservation_tol < 0.0:
        raise ValueError("integrate: invariant tolerances must be >= 0")
    return cfg


@dataclass(frozen=True)
class SwitchEvent:
    """Time at which the susceptible population reached zero under law 2,
    and the (pinned) state there."""

    t: float
    state: State


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of a closed-loop run.

    Arrays are aligned: t[k] holds the sample time, v[k] the applied
    vaccination signal recomputed at the sample state, effort[k] = mu*N*v[k]
    people per day.  v_min/v_max monitor the signal range across samples
    (V outside [0, 1] is a diagnostic, not an error).
    """

    t: np.ndarray
    s: np.ndarray
    e: np.ndarray
    i: np.ndarray
    r: np.ndarray
    v: np.ndarray
    effort: np.ndarray
    params: ModelParams
    law: ControlLaw
    switch_event: SwitchEvent | None
    v_min: float
    v_max: float

    def state(self, k: int) -> State:
        return State(
            s=float(self.s[k]),
            e=float(self.e[k]),
            i=float(self.i[k]),
            r=float(self.r[k]),
            t=float(self.t[k]),
        )

    @property
    def final(self) -> State:
        return self.state(len(self.t) - 1)


def _make_field(p: ModelParams, law: ControlLaw, switched: bool):
    """Closed-loop vector field as a float-tuple closure.

    Must agree with model.derivative at the applied_v signal; the test suite
    cross-checks the two.
    """
    mu, om, be, sg, ga, n = p.mu, p.omega, p.beta, p.sigma, p.gamma, p.n_total
    mun = mu * n
    binv = be / n
    clamp = law.clamp_v
    kind = law.kind

    if kind == LAW_NONE:

        def field(s, e, i, r):
            inf = binv * s * i
            return (
                -mu * s + om * r - inf + mun,
                inf - (mu + sg) * e,
                -(mu + ga) * i + sg * e,
                -(mu + om) * r + ga * i,
            )

        return field

    if kind == LAW2 and switched:

        def field(s, e, i, r):
            v = 1.0 + om * r / mun
            if clamp:
                v = min(1.0, max(0.0, v))
            return (
                0.0,
                -(mu + sg) * e,
                -(mu + ga) * i + sg * e,
                -(mu + om) * r + ga * i + mun * v,
            )

        return field

    if kind == LAW1:
        g = law.g

        def field(s, e, i, r):
            v = (om * r + (g - binv * i) * s) / mun + 1.0
            if clamp:
                v = min(1.0, max(0.0, v))
            driven = mun * v
            inf = binv * s * i
            return (
                -mu * s + om * r - inf + mun - driven,
                inf - (mu + sg) * e,
                -(mu + ga) * i + sg * e,
                -(mu + om) * r + ga * i + driven,
            )

        return field

    if kind == LAW2:
        g, g1 = law.g, law.g1

        def field(s, e, i, r):
            v = (g1 * n - g * r - ga * i) / mun
            if clamp:
                v = min(1.0, max(0.0, v))
            driven = mun * v
            inf = binv * s * i
            return (
                -mu * s + om * r - inf + mun - driven,
                inf - (mu + sg) * e,
                -(mu + ga) * i + sg * e,
                -(mu + om) * r + ga * i + driven,
            )

        return field

    raise ValueError(f"integrate: unknown control law kind {law.kind!r}")


def _rk4(field, s, e, i, r, h):
    ds1, de1, di1, dr1 = field(s, e, i, r)
    h2 = 0.5 * h
    ds2, de2, di2, dr2 = field(
        s + h2 * ds1, e + h2 * de1, i + h2 * di1, r + h2 * dr1
    )
    ds3, de3, di3, dr3 = field(
        s + h2 * ds2, e + h2 * de2, i + h2 * di2, r + h2 * dr2
    )
    ds4, de4, di4, dr4 = field(
        s + h * ds3, e + h * de3, i + h * di3, r + h * dr3
    )
    h6 = h / 6.0
    return (
        s + h6 * (ds1 + 2.0 * (ds2 + ds3) + ds4),
        e + h6 * (de1 + 2.0 * (de2 + de3) + de4),
        i + h6 * (di1 + 2.0 * (di2 + di3) + di4),
        r + h6 * (dr1 + 2.0 * (dr2 + dr3) + dr4),
    )


def _validate_law(p: ModelParams, law: ControlLaw, x0: State) -> None:
    if law.kind == LAW_NONE:
        return
    if law.kind not in (LAW1, LAW2):
        raise ValueError(f"integrate: unknown control law kind {law.kind!r}")
    if p.mu * p.n_total <= 0.0:
        raise MuZero("integrate: feedback laws divide by mu*N; mu must be > 0")
    if law.kind == LAW1:
        if not (law.g > 0.0):
            raise NonPositiveGain(f"integrate: law1 g = {law.g} must be > 0")
        bound = law1_min_gain(p, x0.s, law.k0)
        if law.g <= bound:
            warnings.warn(
                f"law1 gain g = {law.g} is below the sufficient bound "
                f"{bound:.6g}; convergence is not certified (simulation "
                "proceeds)",
                stacklevel=3,
            )
    else:
        if not (law.g > -(p.mu + p.omega)):
            raise GainTooNegative(
                f"integrate: law2 g = {law.g} must exceed "
                f"-(mu+omega) = {-(p.mu + p.omega)}"
            )
        matched = p.mu + p.omega + law.g
        if law.g1 < matched * (1.0 - 1e-9):
            warnings.warn(
                f"law2 g1 = {law.g1} is below mu+omega+g = {matched:.6g}; "
                "the removed population converges below N",
                stacklevel=3,
            )


def detect_switch(
    p: ModelParams,
    law: ControlLaw,
    t_lo: float,
    state_lo: State,
    t_hi: float,
    cfg: IntegrationConfig,
) -> float:
    """Locate the law-2 susceptible zero crossing inside (t_lo, t_hi].

    state_lo is the integrated state at t_lo with S(t_lo) > 0; the crossing
    is bracketed by re-integrating single RK4 sub-steps of varying length
    from that state under the pre-switch dynamics, and bisected until the
    bracket is narrower than switch_tol.
    """
    field = _make_field(p, law, switched=False)
    if not (state_lo.s > 0.0):
        raise NoSignChange(
            f"detect_switch: S = {state_lo.s} at bracket start t = {t_lo} "
            "must be positive"
        )
    width = t_hi - t_lo
    if width <= 0.0:
        raise NoSignChange(
            f"detect_switch: empty bracket [{t_lo}, {t_hi}]"
        )
    s0, e0, i0, r0 = state_lo.s, state_lo.e, state_lo.i, state_lo.r

    def s_after(dt: float) -> float:
        return _rk4(field, s0, e0, i0, r0, dt)[0]

    if s_after(width) > 0.0:
        raise NoSignChange(
            f"detect_switch: S stays positive across [{t_lo}, {t_hi}]"
        )
    lo, hi = 0.0, width
    while hi - lo > cfg.switch_tol:
        mid = 0.5 * (lo + hi)
        if s_after(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return t_lo + 0.5 * (lo + hi)


def integrate(
    p: ModelParams, x0: State, law: ControlLaw, cfg: IntegrationConfig
) -> Trajectory:
    """Run the closed loop from x0 over [0, horizon].

    Returns the sampled trajectory (every record_stride-th step plus the
    initial and final states).  Aborts with ConservationViolated,
    PositivityViolated, or NonFiniteState naming the first broken invariant
    and its time.
    """
    validate_params(p)
    validate_config(cfg)
    _validate_law(p, law, x0)
    n = p.n_total
    pos_tol = cfg.positivity_tol * n
    cons_tol = cfg.conservation_tol * n

    def check(s, e, i, r, t):
        if not (
            math.isfinite(s)
            and math.isfinite(e)
            and math.isfinite(i)
            and math.isfinite(r)
        ):
            raise NonFiniteState(
                f"integrate: non-finite state ({s}, {e}, {i}, {r}) "
                f"at t = {t:.6f}"
            )
        low = min(s, e, i, r)
        high = max(s, e, i, r)
        if low < -pos_tol or high > n + pos_tol:
            name = "SEIR"[np.argmin([s, e, i, r]) if low < -pos_tol
                          else np.argmax([s, e, i, r])]
            raise PositivityViolated(
                f"integrate: component {name} = "
                f"{low if low < -pos_tol else high} outside "
                f"[-{pos_tol:.3g}, N+{pos_tol:.3g}] at t = {t:.6f}"
            )
        drift = abs(s + e + i + r - n)
        if drift > cons_tol:
            raise ConservationViolated(
                f"integrate: |S+E+I+R-N| = {drift:.6g} exceeds "
                f"{cons_tol:.6g} at t = {t:.6f}"
            )

    s, e, i, r = x0.s, x0.e, x0.i, x0.r
    check(s, e, i, r, 0.0)
    if min(s, e, i, r) < 0.0:
        raise PositivityViolated(
            "integrate: initial state must be componentwise nonnegative"
        )

    switched = False
    switch_event: SwitchEvent | None = None
    if law.kind == LAW2 and s <= 0.0:
        s = 0.0
        switched = True
        switch_event = SwitchEvent(t=0.0, state=State(s, e, i, r, 0.0))

    field = _make_field(p, law, switched)
    post_field = _make_field(p, law, True) if law.kind == LAW2 else None

    ratio = cfg.horizon / cfg.step
    n_full = int(math.floor(ratio + 1e-9))
    remainder = cfg.horizon - n_full * cfg.step
    if remainder <= cfg.step * 1e-9:
        remainder = 0.0
    total_steps = n_full + (1 if remainder > 0.0 else 0)

    ts, ss, es, is_, rs = [0.0], [s], [e], [i], [r]

    for k in range(total_steps):
        if k < n_full:
            t0 = k * cfg.step
            h = cfg.step
            t1 = (k + 1) * cfg.step
        else:
            t0 = n_full * cfg.step
            h = remainder
            t1 = cfg.horizon
        if law.kind == LAW2 and not switched:
            s1, e1, i1, r1 = _rk4(field, s, e, i, r, h)
            if s1 <= 0.0:
                t_s = detect_switch(
                    p, law, t0, State(s, e, i, r, t0), t1, cfg
                )
                dt_pre = t_s - t0
                if dt_pre > 0.0:
                    s, e, i, r = _rk4(field, s, e, i, r, dt_pre)
                s = 0.0
                switched = True
                switch_event = SwitchEvent(t=t_s, state=State(s, e, i, r, t_s))
                field = post_field
                dt_post = t1 - t_s
                if dt_post > 0.0:
                    s, e, i, r = _rk4(field, s, e, i, r, dt_post)
                    s = 0.0
            else:
                s, e, i, r = s1, e1, i1, r1
        else:
            s, e, i, r = _rk4(field, s, e, i, r, h)
            if switched:
                s = 0.0
        check(s, e, i, r, t1)
        if (k + 1) % cfg.record_stride == 0 or k == total_steps - 1:
            ts.append(t1)
            ss.append(s)
            es.append(e)
            is_.append(i)
            rs.append(r)

    t_arr = np.asarray(ts)
    s_arr = np.asarray(ss)
    e_arr = np.asarray(es)
    i_arr = np.asarray(is_)
    r_arr = np.asarray(rs)
    v_list = []
    t_switch = switch_event.t if switch_event is not None else math.inf
    for k in range(len(t_arr)):
        state_k = State(
            float(s_arr[k]), float(e_arr[k]), float(i_arr[k]),
            float(r_arr[k]), float(t_arr[k]),
        )
        v_list.append(
            applied_v(p, law, state_k, switched=t_arr[k] >= t_switch)
        )
    v_arr = np.asarray(v_list)
    effort_arr = p.mu * n * v_arr
    return Trajectory(
        t=t_arr,
        s=s_arr,
        e=e_arr,
        i=i_arr,
        r=r_arr,
        v=v_arr,
        effort=effort_arr,
        params=p,
        law=law,
        switch_event=switch_event,
        v_min=float(v_arr.min()),
        v_max=float(v_arr.max()),
    )


def integrate_reduced(
    p: ModelParams, x0: State, cfg: IntegrationConfig
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """RK4 on the three-state reduced system (vaccination off), for
    cross-validation against the full integrator.  Returns (t, S, I, R)
    sampled like integrate()."""
    validate_params(p)
    validate_config(cfg)
    mu, om, be, sg, ga, n = p.mu, p.omega, p.beta, p.sigma, p.gamma, p.n_total
    binv = be / n
    mun = mu * n

    def field(s, i, r):
        return (
            -mu * s + om * r - binv * s * i + mun,
            -(mu + ga + sg) * i + sg * (n - s - r),
            -(mu + om) * r + ga * i,
        )

    s, i, r = x0.s, x0.i, x0.r
    ratio = cfg.horizon / cfg.step
    n_full = int(math.floor(ratio + 1e-9))
    remainder = cfg.horizon - n_full * cfg.step
    if remainder <= cfg.step * 1e-9:
        remainder = 0.0
    total_steps = n_full + (1 if remainder > 0.0 else 0)
    ts, ss, is_, rs = [0.0], [s], [i], [r]
    for k in range(total_steps):
        h = cfg.step if k < n_full else remainder
        t1 = (k + 1) * cfg.step if k < n_full else cfg.horizon
        ds1, di1, dr1 = field(s, i, r)
        h2 = 0.5 * h
        ds2, di2, dr2 = field(s + h2 * ds1, i + h2 * di1, r + h2 * dr1)
        ds3, di3, dr3 = field(s + h2 * ds2, i + h2 * di2, r + h2 * dr2)
        ds4, di4, dr4 = field(s + h * ds3, i + h * di3, r + h * dr3)
        h6 = h / 6.0
        s = s + h6 * (ds1 + 2.0 * (ds2 + ds3) + ds4)
        i = i + h6 * (di1 + 2.0 * (di2 + di3) + di4)
        r = r + h6 * (dr1 + 2.0 * (dr2 + dr3) + dr4)
        if (k + 1) % cfg.record_stride == 0 or k == total_steps - 1:
            ts.append(t1)
            ss.append(s)
            is_.append(i)
            rs.append(r)
    return np.asarray(ts), np.asarray(ss), np.asarray(is_), np.asarray(rs)
