"""Feedback vaccination laws and their analytic guarantees.

Law 1 cancels the infection pressure on the susceptible compartment and adds
a proportional drain, so the closed loop obeys S' = -(mu+g)S exactly and the
whole population is asymptotically removed by immunity.  Law 2 regulates the
removed compartment toward g1*N/(mu+omega+g); if the susceptible population
hits zero at some time t_s, the law switches to a maintenance form that keeps
S at zero while E and I decay along known exponentials.

Alongside the laws live their gain conditions, nonnegativity certificates for
the law-2 signal, asymptotic predictions, and exponential envelopes for E and
I under law 1.  The envelopes are upper bounds used as test oracles; they are
built from divided differences of a -> exp(-(mu+a) t), with confluent limits
when gains or rates coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ModelParams, MuZero, State, validate_params


class ControlError(ValueError):
    """Invalid control-law configuration."""


class NonPositiveGain(ControlError):
    """Law-1 gain must be strictly positive."""


class GainTooNegative(ControlError):
    """Law-2 gain must exceed -(mu+omega)."""


LAW_NONE = "none"
LAW1 = "law1"
LAW2 = "law2"


@dataclass(frozen=True)
class ControlLaw:
    """Vaccination law selection and gains.

    kind "none" runs the open loop (V = 0).  g is the feedback gain of both
    laws; g1 is the law-2 reference gain; k0 >= 1 enters the law-1 gain
    condition.  clamp_v restricts the applied signal to [0, 1] for
    exploratory runs; it changes the closed-loop dynamics and breaks the
    closed-form oracles, so it defaults to off.
    """

    kind: str = LAW_NONE
    g: float = 0.0
    g1: float = 0.0
    k0: float = 1.0
    clamp_v: bool = False


def no_vaccination() -> ControlLaw:
    return ControlLaw(kind=LAW_NONE)


def law1(g: float, k0: float = 1.0, clamp_v: bool = False) -> ControlLaw:
    """Build a validated law-1 selection (g > 0, k0 >= 1)."""
    if not (g > 0.0):
        raise NonPositiveGain(f"law1: g = {g} must be > 0")
    if not (k0 >= 1.0):
        raise ControlError(f"law1: k0 = {k0} must be >= 1")
    return ControlLaw(kind=LAW1, g=g, k0=k0, clamp_v=clamp_v)


def law2(
    p: ModelParams, g: float, g1: float, clamp_v: bool = False
) -> ControlLaw:
    """Build a validated law-2 selection.

    Requires g > -(mu+omega) so the closed-loop removed dynamics are stable.
    The paired condition g1 >= mu+omega+g (which makes R converge to N)
    is advisory: published gain choices round it to fewer digits than
    equality needs, so a violation is left to the caller to interpret.
    """
    validate_params(p)
    if not (g > -(p.mu + p.omega)):
        raise GainTooNegative(
            f"law2: g = {g} must exceed -(mu+omega) = {-(p.mu + p.omega)}"
        )
    return ControlLaw(kind=LAW2, g=g, g1=g1, clamp_v=clamp_v)


def law1_v(p: ModelParams, g: float, x: State) -> float:
    """Law-1 vaccination signal V = [omega*R + (g - beta*I/N)*S + mu*N]/(mu*N)."""
    if p.mu * p.n_total <= 0.0:
        raise MuZero("law1_v divides by mu*N; mu must be > 0")
    return (
        p.omega * x.r + (g - p.beta * x.i / p.n_total) * x.s
    ) / (p.mu * p.n_total) + 1.0


def law2_v(
    p: ModelParams, g: float, g1: float, x: State, switched: bool
) -> float:
    """Law-2 vaccination signal.

    Before the switch: V = (g1*N - g*R - gamma*I)/(mu*N).
    From the switch on: V = (mu*N + omega*R)/(mu*N), which holds S at zero.
    """
    if p.mu * p.n_total <= 0.0:
        raise MuZero("law2_v divides by mu*N; mu must be > 0")
    if switched:
        return 1.0 + p.omega * x.r / (p.mu * p.n_total)
    return (g1 * p.n_total - g * x.r - p.gamma * x.i) / (p.mu * p.n_total)


def applied_v(p: ModelParams, law: ControlLaw, x: State, switched: bool) -> float:
    """Signal the integrator applies at a state, including the optional
    clamp.  kind "none" gives 0."""
    if law.kind == LAW_NONE:
        return 0.0
    if law.kind == LAW1:
        v = law1_v(p, law.g, x)
    elif law.kind == LAW2:
        v = law2_v(p, law.g, law.g1, x, switched)
    else:
        raise ControlError(f"unknown control law kind {law.kind!r}")
    if law.clamp_v:
        v = min(1.0, max(0.0, v))
    return v


def law1_min_gain(p: ModelParams, s0: float, k0: float = 1.0) -> float:
    """Sufficient law-1 gain bound min{sigma, gamma} + k0*beta*s0/N.

    Gains above this value certify the exponential (E, I) bound of
    `law1_transient_bound`; far smaller gains still stabilize in practice,
    so callers treat the bound as advisory.  s0 = N gives the
    initial-condition-free variant.
    """
    validate_params(p)
    if not (k0 >= 1.0):
        raise ControlError(f"law1_min_gain: k0 = {k0} must be >= 1")
    if not (0.0 <= s0 <= p.n_total):
        raise ControlError(
            f"law1_min_gain: s0 = {s0} must lie in [0, N = {p.n_total}]"
        )
    return min(p.sigma, p.gamma) + k0 * p.beta * s0 / p.n_total


def law1_s_closed_form(p: ModelParams, g: float, s0: float, t: float) -> float:
    """Closed-loop susceptible population s0 * exp(-(mu+g) t)."""
    if t < 0.0:
        raise ControlError(f"law1_s_closed_form: t = {t} must be >= 0")
    return s0 * math.exp(-(p.mu + g) * t)


def law1_transient_bound(
    p: ModelParams, g: float, s0: float, e0: float, i0: float, k0: float = 1.0
) -> float:
    """Upper bound on sup_t ||(E(t), I(t))|| valid when g exceeds
    law1_min_gain:

        k0 * N*(g - min{sigma,gamma})
        / [N*(g - min{sigma,gamma}) - k0*beta*s0] * ||(e0, i0)||.
    """
    validate_params(p)
    margin = p.n_total * (g - min(p.sigma, p.gamma))
    drive = k0 * p.beta * s0
    if margin <= drive:
        raise ControlError(
            "law1_transient_bound requires g above the sufficient gain "
            f"bound {law1_min_gain(p, s0, k0):.6g}; got g = {g}"
        )
    return k0 * margin / (margin - drive) * math.hypot(e0, i0)


# ---------------------------------------------------------------------------
# law-1 envelopes from divided differences of h(a) = exp(-(mu+a) t)


def _dd1(mu: float, a: float, b: float, t: float) -> float:
    # first divided difference of h(a) = exp(-(mu+a)t); confluent at a == b
    if a == b:
        return -t * math.exp(-(mu + a) * t)
    return (math.exp(-(mu + a) * t) - math.exp(-(mu + b) * t)) / (a - b)


def _dd2(mu: float, a: float, b: float, c: float, t: float) -> float:
    # second divided difference, symmetric in (a, b, c)
    if a == c:
        if a == b:
            return t * t / 2.0 * math.exp(-(mu + a) * t)
        # put the repeated pair adjacent: [a, a, b]
        a, b, c = a, c, b
    return (_dd1(mu, a, b, t) - _dd1(mu, b, c, t)) / (a - c)


@dataclass(frozen=True)
class EnvelopeBounds:
    """Pointwise upper bounds for E(t) and I(t) under law 1.

    ``limiting_case`` marks that at least one confluent branch (g = sigma,
    g = gamma, or sigma = gamma) replaced the generic exponential-difference
    formula by its continuity limit.
    """

    e_bound: float
    i_bound: float
    limiting_case: bool


def law1_envelopes(
    p: ModelParams,
    g: float,
    s0: float,
    e0: float,
    i0: float,
    m_i: float,
    t: float,
) -> EnvelopeBounds:
    """Exponential envelopes dominating E(t) and I(t) in the law-1 loop.

    m_i must dominate sup of I over [0, t]; the caller typically supplies
    the max of the integrated run.  With phi(a,b;t) the positive exponential
    difference quotient (the negated first divided difference):

        E(t) <= exp(-(mu+sigma)t)*e0 + (beta*s0*m_i/N) * phi(g, sigma; t)
        I(t) <= exp(-(mu+gamma)t)*i0 + sigma*e0 * phi(sigma, gamma; t)
                + (sigma*beta*s0*m_i/N) * dd2(g, sigma, gamma; t)

    Coincident rates switch the affected terms to t*exp confluent limits.
    """
    validate_params(p)
    if not (g > 0.0):
        raise NonPositiveGain(f"law1_envelopes: g = {g} must be > 0")
    if t < 0.0:
        raise ControlError(f"law1_envelopes: t = {t} must be >= 0")
    coef = p.beta * s0 * m_i / p.n_total
    e_bound = math.exp(-(p.mu + p.sigma) * t) * e0 - coef * _dd1(
        p.mu, g, p.sigma, t
    )
    i_bound = (
        math.exp(-(p.mu + p.gamma) * t) * i0
        - p.sigma * e0 * _dd1(p.mu, p.sigma, p.gamma, t)
        + p.sigma * coef * _dd2(p.mu, g, p.sigma, p.gamma, t)
    )
    limiting = g == p.sigma or g == p.gamma or p.sigma == p.gamma
    return EnvelopeBounds(e_bound=e_bound, i_bound=i_bound, limiting_case=limiting)


# ---------------------------------------------------------------------------
# law-2 analysis


def law2_r_closed_form(
    p: ModelParams, g: float, g1: float, r0: float, t: float
) -> float:
    """Pre-switch removed population:

        R(t) = r_inf + (r0 - r_inf) * exp(-(mu+omega+g) t),

    with r_inf = g1*N/(mu+omega+g)."""
    if t < 0.0:
        raise ControlError(f"law2_r_closed_form: t = {t} must be >= 0")
    rate = p.mu + p.omega + g
    if rate <= 0.0:
        raise GainTooNegative(
            f"law2_r_closed_form: mu+omega+g = {rate} must be > 0"
        )
    r_inf = g1 * p.n_total / rate
    return r_inf + (r0 - r_inf) * math.exp(-rate * t)


def law2_asymptotics(p: ModelParams, g: float, g1: float) -> tuple[float, float]:
    """No-switch limits (r_inf, sei_inf):

        r_inf = g1*N/(mu+omega+g),  sei_inf = N - r_inf.

    Choosing g1 = mu+omega+g makes the whole population removed in the
    limit.  Requires g > -(mu+omega)."""
    validate_params(p)
    rate = p.mu + p.omega + g
    if not (rate > 0.0):
        raise GainTooNegative(
            f"law2_asymptotics: g = {g} must exceed -(mu+omega) = "
            f"{-(p.mu + p.omega)}"
        )
    r_inf = g1 * p.n_total / rate
    return r_inf, (rate - g1) * p.n_total / rate


@dataclass(frozen=True)
class Law2Certificates:
    """Independent sufficient conditions for the law-2 signal to stay
    nonnegative for all time.

    * matched_gain_covers_recovery: g1 = mu+omega+g and g1 >= gamma.
    * matched_gain_waning_equals_recovery: g1 = mu+omega+g, g >= 0, and
      gamma = mu+omega.
    * waning_dominates_prevalence: min{1, reproduction ratio} <= (mu+omega)/gamma.

    Equalities are accepted to relative 1e-9.  gamma = 0 makes the third
    condition vacuous (no removal flow to outrun); ``gamma_zero`` flags it.
    ``certified`` is the disjunction: all false means "not certified", not
    "the signal goes negative".
    """

    matched_gain_covers_recovery: bool
    matched_gain_waning_equals_recovery: bool
    waning_dominates_prevalence: bool
    gamma_zero: bool
    certified: bool


def _rel_eq(a: float, b: float, rtol: float = 1e-9) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def law2_nonneg_certificates(
    p: ModelParams, g: float, g1: float
) -> Law2Certificates:
    """Evaluate the three nonnegativity certificates for a law-2 gain pair."""
    validate_params(p)
    matched = _rel_eq(g1, p.mu + p.omega + g)
    cert_a = matched and g1 >= p.gamma
    cert_b = matched and g >= 0.0 and _rel_eq(p.gamma, p.mu + p.omega)
    gamma_zero = p.gamma == 0.0
    if gamma_zero:
        cert_c = True
    else:
        ratio = p.sigma * p.beta / ((p.mu + p.sigma) * (p.mu + p.gamma))
        cert_c = min(1.0, ratio) <= (p.mu + p.omega) / p.gamma
    return Law2Certificates(
        matched_gain_covers_recovery=cert_a,
        matched_gain_waning_equals_recovery=cert_b,
        waning_dominates_prevalence=cert_c,
        gamma_zero=gamma_zero,
        certified=cert_a or cert_b or cert_c,
    )


def law2_post_switch_closed_forms(
    p: ModelParams, state_at_switch: State, t: float
) -> tuple[float, float]:
    """Exposed and infectious populations after the law-2 switch.

    With dt = t - t_s and (E_s, I_s) the populations at the switch:

        E(t) = E_s * exp(-(mu+sigma) dt)
        I(t) = I_s * exp(-(mu+gamma) dt) + sigma*E_s * phi(sigma, gamma; dt)

    where phi is the positive exponential difference quotient, replaced by
    its confluent limit dt*exp(-(mu+gamma) dt) when sigma = gamma."""
    dt = t - state_at_switch.t
    if dt < 0.0:
        raise ControlError(
            f"law2_post_switch_closed_forms: t = {t} precedes the switch "
            f"time {state_at_switch.t}"
        )
    e_s = state_at_switch.e
    i_s = state_at_switch.i
    e_t = e_s * math.exp(-(p.mu + p.sigma) * dt)
    i_t = i_s * math.exp(-(p.mu + p.gamma) * dt) - p.sigma * e_s * _dd1(
        p.mu, p.sigma, p.gamma, dt
    )
    return e_t, i_t


def infectious_peak_fraction_bound(p: ModelParams) -> float:
    """Fraction-of-N bound on the infectious peak of any vaccination-free
    run that starts below it: min{1, sigma*beta/((mu+sigma)*(mu+gamma))}."""
    validate_params(p)
    denom = (p.mu + p.sigma) * (p.mu + p.gamma)
    if denom == 0.0:
        return 1.0
    return min(1.0, p.sigma * p.beta / denom)
