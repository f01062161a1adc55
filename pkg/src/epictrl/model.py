"""Constant-population SEIR model with vital dynamics and newborn vaccination.

The state (S, E, I, R) counts susceptible, exposed (infected but not yet
infectious), infectious, and removed-by-immunity individuals in a population
of constant size N.  Births and deaths occur at the same rate mu, immunity is
lost at rate omega, exposure becomes infectiousness at rate sigma, infectious
individuals are removed at rate gamma, and contagion follows true mass action
beta*S*I/N.  The control signal V(t) is the vaccinated fraction of the
newborn flow mu*N; it is not restricted to [0, 1] a priori.

With S + E + I + R = N the exposed component is redundant, E = N - S - I - R,
which gives an equivalent three-state (S, I, R) system used for linearization
and positivity analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ModelError(ValueError):
    """Invalid model input."""


class NonFiniteValue(ModelError):
    """A parameter or state component is NaN or infinite."""


class NegativeRate(ModelError):
    """A rate that must be nonnegative is negative."""


class ZeroSigma(ModelError):
    """The exposed-to-infectious rate sigma must be strictly positive."""


class NonPositivePopulation(ModelError):
    """Population size must be strictly positive."""


class MuZero(ModelError):
    """The operation divides by mu*N and needs mu > 0."""


class AlphaTooSmall(ModelError):
    """The susceptible-loop split rate alpha must cover beta*I/N."""


@dataclass(frozen=True)
class ModelParams:
    """Model rates (all per day) and the constant population size.

    Attributes
    ----------
    mu : float
        Birth rate, equal to the death rate.
    omega : float
        Rate of loss of immunity.
    beta : float
        Transmission rate of the true mass action incidence beta*S*I/N.
    sigma : float
        Rate at which exposed individuals become infectious (> 0).
    gamma : float
        Removal (recovery) rate of infectious individuals.
    n_total : float
        Total population size, constant in time.
    """

    mu: float
    omega: float
    beta: float
    sigma: float
    gamma: float
    n_total: float


@dataclass(frozen=True)
class State:
    """Population counts at time t (days). Components may be any floats;
    validity is checked separately."""

    s: float
    e: float
    i: float
    r: float
    t: float = 0.0

    @property
    def total(self) -> float:
        return self.s + self.e + self.i + self.r


def validate_params(p: ModelParams) -> ModelParams:
    """Check parameter ranges and return ``p`` unchanged.

    Raises
    ------
    NonFiniteValue, NegativeRate, ZeroSigma, NonPositivePopulation
    """
    for name in ("mu", "omega", "beta", "sigma", "gamma", "n_total"):
        val = getattr(p, name)
        if not math.isfinite(val):
            raise NonFiniteValue(f"{name} = {val!r} is not finite")
    for name in ("mu", "omega", "beta", "gamma"):
        val = getattr(p, name)
        if val < 0.0:
            raise NegativeRate(f"{name} = {val} must be >= 0")
    if p.sigma <= 0.0:
        raise ZeroSigma(f"sigma = {p.sigma} must be > 0")
    if p.n_total <= 0.0:
        raise NonPositivePopulation(f"n_total = {p.n_total} must be > 0")
    return p


def derivative(
    p: ModelParams, x: State, v: float
) -> tuple[float, float, float, float]:
    """Time derivative (dS, dE, dI, dR) of the four-state model under
    vaccination signal ``v``.

    The component sum of the derivative equals mu*(N - S - E - I - R), so the
    total population is invariant whenever it starts at N.  Each coupling flux
    is computed once and reused with opposite signs, which makes that sum
    telescope to machine precision instead of accumulating rounding from
    independently evaluated products.
    """
    infection = p.beta * x.s * x.i / p.n_total
    births = p.mu * p.n_total
    onset = p.sigma * x.e
    removal = p.gamma * x.i
    waning = p.omega * x.r
    ds = -p.mu * x.s + waning - infection + births * (1.0 - v)
    de = infection - p.mu * x.e - onset
    di = -p.mu * x.i - removal + onset
    dr = -p.mu * x.r - waning + removal + births * v
    return ds, de, di, dr


def reduced_derivative(
    p: ModelParams, s: float, i: float, r: float, v: float
) -> tuple[float, float, float]:
    """Derivative (dS, dI, dR) of the three-state system with E = N-S-I-R.

    Equivalent to `derivative` restricted to the invariant plane
    S+E+I+R = N.
    """
    ds = (
        -p.mu * s
        + p.omega * r
        - p.beta * s * i / p.n_total
        + p.mu * p.n_total * (1.0 - v)
    )
    di = -(p.mu + p.gamma + p.sigma) * i + p.sigma * (p.n_total - s - r)
    dr = -(p.mu + p.omega) * r + p.gamma * i + p.mu * p.n_total * v
    return ds, di, dr


def _rel_gap(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return 0.0
    return abs(a - b) / scale


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of the initial-condition admissibility check.

    The two exposed-population conditions are conditioned on I(0) and count
    as satisfied when I(0) = 0.  ``marginal`` is set when any active strict
    comparison is decided by less than 1e-9 relative slack, so borderline
    scenarios are visible.  ``admissible`` is the conjunction of the four
    booleans.
    """

    initial_nonneg: bool
    exposed_lower_ok: bool
    exposed_upper_ok: bool
    beta_above_threshold: bool
    beta_threshold: float
    marginal: bool
    admissible: bool


def check_admissibility(p: ModelParams, x0: State) -> AdmissibilityReport:
    """Classify an initial state against the admissibility conditions.

    Together the conditions guarantee the vaccination-free solution stays
    componentwise nonnegative:

    * min{S(0), I(0), R(0)} >= 0,
    * E(0) > ((mu+gamma)/sigma) * I(0),
    * E(0) < beta*S(0)*I(0) / ((mu+sigma)*N),
    * beta > beta0 = (mu+gamma)*(1 + mu/sigma).

    Both E(0) conditions apply only when I(0) != 0; for beta <= beta0 they
    are incompatible for any I(0) > 0, which is why beta0 is reported as the
    minimum transmission rate admitting an infectious start.
    """
    validate_params(p)
    for val in (x0.s, x0.e, x0.i, x0.r):
        if not math.isfinite(val):
            raise NonFiniteValue(f"state component {val!r} is not finite")
    initial_nonneg = min(x0.s, x0.i, x0.r) >= 0.0
    beta_threshold = (p.mu + p.gamma) * (1.0 + p.mu / p.sigma)
    beta_above = p.beta > beta_threshold
    slacks = [_rel_gap(p.beta, beta_threshold)]
    if x0.i != 0.0:
        lower = (p.mu + p.gamma) / p.sigma * x0.i
        upper = p.beta * x0.s * x0.i / ((p.mu + p.sigma) * p.n_total)
        lower_ok = x0.e > lower
        upper_ok = x0.e < upper
        slacks += [_rel_gap(x0.e, lower), _rel_gap(x0.e, upper)]
    else:
        lower_ok = True
        upper_ok = True
    marginal = any(s < 1e-9 for s in slacks)
    admissible = initial_nonneg and lower_ok and upper_ok and beta_above
    return AdmissibilityReport(
        initial_nonneg=initial_nonneg,
        exposed_lower_ok=lower_ok,
        exposed_upper_ok=upper_ok,
        beta_above_threshold=beta_above,
        beta_threshold=beta_threshold,
        marginal=marginal,
        admissible=admissible,
    )


def positivity_v_upper_bound(p: ModelParams, alpha: float, x: State) -> float:
    """Largest vaccination signal keeping the state nonnegative at ``x``.

    Splitting the susceptible loss rate as mu+alpha makes the reduced system
    matrix Metzler; the susceptible forcing term then stays nonnegative for
    every V up to

        1 + (alpha - beta*I/N) * S / (mu*N).

    Requires mu > 0 and alpha >= beta*I/N (alpha = beta always qualifies
    while I <= N).
    """
    validate_params(p)
    if p.mu == 0.0:
        raise MuZero("positivity_v_upper_bound divides by mu*N; mu must be > 0")
    shed = p.beta * x.i / p.n_total
    if alpha < shed:
        raise AlphaTooSmall(
            f"alpha = {alpha} is below beta*I/N = {shed}; the split rate "
            "must absorb the infection pressure"
        )
    return 1.0 + (alpha - shed) * x.s / (p.mu * p.n_total)


def reduced_linear_matrix(p: ModelParams, alpha: float) -> np.ndarray:
    """System matrix A(alpha) of the reduced (S, I, R) dynamics with the
    susceptible loss rate split as mu+alpha.

    Off-diagonal entries are omega and gamma, both nonnegative for valid
    parameters, so A(alpha) is Metzler for every alpha >= 0.
    """
    validate_params(p)
    if alpha < 0.0:
        raise AlphaTooSmall(f"alpha = {alpha} must be >= 0")
    return np.array(
        [
            [-(p.mu + alpha), 0.0, p.omega],
            [0.0, -(p.mu + p.gamma + p.sigma), 0.0],
            [0.0, p.gamma, -(p.mu + p.omega)],
        ]
    )
