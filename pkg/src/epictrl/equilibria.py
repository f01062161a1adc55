"""Vaccination-free equilibrium points of the SEIR model.

Two fixed points exist: the disease-free point (N, 0, 0, 0), always, and an
endemic point with persistent infection whenever the reproduction ratio
sigma*beta / ((mu+sigma)*(mu+gamma)) reaches 1.  At ratio exactly 1 the two
coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ModelParams, reduced_derivative, validate_params


class DegenerateRates(ValueError):
    """Rate combination makes the requested quantity undefined."""


DISEASE_FREE = "disease_free"
ENDEMIC = "endemic"

# Relative slack under which endemic-existence equality is flagged.
_DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class EquilibriumPoint:
    """A fixed point of the vaccination-free dynamics.

    ``degenerate`` marks the boundary case where the endemic existence
    condition holds with (near-)equality and the endemic point collapses
    onto the disease-free one.
    """

    s_star: float
    e_star: float
    i_star: float
    r_star: float
    kind: str
    degenerate: bool = False

    @property
    def total(self) -> float:
        return self.s_star + self.e_star + self.i_star + self.r_star


def disease_free(p: ModelParams) -> EquilibriumPoint:
    """The fully susceptible fixed point (N, 0, 0, 0)."""
    validate_params(p)
    return EquilibriumPoint(p.n_total, 0.0, 0.0, 0.0, kind=DISEASE_FREE)


def reproduction_ratio(p: ModelParams) -> float:
    """sigma*beta / ((mu+sigma)*(mu+gamma)).

    The endemic point exists exactly when this ratio is >= 1.  Raises
    DegenerateRates when mu+gamma = 0, which makes the ratio undefined.
    """
    validate_params(p)
    denom = (p.mu + p.sigma) * (p.mu + p.gamma)
    if denom == 0.0:
        raise DegenerateRates(
            "reproduction_ratio undefined: (mu+sigma)*(mu+gamma) = 0"
        )
    return p.sigma * p.beta / denom


def endemic(p: ModelParams) -> EquilibriumPoint | None:
    """The persistent-infection fixed point, or None when it does not exist.

    Writing delta = sigma*beta - (mu+sigma)*(mu+gamma) and
    d = (mu+gamma+sigma)*(mu+omega) + gamma*sigma, the point is

        S* = (mu+sigma)*(mu+gamma) / (sigma*beta) * N
        I* = (mu+omega) * delta / (beta*d) * N
        R* = gamma * delta / (beta*d) * N
        E* = (mu+gamma)*(mu+omega) * delta / (sigma*beta*d) * N

    and exists iff delta >= 0.  At delta = 0 it equals the disease-free
    point and is flagged degenerate.
    """
    validate_params(p)
    loss_product = (p.mu + p.sigma) * (p.mu + p.gamma)
    delta = p.sigma * p.beta - loss_product
    if delta < 0.0:
        return None
    d = (p.mu + p.gamma + p.sigma) * (p.mu + p.omega) + p.gamma * p.sigma
    if d == 0.0:
        raise DegenerateRates(
            "endemic point undefined: (mu+gamma+sigma)*(mu+omega) "
            "+ gamma*sigma = 0"
        )
    # delta >= 0 with sigma > 0 forces beta > 0, so the divisions are safe
    n = p.n_total
    s_star = loss_product / (p.sigma * p.beta) * n
    i_star = (p.mu + p.omega) * delta / (p.beta * d) * n
    r_star = p.gamma * delta / (p.beta * d) * n
    e_star = (p.mu + p.gamma) * (p.mu + p.omega) * delta / (p.sigma * p.beta * d) * n
    degenerate = delta <= _DEGENERACY_RTOL * p.sigma * p.beta
    return EquilibriumPoint(
        s_star, e_star, i_star, r_star, kind=ENDEMIC, degenerate=degenerate
    )


def residual(p: ModelParams, point: EquilibriumPoint) -> float:
    """Max absolute rate of change of the reduced system at the point,
    vaccination off.  Zero (up to roundoff) exactly at a fixed point."""
    validate_params(p)
    ds, di, dr = reduced_derivative(
        p, point.s_star, point.i_star, point.r_star, 0.0
    )
    return max(abs(ds), abs(di), abs(dr))
