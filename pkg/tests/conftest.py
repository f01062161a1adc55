"""Shared fixtures: parameter sets and cached trajectories for the built-in outbreaks.

Integrations are session-scoped because several test modules interrogate the
same runs (summary statistics, invariants, campaign arithmetic, CSV output).
"""

import warnings

import pytest

from epictrl.control import law1, law2, no_vaccination
from epictrl.integrator import IntegrationConfig, integrate
from epictrl.model import ModelParams, State


MEASLES = ModelParams(
    mu=5.48e-5, omega=0.0, beta=3.288, sigma=9.82e-2, gamma=0.274, n_total=1e6
)
MEASLES_X0 = State(s=9.8e5, e=1.5e4, i=5000.0, r=0.0)

INFLUENZA_7 = ModelParams(
    mu=1.0 / 25550.0, omega=1.0 / 7.0, beta=1.66, sigma=1.0 / 2.2,
    gamma=1.0 / 2.2, n_total=1000.0,
)
INFLUENZA_15 = ModelParams(
    mu=1.0 / 25550.0, omega=1.0 / 15.0, beta=1.66, sigma=1.0 / 2.2,
    gamma=1.0 / 2.2, n_total=1000.0,
)
INFLUENZA_X0 = State(s=980.0, e=15.0, i=5.0, r=0.0)

CFG_50 = IntegrationConfig(step=0.01, horizon=50.0)
CFG_300 = IntegrationConfig(step=0.01, horizon=300.0)


def run_quiet(params, x0, law, cfg):
    """Integrate with advisory warnings suppressed (gain below sufficient bound etc.)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return integrate(params, x0, law, cfg)


@pytest.fixture(scope="session")
def measles_params():
    return MEASLES


@pytest.fixture(scope="session")
def measles_x0():
    return MEASLES_X0


@pytest.fixture(scope="session")
def influenza7_params():
    return INFLUENZA_7


@pytest.fixture(scope="session")
def influenza15_params():
    return INFLUENZA_15


@pytest.fixture(scope="session")
def influenza_x0():
    return INFLUENZA_X0


@pytest.fixture(scope="session")
def measles_novax():
    return integrate(MEASLES, MEASLES_X0, no_vaccination(), CFG_50)


@pytest.fixture(scope="session")
def measles_law1():
    # Gain below the sufficient transient bound, so the library warns; the run
    # itself stays admissible, which is part of what the suite verifies.
    return run_quiet(MEASLES, MEASLES_X0, law1(0.25), CFG_50)


@pytest.fixture(scope="session")
def measles_law2_printed():
    # paired gains as published: g1 = 0.1 slightly exceeds mu + omega + g
    return run_quiet(MEASLES, MEASLES_X0, law2(MEASLES, g=0.0999, g1=0.1), CFG_50)


@pytest.fixture(scope="session")
def measles_law2_derived():
    g = 0.0999
    g1 = MEASLES.mu + MEASLES.omega + g
    return run_quiet(MEASLES, MEASLES_X0, law2(MEASLES, g=g, g1=g1), CFG_50)


@pytest.fixture(scope="session")
def influenza7_novax():
    return integrate(INFLUENZA_7, INFLUENZA_X0, no_vaccination(), CFG_300)


@pytest.fixture(scope="session")
def influenza15_novax():
    return integrate(INFLUENZA_15, INFLUENZA_X0, no_vaccination(), CFG_300)


@pytest.fixture(scope="session")
def influenza7_law1():
    return run_quiet(INFLUENZA_7, INFLUENZA_X0, law1(0.1), CFG_300)


@pytest.fixture(scope="session")
def influenza15_law1():
    return run_quiet(INFLUENZA_15, INFLUENZA_X0, law1(0.1), CFG_300)


@pytest.fixture(scope="session")
def measles_subthreshold_novax():
    """Transmission below the epidemic threshold: infection dies out monotonically."""
    p = ModelParams(
        mu=MEASLES.mu, omega=MEASLES.omega, beta=0.2, sigma=MEASLES.sigma,
        gamma=MEASLES.gamma, n_total=MEASLES.n_total,
    )
    return integrate(p, MEASLES_X0, no_vaccination(), CFG_50)


@pytest.fixture(scope="session")
def law2_no_switch():
    """A recovery-targeting run whose susceptible pool never reaches zero.

    Low transmission plus a deliberately small recovered-population target keeps
    S positive for the whole horizon, exercising the no-switch branch and the
    long-run limits of the recovery feedback. Horizon is 20 time constants of
    the closed recovered-population dynamics.
    """
    p = ModelParams(
        mu=MEASLES.mu, omega=MEASLES.omega, beta=0.1, sigma=MEASLES.sigma,
        gamma=MEASLES.gamma, n_total=MEASLES.n_total,
    )
    g = 0.0999
    g1 = 0.05
    horizon = 20.0 / (p.mu + p.omega + g)
    cfg = IntegrationConfig(step=0.01, horizon=horizon, record_stride=100)
    traj = run_quiet(p, MEASLES_X0, law2(p, g=g, g1=g1), cfg)
    return p, g, g1, traj
