"""Local stability analysis about the vaccination-free equilibria.

Works on the reduced (S, I, R) coordinates.  The disease-free point admits
closed-form eigenvalues; the endemic point is analyzed through the split of
its characteristic polynomial into p2(s) = p(s) + beta*p_tilde(s), where p
collects the beta-independent part.  Two verdicts are computed for the
endemic point: a Routh-Hurwitz test on p2, and the sufficient condition
sup_w |p_tilde(jw)/p(jw)| < 1/beta, estimated by a frequency sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibria import EquilibriumPoint, endemic, residual
from .model import ModelParams, validate_params


class NotAnEquilibrium(ValueError):
    """The supplied point does not satisfy the fixed-point identities."""


class PNotHurwitz(ValueError):
    """The denominator polynomial has roots outside the open left half
    plane; the frequency-domain ratio is undefined as an H-infinity norm."""


class DegenerateLeadingCoefficient(ValueError):
    """Leading cubic coefficient is zero."""


class NoEndemicPoint(ValueError):
    """The endemic equilibrium does not exist for these parameters."""


# residual tolerance accepted by linearize, relative to N
_EQ_RTOL = 1e-6


def linearize(p: ModelParams, point: EquilibriumPoint) -> np.ndarray:
    """Jacobian of the reduced (S, I, R) field at an equilibrium point.

    Rows and columns are ordered (S, I, R).  Raises NotAnEquilibrium when
    the point's residual exceeds 1e-6*N.
    """
    validate_params(p)
    res = residual(p, point)
    if res > _EQ_RTOL * p.n_total:
        raise NotAnEquilibrium(
            f"linearize: residual {res:.6g} exceeds "
            f"{_EQ_RTOL * p.n_total:.6g} at the supplied point"
        )
    n = p.n_total
    return np.array(
        [
            [-p.mu - p.beta * point.i_star / n, -p.beta * point.s_star / n, p.omega],
            [-p.sigma, -(p.mu + p.sigma + p.gamma), -p.sigma],
            [0.0, p.gamma, -(p.mu + p.omega)],
        ]
    )


def df_beta_threshold(p: ModelParams) -> float:
    """Transmission rate below which the disease-free point is locally
    asymptotically stable: (mu+gamma)*(mu+sigma)/sigma."""
    validate_params(p)
    return (p.mu + p.gamma) * (p.mu + p.sigma) / p.sigma


def disease_free_eigenvalues(p: ModelParams) -> tuple[complex, complex, complex]:
    """Closed-form eigenvalues at the disease-free point, sorted by real
    part ascending.

    One eigenvalue is -(mu+omega); the remaining pair is

        -(2*mu+sigma+gamma)/2 +- sqrt((sigma-gamma)^2 + 4*sigma*beta)/2,

    always real for beta >= 0.
    """
    validate_params(p)
    lam1 = -(p.mu + p.omega)
    half_trace = -(2.0 * p.mu + p.sigma + p.gamma) / 2.0
    half_gap = math.sqrt((p.sigma - p.gamma) ** 2 + 4.0 * p.sigma * p.beta) / 2.0
    roots = sorted([lam1, half_trace - half_gap, half_trace + half_gap])
    return (complex(roots[0]), complex(roots[1]), complex(roots[2]))


@dataclass(frozen=True)
class CharPolyPair:
    """Characteristic polynomial of the endemic Jacobian split as
    p2(s) = p(s) + beta*p_tilde(s).

    ``p`` holds monic cubic coefficients (descending powers); ``p_tilde``
    holds the quadratic coefficients (descending), which carry the 1/N
    scaling of the equilibrium components.
    """

    p: tuple[float, float, float, float]
    p_tilde: tuple[float, float, float]


def char_poly_pair(p: ModelParams) -> CharPolyPair:
    """Build the (p, p_tilde) split at the endemic point.

    With a = mu+omega, b = mu, c = mu+sigma+gamma:

        p(s)       = (s+a) * [(s+b)(s+c) + sigma*gamma]
        p_tilde(s) = (I*/N) * [(s+a)(s+c) + sigma*gamma]
                     - sigma*(S*/N)*(s+a)

    Raises NoEndemicPoint when the endemic point does not exist.
    """
    point = endemic(p)
    if point is None:
        raise NoEndemicPoint(
            "char_poly_pair: endemic point does not exist "
            "(reproduction ratio below 1)"
        )
    a = p.mu + p.omega
    b = p.mu
    c = p.mu + p.sigma + p.gamma
    sg = p.sigma * p.gamma
    poly = (
        1.0,
        a + b + c,
        b * c + sg + a * (b + c),
        a * (b * c + sg),
    )
    i_frac = point.i_star / p.n_total
    s_frac = point.s_star / p.n_total
    tilde = (
        i_frac,
        (a + c) * i_frac - p.sigma * s_frac,
        (a * c + sg) * i_frac - p.sigma * a * s_frac,
    )
    return CharPolyPair(p=poly, p_tilde=tilde)


def endemic_char_poly(p: ModelParams) -> tuple[float, float, float, float]:
    """Monic characteristic polynomial p2 = p + beta*p_tilde of the endemic
    Jacobian, descending powers."""
    pair = char_poly_pair(p)
    c3, c2, c1, c0 = pair.p
    q2, q1, q0 = pair.p_tilde
    return (c3, c2 + p.beta * q2, c1 + p.beta * q1, c0 + p.beta * q0)


def routh_hurwitz(coeffs) -> bool:
    """True iff the cubic a3*s^3 + a2*s^2 + a1*s + a0 has all roots in the
    open left half plane: all coefficients of one sign and a2*a1 > a3*a0."""
    a3, a2, a1, a0 = (float(c) for c in coeffs)
    if a3 == 0.0:
        raise DegenerateLeadingCoefficient("leading cubic coefficient is zero")
    if a3 < 0.0:
        a3, a2, a1, a0 = -a3, -a2, -a1, -a0
    return a2 > 0.0 and a1 > 0.0 and a0 > 0.0 and a2 * a1 > a3 * a0


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def cubic_roots(coeffs) -> tuple[complex, complex, complex]:
    """Roots of a real cubic, by Cardano (one real root) or the
    trigonometric method (three real roots).  Sorted by (real, imag)."""
    a3, a2, a1, a0 = (float(c) for c in coeffs)
    if a3 == 0.0:
        raise DegenerateLeadingCoefficient("leading cubic coefficient is zero")
    a = a2 / a3
    b = a1 / a3
    c = a0 / a3
    # depressed cubic t^3 + pt + q with s = t - a/3
    pd = b - a * a / 3.0
    qd = 2.0 * a**3 / 27.0 - a * b / 3.0 + c
    shift = -a / 3.0
    disc = (qd / 2.0) ** 2 + (pd / 3.0) ** 3
    if disc > 0.0:
        # one real root, one complex-conjugate pair; take the cube root of
        # whichever Cardano term adds in magnitude and recover its partner
        # from u*v = -pd/3, so nothing cancels when |pd|^3 << qd^2
        sq = math.sqrt(disc)
        if qd == 0.0:
            # symmetric case, neither term cancels; exact negation keeps
            # the real root at the shift
            u = _cbrt(sq)
            v = -u
        else:
            u = _cbrt(-qd / 2.0 - math.copysign(sq, qd))
            v = -pd / (3.0 * u)
        t_real = u + v
        re_pair = -t_real / 2.0
        im_pair = (u - v) * math.sqrt(3.0) / 2.0
        roots = [
            complex(t_real + shift, 0.0),
            complex(re_pair + shift, im_pair),
            complex(re_pair + shift, -im_pair),
        ]
    elif pd == 0.0:
        # disc == 0 and p == 0 forces q == 0: triple root
        roots = [complex(shift, 0.0)] * 3
    elif disc == 0.0:
        # repeated real roots
        t1 = 3.0 * qd / pd
        t23 = -3.0 * qd / (2.0 * pd)
        roots = [
            complex(t1 + shift, 0.0),
            complex(t23 + shift, 0.0),
            complex(t23 + shift, 0.0),
        ]
    else:
        # three distinct real roots
        rho = math.sqrt(-(pd**3) / 27.0)
        theta = math.acos(max(-1.0, min(1.0, -qd / (2.0 * rho))))
        mag = 2.0 * math.sqrt(-pd / 3.0)
        roots = [
            complex(mag * math.cos((theta + 2.0 * math.pi * k) / 3.0) + shift, 0.0)
            for k in range(3)
        ]
    roots.sort(key=lambda z: (z.real, z.imag))
    return (roots[0], roots[1], roots[2])


def endemic_eigenvalues(p: ModelParams) -> tuple[complex, complex, complex]:
    """Eigenvalues of the endemic Jacobian via the closed-form cubic."""
    return cubic_roots(endemic_char_poly(p))


@dataclass(frozen=True)
class FreqSweepConfig:
    """Frequency-sweep settings for the H-infinity ratio estimate.

    Log-spaced grid over [w_min, w_max] rad/day with n_points samples, plus
    the w = 0 candidate; the grid maximum is refined by golden-section
    search to relative width refine_tol.
    """

    w_min: float = 1e-6
    w_max: float = 1e6
    n_points: int = 2000
    refine_tol: float = 1e-6


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _ratio_sq(pair: CharPolyPair, w: float) -> float:
    c3, c2, c1, c0 = pair.p
    q2, q1, q0 = pair.p_tilde
    w2 = w * w
    den = (c0 - c2 * w2) ** 2 + w2 * (c1 - c3 * w2) ** 2
    num = (q0 - q2 * w2) ** 2 + (q1 * w) ** 2
    return num / den


def hinf_ratio(pair: CharPolyPair, cfg: FreqSweepConfig | None = None) -> float:
    """sup over w >= 0 of |p_tilde(jw) / p(jw)|.

    The denominator must be Hurwitz (PNotHurwitz otherwise), so the ratio
    is finite everywhere and decays at high frequency; the supremum is
    attained on the grid-plus-refinement search.  Result is never below the
    w = 0 sample.
    """
    if cfg is None:
        cfg = FreqSweepConfig()
    if not routh_hurwitz(pair.p):
        raise PNotHurwitz(
            "hinf_ratio: denominator polynomial is not Hurwitz"
        )
    if all(q == 0.0 for q in pair.p_tilde):
        return 0.0
    grid = np.logspace(
        math.log10(cfg.w_min), math.log10(cfg.w_max), cfg.n_points
    )
    values = [_ratio_sq(pair, w) for w in grid]
    k = int(np.argmax(values))
    best = values[k]
    at_zero = _ratio_sq(pair, 0.0)
    lo = 0.0 if k == 0 else float(grid[k - 1])
    hi = float(grid[min(k + 1, len(grid) - 1)])
    # golden-section maximization of the ratio on [lo, hi]
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = _ratio_sq(pair, x1)
    f2 = _ratio_sq(pair, x2)
    while hi - lo > cfg.refine_tol * max(hi, cfg.w_min):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = _ratio_sq(pair, x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = _ratio_sq(pair, x1)
    best = max(best, f1, f2, at_zero)
    return math.sqrt(best)


@dataclass(frozen=True)
class StabilityReport:
    """Verdicts for both equilibria.

    The endemic fields are None when the endemic point does not exist.
    ``hinf_condition_met`` is sufficient for stability, never necessary, so
    ``verdict_consistent`` only checks the implication hinf => routh_hurwitz.
    """

    df_stable: bool
    df_threshold: float
    df_eigenvalues: tuple[complex, complex, complex]
    endemic_exists: bool
    hinf_ratio: float | None
    hinf_condition_met: bool | None
    routh_hurwitz_p2: bool | None
    verdict_consistent: bool


def assess(
    p: ModelParams, cfg: FreqSweepConfig | None = None
) -> StabilityReport:
    """Full stability report for a parameter set."""
    validate_params(p)
    threshold = df_beta_threshold(p)
    df_eigs = disease_free_eigenvalues(p)
    df_stable = p.beta < threshold
    if endemic(p) is None:
        return StabilityReport(
            df_stable=df_stable,
            df_threshold=threshold,
            df_eigenvalues=df_eigs,
            endemic_exists=False,
            hinf_ratio=None,
            hinf_condition_met=None,
            routh_hurwitz_p2=None,
            verdict_consistent=True,
        )
    pair = char_poly_pair(p)
    ratio = hinf_ratio(pair, cfg)
    met = ratio < 1.0 / p.beta
    rh = routh_hurwitz(endemic_char_poly(p))
    return StabilityReport(
        df_stable=df_stable,
        df_threshold=threshold,
        df_eigenvalues=df_eigs,
        endemic_exists=True,
        hinf_ratio=ratio,
        hinf_condition_met=met,
        routh_hurwitz_p2=rh,
        verdict_consistent=(not met) or rh,
    )
