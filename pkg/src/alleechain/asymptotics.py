"""Threshold classification from the rate-ratio integral.

The per-capita birth to death rate ratio f(x) equals 1 exactly at the two
deterministic equilibria. The sign of the integral of log f over [0, x+*]
decides the large-capacity fate of the chain: negative means the stationary
law collapses onto extinction, positive onto the persistence density x+*.
This module computes that integral, its finite-capacity discrete
counterpart (a log-weight slope of the stationary distribution), and exact
tail diagnostics along capacity sweeps.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import AssumptionError, QuadratureError, UnimodalProfileError
from .model import ModelParams, basic_reproduction_ratio, check_assumptions, equilibria
from .stationary import mode_profile, psd_product

EXTINCTION = "extinction"
PERSISTENCE = "persistence"
CRITICAL = "critical"

#: Band half-width around 0 inside which the integral counts as critical.
DEFAULT_CRITICAL_TOL = 1e-7

#: Absolute tolerance requested from the adaptive quadrature.
_QUAD_ABS_TOL = 1e-9


@dataclass(frozen=True)
class ThresholdReport:
    """Classification of the limiting stationary behaviour."""

    integral_value: float
    classification: str
    tolerance: float
    x_plus: float

    def to_summary(self) -> dict:
        return {
            "integral_value": self.integral_value,
            "classification": self.classification,
            "tolerance": self.tolerance,
            "x_plus": self.x_plus,
        }


@dataclass(frozen=True)
class ConvergenceDiagnostic:
    """Capacity sweep rows (N, tail_mass, discrete_exponent).

    In the extinction regime tail_mass is P[Y_N > epsilon]; in the
    persistence regime it is P[|Y_N - x_plus| > epsilon], where Y_N is the
    stationary population density. Both are exact sums of the stationary
    distribution, not simulation estimates.
    """

    rows: tuple[tuple[int, float, float], ...]
    regime: str
    epsilon: float

    def to_csv(self, stream) -> None:
        stream.write("N,tail_mass,discrete_exponent\n")
        for n, tail, exponent in self.rows:
            stream.write(f"{n},{tail!r},{exponent!r}\n")


def rate_ratio(params: ModelParams, x):
    """f(x) = R0 (1 - delta1 x) / (1 + delta2 x + delta3 theta / (theta + x)).

    Accepts a scalar or an array of densities; x must be >= 0 (the
    denominator is then bounded away from zero).
    """
    if np.any(np.asarray(x) < 0):
        raise ValueError("density must be >= 0")
    r0 = basic_reproduction_ratio(params)
    return (
        r0 * (1.0 - params.delta1 * x)
        / (1.0 + params.delta2 * x + params.delta3 * params.theta / (params.theta + x))
    )


def markov_exponent(
    params: ModelParams, *, critical_tol: float = DEFAULT_CRITICAL_TOL
) -> ThresholdReport:
    """Integral of log f over [0, x_plus] with its sign classification.

    The integrand is smooth and bounded on the interval (f(0) > 0 whenever
    delta3 is finite), so plain adaptive quadrature reaches the 1e-9
    absolute budget without endpoint treatment.

    Raises:
        AssumptionError: bistability or interior capacity fails.
        QuadratureError: the quadrature error estimate misses the budget.
    """
    report = check_assumptions(params)
    if not (report.bistability_holds and report.capacity_interior):
        raise AssumptionError(
            "threshold classification needs both positive equilibria inside (0, 1]: "
            + "; ".join(report.messages),
            report,
        )
    eq = equilibria(params)

    result = quad(
        lambda x: math.log(rate_ratio(params, x)),
        0.0,
        eq.x_plus,
        epsabs=_QUAD_ABS_TOL,
        epsrel=1e-10,
        limit=200,
        full_output=1,
    )
    if len(result) > 3:
        raise QuadratureError(f"quadrature did not converge: {result[3]}")
    value, abserr = float(result[0]), float(result[1])
    if abserr > 1e-8:
        raise QuadratureError(f"quadrature error estimate {abserr:.3e} above budget")

    if value < -critical_tol:
        classification = EXTINCTION
    elif value > critical_tol:
        classification = PERSISTENCE
    else:
        classification = CRITICAL
    return ThresholdReport(value, classification, float(critical_tol), eq.x_plus)


def discrete_markov_exponent(params: ModelParams, capacity_n: int | None = None) -> float:
    """(1/N) log(p_{i+} / p_0), the finite-capacity exponent.

    Uses log weights directly, so the normalization never enters. Converges
    to the markov_exponent integral as the capacity grows.

    Raises:
        UnimodalProfileError: the profile has no interior mode to anchor i+.
    """
    p = params if capacity_n is None else params.with_capacity(int(capacity_n))
    dist = psd_product(p)
    profile = mode_profile(dist)
    if profile.i_plus is None:
        raise UnimodalProfileError(
            f"no interior mode at capacity {p.capacity_n}; the discrete exponent is undefined"
        )
    return float(dist.log_weights[profile.i_plus] - dist.log_weights[0]) / p.capacity_n


def limit_distribution_diagnostic(
    params: ModelParams,
    n_list,
    epsilon: float,
    *,
    critical_tol: float = DEFAULT_CRITICAL_TOL,
) -> ConvergenceDiagnostic:
    """Exact stationary tail masses along a capacity sweep.

    The regime (which tail to sum) follows the sign classification of the
    integral. A critical classification cannot choose a branch; it warns
    and falls back to the extinction tail.

    Args:
        params: model constants; immigration must be a constant schedule so
            capacities can be resized.
        n_list: capacities to sweep, each >= 2.
        epsilon: tail threshold; the extinction branch requires
            0 < epsilon < x_minus so the tail excludes the extinction
            cluster itself, the persistence branch 0 < epsilon < 1.
    """
    report = markov_exponent(params, critical_tol=critical_tol)
    regime = report.classification
    if regime == CRITICAL:
        warnings.warn(
            "classification is critical; reporting extinction-branch tails",
            RuntimeWarning,
            stacklevel=2,
        )
        regime = EXTINCTION
    eq = equilibria(params)
    if regime == EXTINCTION and not 0.0 < epsilon < eq.x_minus:
        raise ValueError(
            f"extinction-branch epsilon must lie in (0, x_minus = {eq.x_minus:.6g})"
        )
    if regime == PERSISTENCE and not 0.0 < epsilon < 1.0:
        raise ValueError("persistence-branch epsilon must lie in (0, 1)")

    rows = []
    for n in n_list:
        n = int(n)
        p = params.with_capacity(n)
        dist = psd_product(p)
        density = np.arange(n + 1) / n
        if regime == EXTINCTION:
            tail = float(dist.probs[density > epsilon].sum())
        else:
            tail = float(dist.probs[np.abs(density - eq.x_plus) > epsilon].sum())
        profile = mode_profile(dist)
        if profile.i_plus is None:
            raise UnimodalProfileError(f"no interior mode at capacity {n}")
        exponent = float(dist.log_weights[profile.i_plus] - dist.log_weights[0]) / n
        rows.append((n, tail, exponent))
    return ConvergenceDiagnostic(tuple(rows), regime, float(epsilon))
