"""Binomial tails, Chernoff bounds and confidence intervals."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import binomtest, norm


def binomial_tail(n: int, p: float, delta: float) -> float:
    """Exact Pr[Bin(n, p) <= delta*n*p], summed in log space."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    # tolerance keeps e.g. 0.2*10*0.5 from flooring below 1
    top = math.floor(delta * n * p + 1e-9)
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return 1.0 if top >= n else 0.0
    i = np.arange(0, min(top, n) + 1, dtype=np.float64)
    logs = (gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1)
            + i * math.log(p) + (n - i) * math.log1p(-p))
    return float(min(1.0, math.exp(logsumexp(logs))))


def lower_tail_hypothesis(delta: float) -> bool:
    """(e^2/delta)^delta * e^(-1+delta) <= e^(-0.7), compared in log form."""
    return delta * (2.0 - math.log(delta)) - 1.0 + delta <= -0.7


def chernoff_lower(mu: float, a: float) -> float:
    """Bound on Pr[X < (1-a) mu]."""
    return math.exp(-a * a * mu / 2.0)


def chernoff_upper(mu: float, a: float) -> float:
    """Bound on Pr[X > (1+a) mu], valid for 0 < a < 3/2."""
    if not 0 < a < 1.5:
        raise ValueError("upper Chernoff bound needs 0 < a < 3/2")
    return math.exp(-a * a * mu / 3.0)


def wilson(successes: int, trials: int, confidence: float = 0.99):
    """Wilson score interval; (0, 1) when there are no trials."""
    if trials <= 0:
        return 0.0, 1.0
    ci = binomtest(int(successes), int(trials)).proportion_ci(confidence_level=confidence,
                                                             method="wilson")
    return float(ci.low), float(ci.high)


def mean_ci(values, confidence: float = 0.99):
    """Normal-approximation interval for the mean of paired differences."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return 0.0, -math.inf, math.inf
    m = float(x.mean())
    if x.size == 1:
        return m, -math.inf, math.inf
    half = norm.ppf(0.5 + confidence / 2) * float(x.std(ddof=1)) / math.sqrt(x.size)
    return m, m - half, m + half
