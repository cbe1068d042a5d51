"""Strategy parameters: selection weights, learning rates, clip thresholds.

All values derive from the search-space dimension and the population size;
only the population size is meant to be chosen by the user.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidDimension


def expected_norm(n: int) -> float:
    """E||N(0,I)|| for dimension n, via sqrt(n)(1 - 1/(4n) + 1/(21n^2)).

    The exact value is sqrt(2) * Gamma((n+1)/2) / Gamma(n/2); the
    approximation is accurate to ~3e-4 relative at n=1 and improves fast.
    """
    if n < 1:
        raise InvalidDimension(f"dimension must be >= 1, got {n}")
    return math.sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n))


def clip_threshold(n: int) -> float:
    """Mahalanobis-norm cap for injected single steps: sqrt(n) + 2n/(n+2)."""
    return math.sqrt(n) + 2.0 * n / (n + 2.0)


def clip_threshold_mean(n: int) -> float:
    """Mahalanobis-norm cap for the mean shift: sqrt(2n) + 2n/(n+2)."""
    return math.sqrt(2.0 * n) + 2.0 * n / (n + 2.0)


@dataclass
class StrategyParameters:
    n: int
    lam: int
    mu: int
    weights: np.ndarray
    mu_w: float
    c_sigma: float
    d_sigma: float
    c_c: float
    c_1: float
    c_mu: float
    c_m: float
    alpha_cov: float
    c_y: float
    c_ym: float
    delta_sigma_max: float
    expected_norm: float

    def with_overrides(self, **kwargs: float) -> "StrategyParameters":
        """Copy with selected fields replaced (c_y, c_ym, delta_sigma_max, ...)."""
        return replace(self, **kwargs)


def default_parameters(
    n: int,
    lam: int | None = None,
    alpha_cov: float = 2.0,
    delta_sigma_max: float = 1.0,
) -> StrategyParameters:
    """Default parameter table for dimension n and population size lam.

    lam defaults to 4 + floor(3 ln n); weights are the positive log-rank
    weights normalized to sum 1.  alpha_cov can be lowered (e.g. 0.5) for
    noisy problems; delta_sigma_max caps the per-iteration log step-size
    increase (1.0 by default, 0.6 is the conservative variant).
    """
    if n < 1:
        raise InvalidDimension(f"dimension must be >= 1, got {n}")
    if lam is None:
        lam = 4 + int(math.floor(3.0 * math.log(n)))
    if lam < 2:
        raise InvalidDimension(f"population size must be >= 2, got {lam}")
    mu = lam // 2
    raw = np.log((lam + 1) / 2.0) - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mu_w = 1.0 / float(np.sum(weights**2))

    c_sigma = (mu_w + 2.0) / (n + mu_w + 3.0)
    d_sigma = 1.0 + c_sigma + 2.0 * max(0.0, math.sqrt((mu_w - 1.0) / (n + 1.0)) - 1.0)
    c_c = 4.0 / (n + 4.0)
    c_1 = alpha_cov * min(1.0, lam / 6.0) / ((n + 1.3) ** 2 + mu_w)
    c_mu = min(
        1.0 - c_1,
        alpha_cov * (mu_w - 2.0 + 1.0 / mu_w) / ((n + 2.0) ** 2 + alpha_cov * mu_w / 2.0),
    )

    params = StrategyParameters(
        n=n,
        lam=lam,
        mu=mu,
        weights=weights,
        mu_w=mu_w,
        c_sigma=c_sigma,
        d_sigma=d_sigma,
        c_c=c_c,
        c_1=c_1,
        c_mu=c_mu,
        c_m=1.0,
        alpha_cov=alpha_cov,
        c_y=clip_threshold(n),
        c_ym=clip_threshold_mean(n),
        delta_sigma_max=delta_sigma_max,
        expected_norm=expected_norm(n),
    )
    _check(params)
    return params


def _check(p: StrategyParameters) -> None:
    assert abs(float(p.weights.sum()) - 1.0) < 1e-12
    assert np.all(p.weights > 0)
    assert 1.0 - 1e-12 <= p.mu_w <= p.mu + 1e-12
    assert p.c_1 + p.c_mu <= 1.0 + 1e-12
    for rate in (p.c_sigma, p.c_c, p.c_1, p.c_m):
        assert 0.0 < rate <= 1.0
    # c_mu degenerates to 0 at mu_w == 1 (lam in {2, 3})
    assert 0.0 <= p.c_mu <= 1.0
