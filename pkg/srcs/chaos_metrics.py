"""
Shannon entropy of measurement records and the rate of information production.

Entropies are in bits. H_n is the entropy of the distribution over all
length-n histories; the endpoint estimator H_N / N approximates the
asymptotic rate, which in turn bounds the average algorithmic information
rate from below.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import entr
from scipy.stats import linregress

from srcs.measurement_record import history_distribution

NEGATIVE_TOL = 1e-12
SUM_TOL = 1e-9
FLAT_TOL = 1e-12
LN2 = math.log(2.0)

ENDPOINT = "endpoint"
SLOPE = "slope"
RATE_METHODS = (ENDPOINT, SLOPE)


@dataclass(frozen=True, eq=False)
class EntropySeries:
    """H_1 .. H_N in bits with the cumulative pruned mass at each depth."""

    values: np.ndarray
    pruned_mass: list = field(default_factory=list)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        if not self.pruned_mass:
            object.__setattr__(self, "pruned_mass", [0.0] * len(values))
        elif len(self.pruned_mass) != len(values):
            raise ValueError("pruned_mass must have one entry per depth")

    def __len__(self):
        return self.values.shape[0]

    @property
    def depths(self):
        return np.arange(1, len(self) + 1)


@dataclass(frozen=True)
class RateEstimate:
    """Rate of Shannon information production, bits per measurement."""

    r_tilde: float
    n_used: int
    method: str


@dataclass(frozen=True)
class BoundReport:
    """Lower bound on the average algorithmic information rate."""

    r_tilde: float
    degenerate: bool
    text: str


def _as_probabilities(dist):
    if hasattr(dist, "probabilities"):
        return np.asarray(dist.probabilities, dtype=float), getattr(dist, "pruned_mass", 0.0)
    if isinstance(dist, dict):
        return np.fromiter(dist.values(), dtype=float), 0.0
    return np.asarray(dist, dtype=float).ravel(), 0.0


def shannon_entropy(dist):
    """
    -sum p log2 p with 0 log 0 = 0.

    Accepts a HistoryDistribution, a dict of probabilities or a plain array.
    A distribution that reports pruned mass is renormalized over the
    surviving branches first.

    Raises:
        ValueError: a probability below -1e-12 or a total above 1 + 1e-9
    """
    p, pruned_mass = _as_probabilities(dist)
    if p.size == 0:
        return 0.0
    if np.any(p < -NEGATIVE_TOL):
        raise ValueError(f"Negative probability {p.min():.3e} in distribution")
    p = np.clip(p, 0.0, None)

    total = math.fsum(p)
    if total > 1.0 + SUM_TOL:
        raise ValueError(f"Probabilities sum to {total:.15g} > 1")
    if pruned_mass > 0.0 and total > 0.0:
        p = p / total

    return max(math.fsum(entr(p)) / LN2, 0.0)


def entropy_series(psi0, U, scheme, N, prune_eps=0.0, workers=1):
    """H_n for n = 1..N from the exact history distributions."""
    distributions = history_distribution(psi0, U, scheme, N, prune_eps, workers)
    return series_from_distributions(distributions)


def series_from_distributions(distributions):
    """Builds an EntropySeries from per-depth distributions (depth 1 first)."""
    return EntropySeries(
        values=[shannon_entropy(d) for d in distributions],
        pruned_mass=[float(d.pruned_mass) for d in distributions],
    )


def _second_half(series):
    start = len(series) // 2
    return series.depths[start:], series.values[start:]


def rate_estimate(series, method=ENDPOINT):
    """
    Estimates the rate of information production.

    endpoint: H_N / N. slope: least-squares slope of H_n against n over the
    second half of the series (falls back to endpoint with fewer than two
    points there).

    Returns:
        RateEstimate
    """
    if len(series) == 0:
        raise ValueError("Cannot estimate a rate from an empty series")
    if method not in RATE_METHODS:
        raise ValueError(f"Unknown rate method {method!r}; expected one of {RATE_METHODS}")

    N = len(series)
    if method == SLOPE:
        n, h = _second_half(series)
        if len(n) >= 2:
            value = linregress(n, h).slope
            return RateEstimate(float(np.clip(value, 0.0, 1.0)), len(n), SLOPE)

    value = series.values[-1] / N
    return RateEstimate(float(np.clip(value, 0.0, 1.0)), N, ENDPOINT)


def rate_lower_bound_report(r):
    """Turns a rate estimate into the statement R_bar >= r_tilde."""
    degenerate = r.r_tilde <= 0.0
    text = f"R̄ ≥ {r.r_tilde:g} bits/measurement"
    if degenerate:
        text += " (degenerate bound: the record carries no information)"
    return BoundReport(r_tilde=r.r_tilde, degenerate=degenerate, text=text)


def linearity_diagnostic(series):
    """
    Coefficient of determination of a straight-line fit to the second half of H_n.

    A series with zero variance there counts as perfectly linear (1.0).
    """
    if len(series) < 6:
        raise ValueError(f"Linearity diagnostic needs at least 6 points, got {len(series)}")
    n, h = _second_half(series)
    if np.ptp(h) < FLAT_TOL:
        return 1.0
    return float(linregress(n, h).rvalue ** 2)


def information_increments(series):
    """h_n = H_n - H_{n-1} with H_0 = 0: information gained per measurement."""
    return np.diff(series.values, prepend=0.0)


def conditional_entropy(parent, child):
    """
    Average entropy of the next outcome given the history so far.

    sum_h P(h) H(children of h | h), so that H(child) = H(parent) + result.
    """
    if child.depth != parent.depth + 1:
        raise ValueError(f"Child depth {child.depth} must be parent depth {parent.depth} + 1")

    parent_of_child = child.keys >> np.uint64(1)
    index = np.searchsorted(parent.keys, parent_of_child)
    weights = parent.probabilities[index]

    # p(child) log(p(child)/p(parent)) summed over children
    ratio = np.divide(child.probabilities, weights, out=np.zeros_like(child.probabilities), where=weights > 0)
    terms = weights * entr(ratio)
    return max(math.fsum(terms) / LN2, 0.0)
