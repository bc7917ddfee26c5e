"""Degree distributions: histograms, cumulative tails, power-law and exponential fits.

The power-law exponent is the exact discrete maximum-likelihood estimate,
maximizing ``-gamma * sum(ln k) - n * ln zeta(gamma, xmin)`` over the tail
``k >= xmin``.  Goodness of fit is the KS distance between the empirical and
fitted CDFs, with a semiparametric bootstrap p-value.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Any, Literal

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from svcnet.errors import FitError, MetricUndefined
from svcnet.network import InteractionNetwork
from svcnet.util import ordered_map

__all__ = [
    "DegreeDistributionFit",
    "ExponentialFit",
    "PowerLawFit",
    "cumulative_degree_series",
    "cumulative_tail",
    "degree_sequence",
    "fit_degree_distribution",
    "fit_exponential",
    "fit_power_law",
    "power_law_cdf",
    "sample_power_law",
]

Which = Literal["in", "out", "total"]

MIN_TAIL = 10
_GAMMA_BOUNDS = (1.0 + 1e-9, 50.0)
_TABLE = 100_000


def degree_sequence(net: InteractionNetwork, which: Which = "total") -> np.ndarray:
    if which == "in":
        return net.in_degrees()
    if which == "out":
        return net.out_degrees()
    if which == "total":
        return net.in_degrees() + net.out_degrees()
    raise ValueError(f"which must be 'in', 'out' or 'total', not {which!r}")


def histogram(degrees: np.ndarray) -> list[tuple[int, int]]:
    ks, counts = np.unique(np.asarray(degrees, dtype=np.int64), return_counts=True)
    return list(zip(ks.tolist(), counts.tolist()))


def cumulative_tail(degrees: np.ndarray) -> list[tuple[int, float]]:
    """``[(k, P(K >= k))]`` for every observed degree, ascending in ``k``."""
    degrees = np.asarray(degrees, dtype=np.int64)
    if degrees.size == 0:
        raise MetricUndefined("empty degree sequence")
    ks, counts = np.unique(degrees, return_counts=True)
    geq = np.cumsum(counts[::-1])[::-1]
    return [(int(k), float(c) / degrees.size) for k, c in zip(ks, geq)]


def cumulative_degree_series(net: InteractionNetwork, which: Which = "total") -> list[tuple[int, float]]:
    return cumulative_tail(degree_sequence(net, which))


def series_csv(series: list[tuple[int, float]]) -> str:
    return "k,p_geq_k\n" + "".join(f"{k},{p!r}\n" for k, p in series)


# -- power law -------------------------------------------------------------


def power_law_cdf(k: np.ndarray | float, gamma: float, xmin: int) -> np.ndarray:
    """``P(K <= k)`` of the discrete power law on ``k >= xmin``."""
    k = np.asarray(k, dtype=float)
    return 1.0 - zeta(gamma, k + 1.0) / zeta(gamma, xmin)


def _mle_gamma(tail: np.ndarray, xmin: int) -> float:
    n = tail.size
    sum_log = float(np.log(tail).sum())

    def nll(g: float) -> float:
        return g * sum_log + n * np.log(zeta(g, xmin))

    res = minimize_scalar(nll, bounds=_GAMMA_BOUNDS, method="bounded", options={"xatol": 1e-10})
    return float(res.x)


def _ks(tail: np.ndarray, cdf) -> float:
    """Exact KS distance between the empirical CDF of integer data and a model CDF.

    Both are right-continuous steps on the integers, so the supremum is
    reached at an observed value or just before the next one.
    """
    ks, counts = np.unique(tail, return_counts=True)
    emp = np.cumsum(counts) / tail.size
    at = cdf(ks)
    # flat stretches: after ks[i] up to ks[i+1]-1, and below the first value
    flat_model = cdf(np.append(ks[1:] - 1, ks[0] - 1))
    flat_emp = np.append(emp[:-1], 0.0)
    d = max(np.abs(emp - at).max(), np.abs(flat_emp - flat_model).max())
    return float(d)


def _tail(degrees: np.ndarray, xmin: int) -> np.ndarray:
    if xmin < 1:
        raise FitError("xmin must be >= 1")
    tail = np.asarray(degrees, dtype=np.int64)
    tail = tail[tail >= xmin]
    if tail.size < MIN_TAIL:
        raise FitError(f"only {tail.size} values >= xmin={xmin}; need {MIN_TAIL}")
    if np.unique(tail).size < 2:
        raise FitError("degenerate tail: all values equal")
    return tail


def _power_law_ks(degrees: np.ndarray, xmin: int) -> tuple[float, float, int]:
    tail = _tail(degrees, xmin)
    g = _mle_gamma(tail.astype(float), xmin)
    return g, _ks(tail, lambda k: power_law_cdf(k, g, xmin)), tail.size


def select_xmin(degrees: np.ndarray) -> int:
    """Candidate xmin minimizing the KS distance (ties: smallest xmin)."""
    best: tuple[float, int] | None = None
    for x in np.unique(np.asarray(degrees, dtype=np.int64)):
        if x < 1:
            continue
        try:
            _, d, _ = _power_law_ks(degrees, int(x))
        except FitError:
            continue
        if best is None or d < best[0]:
            best = (d, int(x))
    if best is None:
        raise FitError("no xmin candidate leaves a usable tail")
    return best[1]


@lru_cache(maxsize=8)
def _cdf_table(gamma: float, xmin: int) -> tuple[np.ndarray, np.ndarray]:
    ks = np.arange(xmin, xmin + _TABLE, dtype=float)
    cdf = power_law_cdf(ks, gamma, xmin)
    ks.flags.writeable = cdf.flags.writeable = False
    return ks, cdf


def sample_power_law(n: int, gamma: float, xmin: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws from the discrete power law.

    Exact up to ``xmin + 100000``; beyond that the continuous approximation
    of the conditional tail is used.
    """
    ks, cdf = _cdf_table(float(gamma), int(xmin))
    u = rng.random(n)
    idx = np.searchsorted(cdf, u, side="left")
    out = np.empty(n, dtype=np.int64)
    inside = idx < _TABLE
    out[inside] = ks[idx[inside]].astype(np.int64)
    over = ~inside
    if over.any():
        v = rng.random(int(over.sum()))
        start = xmin + _TABLE - 0.5
        big = np.floor(start * (1.0 - v) ** (-1.0 / (gamma - 1.0)) + 0.5)
        out[over] = np.minimum(big, 1e15).astype(np.int64)
    return out


@dataclass(frozen=True)
class PowerLawFit:
    gamma: float
    xmin: int
    n_tail: int
    ks_statistic: float
    ks_p_value: float | None
    bootstrap_n: int
    xmin_selected: bool


def _bootstrap_replicate(args) -> float:
    degrees_body, n, n_tail, gamma, xmin, select, seed, i = args
    rng = np.random.default_rng([seed, i])
    m_tail = int(rng.binomial(n, n_tail / n))
    parts = [sample_power_law(m_tail, gamma, xmin, rng)]
    if n - m_tail:
        parts.append(rng.choice(degrees_body, size=n - m_tail) if degrees_body.size else np.full(n - m_tail, xmin))
    synth = np.concatenate(parts)
    try:
        x = select_xmin(synth) if select else xmin
        return _power_law_ks(synth, x)[1]
    except FitError:
        return float("inf")  # an unfittable replicate counts as at least as extreme


def fit_power_law(
    degrees: np.ndarray,
    xmin: int | None = 1,
    bootstrap_n: int = 100,
    seed: int = 0,
) -> PowerLawFit:
    """Discrete power-law MLE on ``degrees >= xmin``.

    ``xmin=None`` selects xmin by KS minimization (and re-selects it in
    every bootstrap replicate).  The p-value is the fraction of bootstrap
    replicates whose KS distance is at least the observed one.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    select = xmin is None
    x = select_xmin(degrees) if select else int(xmin)
    gamma, d, n_tail = _power_law_ks(degrees, x)
    p = None
    if bootstrap_n > 0:
        body = degrees[degrees < x]
        jobs = [(body, degrees.size, n_tail, gamma, x, select, seed, i) for i in range(bootstrap_n)]
        reps = np.array(ordered_map(_bootstrap_replicate, jobs))
        p = float((reps >= d).mean())
    return PowerLawFit(gamma, x, n_tail, d, p, bootstrap_n, select)


# -- exponential -----------------------------------------------------------


@dataclass(frozen=True)
class ExponentialFit:
    rate: float
    xmin: int
    n_tail: int
    ks_statistic: float


def fit_exponential(degrees: np.ndarray, xmin: int = 1) -> ExponentialFit:
    """Shifted-exponential MLE ``rate = 1 / (mean(k) - xmin)`` on ``k >= xmin``."""
    tail = _tail(degrees, xmin)
    rate = 1.0 / (float(tail.mean()) - xmin)
    d = _ks(tail, lambda k: np.maximum(0.0, 1.0 - np.exp(-rate * (np.asarray(k, dtype=float) - xmin))))
    return ExponentialFit(rate, xmin, tail.size, d)


@dataclass(frozen=True)
class DegreeDistributionFit:
    which: str
    histogram_in: list[tuple[int, int]]
    histogram_out: list[tuple[int, int]]
    histogram_total: list[tuple[int, int]]
    cumulative: list[tuple[int, float]]
    power_law: PowerLawFit | None
    exponential: ExponentialFit | None
    errors: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def fit_degree_distribution(
    net: InteractionNetwork,
    which: Which = "total",
    xmin: int | None = 1,
    bootstrap_n: int = 100,
    seed: int = 0,
) -> DegreeDistributionFit:
    """Histograms, cumulative tail and both fits for one network.

    A fit that cannot be made is recorded in ``errors`` and left as ``None``.
    """
    degrees = degree_sequence(net, which)
    errors: dict[str, str] = {}
    try:
        pl = fit_power_law(degrees, xmin, bootstrap_n, seed)
    except FitError as exc:
        pl, errors["power_law"] = None, str(exc)
    try:
        expo = fit_exponential(degrees, pl.xmin if pl is not None else (xmin or 1))
    except FitError as exc:
        expo, errors["exponential"] = None, str(exc)
    return DegreeDistributionFit(
        which=which,
        histogram_in=histogram(net.in_degrees()),
        histogram_out=histogram(net.out_degrees()),
        histogram_total=histogram(net.in_degrees() + net.out_degrees()),
        cumulative=cumulative_tail(degrees) if degrees.size else [],
        power_law=pl,
        exponential=expo,
        errors=errors,
    )
