"""Lower-bound machinery: SDPI constants, Assouad bounds and information budgets.

Corollary bounds are reported in a constant-free form (all unspecified
absolute constants set to one). The Bernoulli corollary additionally carries a
fully instantiated value obtained by optimizing the separation in the
hypercube construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

LOSSES = ("squared", "absolute")


@dataclass(frozen=True)
class SdpiEstimate:
    """Upper bound beta on the SDPI constant and the log-likelihood-ratio bound b."""

    beta: float
    llr_bound: float

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if not self.llr_bound >= 0:
            raise ValueError("llr_bound must be nonnegative")
        if self.llr_bound == 0.0 and self.beta != 0.0:
            raise ValueError("identical pairs must have beta = 0")


@dataclass(frozen=True)
class SeparationSpec:
    """Hamming separation delta_sep over the hypercube {-1, 1}^dimension."""

    delta_sep: float
    dimension: int

    def __post_init__(self):
        if not self.delta_sep > 0:
            raise ValueError("delta_sep must be positive")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")


@dataclass
class LowerBoundReport:
    """An evaluated lower bound with its ingredients.

    ``risk_bound`` is the constant-free scaling form. ``instantiated`` holds a
    value with every constant pinned down, when one is available, and
    ``testing_bound`` the Assouad testing bound it was built from (None for
    forms that are not evaluated through one).
    """

    setting: str
    formula_id: str
    ingredients: dict
    testing_bound: Optional[float]
    risk_bound: float
    instantiated: Optional[float] = None

    def __post_init__(self):
        if self.risk_bound < 0:
            raise ValueError("risk bound must be nonnegative")
        if self.testing_bound is not None:
            d = self.ingredients.get("d", math.inf)
            if not 0 <= self.testing_bound <= d + 1e-12:
                raise ValueError("testing bound must lie in [0, d]")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "LowerBoundReport":
        return cls(**data)


def sdpi_bounded_likelihood(llr_bound: float) -> SdpiEstimate:
    """beta <= 2 (e^b - 1)^2, clamped to 1."""
    if llr_bound < 0:
        raise ValueError("llr_bound must be nonnegative")
    return SdpiEstimate(min(2.0 * math.expm1(llr_bound) ** 2, 1.0), float(llr_bound))


def sdpi_bernoulli_pair(delta: float) -> SdpiEstimate:
    """SDPI bound for Ber(1/2) against Ber((1 + delta)/2)."""
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    beta = 2.0 * delta**2 / (1.0 - delta) ** 2
    return SdpiEstimate(min(beta, 1.0), -math.log1p(-delta))


def bernoulli_pair(delta: float):
    """Distributions over {0, 1} for Ber(1/2) and Ber((1 + delta)/2)."""
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    return np.array([0.5, 0.5]), np.array([(1.0 - delta) / 2.0, (1.0 + delta) / 2.0])


def assouad_testing_bound(d: int, sdpi: SdpiEstimate, info_budget: float, slack: float = 0.0) -> float:
    """Lower bound on the summed coordinate testing error.

    (d/2) (1 - sqrt(7 (e^b + 1) beta info / d) - slack), floored at zero.
    """
    if d < 1 or info_budget < 0 or not 0.0 <= slack <= 1.0:
        raise ValueError("need d >= 1, info_budget >= 0 and slack in [0, 1]")
    radicand = 7.0 * (math.exp(sdpi.llr_bound) + 1.0) * sdpi.beta * info_budget / d
    return max(0.5 * d * (1.0 - math.sqrt(radicand) - slack), 0.0)


def assouad_minimax_bound(sep: SeparationSpec, testing_bound: float) -> float:
    """Minimax risk bound delta_sep times the testing bound."""
    if not 0.0 <= testing_bound <= sep.dimension + 1e-12:
        raise ValueError("testing bound must lie in [0, d]")
    return sep.delta_sep * testing_bound


def info_budget_full_interactive(n: int, epsilon_kl: float) -> float:
    """I(X_{<=n}; Z | V) <= n eps_kl."""
    if n < 1 or epsilon_kl < 0:
        raise ValueError("need n >= 1 and epsilon_kl >= 0")
    return n * epsilon_kl


def info_budget_approx_dp(n: int, epsilon: float) -> float:
    """I(X_{<=n}; Z | V) <= n min{9 eps, 75 eps^2} for regular (eps, delta) pairs."""
    if n < 1 or epsilon < 0:
        raise ValueError("need n >= 1 and epsilon >= 0")
    return n * min(9.0 * epsilon, 75.0 * epsilon**2)


def binary_entropy(p: float) -> float:
    """h2(p) in nats."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log1p(-p)


@dataclass(frozen=True)
class EtaBound:
    """Per-sample information bounds; None marks an unavailable display."""

    p_eta: float
    first: Optional[float]
    second: Optional[float]

    @property
    def best(self) -> Optional[float]:
        vals = [v for v in (self.first, self.second) if v is not None]
        return min(vals) if vals else None


def info_bound_eta(epsilon: float, delta: float, eta: float, alphabet_size: int) -> EtaBound:
    """Both per-sample (eps, delta) information displays with free parameter eta."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    if not epsilon > 0 or delta < 0 or alphabet_size < 2:
        raise ValueError("need epsilon > 0, delta >= 0 and alphabet_size >= 2")
    e1 = math.expm1(epsilon)
    e3 = math.expm1(3.0 * epsilon)
    p = 2.0 * (delta / eta + eta * (e3 + 1.0) / e3 + delta * (e1 + 1.0) / e1)
    logx = math.log(alphabet_size)
    if p > 1.0:
        return EtaBound(p, None, None)
    tail = p * logx + binary_entropy(p)
    first = 6.0 * epsilon + tail
    second = None
    if eta * (2.0 * math.exp(6.0 * epsilon) / e3 + 1.0) <= 0.5:
        second = (
            6.0 * epsilon * math.expm1(6.0 * epsilon)
            + 3.0 * eta * (math.exp(3.0 * epsilon) + 3.0 * eta * math.exp(12.0 * epsilon) / e3**2)
            + tail
        )
    return EtaBound(p, first, second)


def braverman_hellinger_bound(sdpi: SdpiEstimate, info: float) -> float:
    """Squared Hellinger bound (7/2)(e^b + 1) beta info, clamped to 1."""
    if info < 0:
        raise ValueError("info must be nonnegative")
    return min(3.5 * (math.exp(sdpi.llr_bound) + 1.0) * sdpi.beta * info, 1.0)


def _loss(t: float, loss: str) -> float:
    if loss == "squared":
        return t * t
    if loss == "absolute":
        return abs(t)
    raise ValueError(f"unknown loss {loss!r}; expected one of {LOSSES}")


def bernoulli_instantiated(n: int, d: int, epsilon_kl: float, loss: str = "squared", slack: float = 0.0):
    """Optimize the hypercube construction over the mean gap delta.

    Coordinates are Ber(1/2) or Ber((1 + delta)/2); a mis-signed coordinate
    costs at least loss(delta/4), half the gap between the two means. Returns
    ``(best_delta, bound)``.
    """
    info = info_budget_full_interactive(n, epsilon_kl)

    def value(delta):
        t = assouad_testing_bound(d, sdpi_bernoulli_pair(delta), info, slack)
        return _loss(delta / 4.0, loss) * t

    grid = np.linspace(1e-6, 1.0 - 1e-6, 2001)
    vals = np.array([value(x) for x in grid])
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda x: -value(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    if -res.fun >= vals[i]:
        return float(res.x), float(-res.fun)
    return float(grid[i]), float(vals[i])


def corollary_bernoulli_bound(n: int, d: int, epsilon_kl: float, loss: str = "squared") -> LowerBoundReport:
    """d * loss(sqrt(d / (n eps_kl)) ∧ 1), plus the instantiated construction."""
    if n < 1 or d < 1 or not epsilon_kl > 0:
        raise ValueError("need n, d >= 1 and epsilon_kl > 0")
    scale = min(math.sqrt(d / (n * epsilon_kl)), 1.0)
    scaling = d * _loss(scale, loss)
    best_delta, inst = bernoulli_instantiated(n, d, epsilon_kl, loss)
    sdpi = sdpi_bernoulli_pair(best_delta)
    info = info_budget_full_interactive(n, epsilon_kl)
    return LowerBoundReport(
        setting="bernoulli",
        formula_id="corollary-bernoulli",
        ingredients={
            "n": n,
            "d": d,
            "epsilon_kl": epsilon_kl,
            "loss": loss,
            "delta_sep": _loss(best_delta / 4.0, loss),
            "mean_gap": best_delta,
            "beta": sdpi.beta,
            "llr_bound": sdpi.llr_bound,
            "info_budget": info,
        },
        testing_bound=assouad_testing_bound(d, sdpi, info),
        risk_bound=scaling,
        instantiated=inst,
    )


def corollary_gaussian_bound(n: int, d: int, sigma2: float, epsilon_kl: float) -> LowerBoundReport:
    """min{d, max{(d / eps_kl)(d sigma^2 / n), d sigma^2 / n}}."""
    if n < 1 or d < 1 or not sigma2 > 0 or not epsilon_kl > 0:
        raise ValueError("inputs must be positive")
    base = d * sigma2 / n
    value = min(float(d), max(d / epsilon_kl * base, base))
    return LowerBoundReport(
        setting="gaussian",
        formula_id="corollary-gaussian",
        ingredients={"n": n, "d": d, "sigma2": sigma2, "epsilon_kl": epsilon_kl, "c": 1.0},
        testing_bound=None,
        risk_bound=value,
    )


def corollary_sparse_gaussian_bound(n: int, d: int, k: int, sigma2: float, epsilon_kl: float) -> LowerBoundReport:
    """min{k, max{(d / eps_kl)(k sigma^2 / n), k sigma^2 log(d/k) / n}}."""
    if n < 1 or k < 1 or not sigma2 > 0 or not epsilon_kl > 0:
        raise ValueError("inputs must be positive")
    if d < 2 * k:
        raise ValueError(f"sparse bound needs d >= 2k, got d={d}, k={k}")
    private = d / epsilon_kl * k * sigma2 / n
    classical = k * sigma2 * math.log(d / k) / n
    value = min(float(k), max(private, classical))
    return LowerBoundReport(
        setting="sparse_gaussian",
        formula_id="corollary-sparse-gaussian",
        ingredients={"n": n, "d": d, "k": k, "sigma2": sigma2, "epsilon_kl": epsilon_kl, "c": 1.0},
        testing_bound=None,
        risk_bound=value,
    )


def corollary_logistic_bound(n: int, d: int, epsilon_kl: float) -> LowerBoundReport:
    """Large-n excess logistic risk scaling d^2 / (n eps_kl)."""
    if n < 1 or d < 1 or not epsilon_kl > 0:
        raise ValueError("inputs must be positive")
    return LowerBoundReport(
        setting="logistic",
        formula_id="corollary-logistic",
        ingredients={"n": n, "d": d, "epsilon_kl": epsilon_kl, "c": 1.0},
        testing_bound=None,
        risk_bound=d * d / (n * epsilon_kl),
    )
