"""Estimators that consume private releases.

Covers Bernoulli means, Gaussian location (one coordinate or a vector), the
two-stage sparse estimator, the correlated-bit estimator and a moment-based
estimator for the two-class logistic model.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit, ndtr, ndtri

from .mechanisms import as_generator, rr_scale, rr_sign_mechanism, stack_releases

FAMILIES = ("bernoulli", "gaussian", "sparse_gaussian", "correlated", "logistic")
MAX_LOGISTIC_DIM = 16


class UnsampledCoordinateWarning(RuntimeWarning):
    """A coordinate received no releases; its estimate defaults to zero."""


@dataclass
class ProblemSpec:
    """Statistical problem: family, dimensions and true parameter."""

    family: str
    d: int
    n: int
    theta: np.ndarray
    sigma: float = 1.0
    k: Optional[int] = None
    b_vector: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.d < 1 or self.n < 1:
            raise ValueError("d and n must be positive")
        theta = np.asarray(self.theta, dtype=float)
        if theta.ndim == 0:
            theta = np.full(self.d, float(theta))
        if theta.shape != (self.d,):
            raise ValueError(f"theta must have length d={self.d}")
        self.theta = theta
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.family == "bernoulli" and (theta.min() < 0 or theta.max() > 1):
            raise ValueError("Bernoulli means must lie in [0, 1]")
        if self.family in ("gaussian", "sparse_gaussian", "correlated", "logistic") and np.abs(theta).max() > 1:
            raise ValueError("theta entries must lie in [-1, 1]")
        if self.family == "sparse_gaussian":
            if self.k is None:
                self.k = int(np.count_nonzero(theta)) or 1
            if not 1 <= self.k <= self.d:
                raise ValueError("need 1 <= k <= d")
            if np.count_nonzero(theta) > self.k:
                raise ValueError("theta has more than k nonzero entries")
        if self.family == "correlated":
            if self.b_vector is None:
                raise ValueError("correlated family needs b_vector")
            b = np.asarray(self.b_vector, dtype=float)
            if b.shape != (self.d,) or not np.all(np.abs(b) == 1):
                raise ValueError("b_vector must be a length-d sign vector")
            self.b_vector = b
            if np.ptp(theta * b) > 1e-12:
                raise ValueError("correlated theta must equal b * (2p - 1) for a single p")

    @property
    def sigma2(self) -> float:
        return self.sigma**2

    @property
    def p(self) -> float:
        """Success probability of the shared bit (correlated family)."""
        return 0.5 * (1.0 + float(self.theta[0] * self.b_vector[0]))

    def sample(self, rng, n: Optional[int] = None):
        """Draw n raw observations from the model (n defaults to self.n)."""
        n = self.n if n is None else n
        gen = as_generator(rng)
        if self.family == "bernoulli":
            return (gen.random((n, self.d)) < self.theta).astype(float)
        if self.family in ("gaussian", "sparse_gaussian"):
            return self.theta + self.sigma * gen.standard_normal((n, self.d))
        if self.family == "correlated":
            return np.where(gen.random(n) < self.p, 1.0, -1.0)
        return logistic_data_generator(self.theta, n, gen)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "d": self.d,
            "n": self.n,
            "theta": self.theta.tolist(),
            "sigma": self.sigma,
            "k": self.k,
            "b_vector": None if self.b_vector is None else self.b_vector.tolist(),
        }


def gaussian_location_estimator(z_bar: float, sigma: float) -> float:
    """Invert E[Z] = 1 - 2 Phi(-theta/sigma) and project onto [-1, 1].

    The inversion is theta = sigma * Phi^{-1}((1 + z_bar) / 2). Values of
    z_bar at or beyond +-1 land on the boundary.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    u = 0.5 * (1.0 + float(z_bar))
    if u <= 0.0:
        return -1.0
    if u >= 1.0:
        return 1.0
    return float(np.clip(sigma * ndtri(u), -1.0, 1.0))


def _observed_means(releases, d: int):
    """Per-coordinate debiased means and observation counts."""
    rel = stack_releases(releases, d)
    vals = rel.values
    if rel.sampled_coords is None:
        counts = np.full(d, vals.shape[0])
        sums = vals.sum(axis=0)
    else:
        obs = rel.sampled_coords
        counts = obs.sum(axis=0)
        sums = np.where(obs, vals, 0.0).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    # subsampled releases are conditionally unbiased given observation
    scale = 1.0 if rel.sampled_coords is not None else rel.unbias_factor
    return means / scale, counts


def gaussian_vector_estimator(releases, spec: ProblemSpec) -> np.ndarray:
    """Coordinate-wise Gaussian location estimates from sign releases.

    Unobserved coordinates get estimate 0 and trigger an
    :class:`UnsampledCoordinateWarning`.
    """
    means, counts = _observed_means(releases, spec.d)
    if np.any(counts == 0):
        warnings.warn(
            f"{int(np.sum(counts == 0))} coordinate(s) never sampled; estimated as 0",
            UnsampledCoordinateWarning,
            stacklevel=2,
        )
    est = np.array([gaussian_location_estimator(m, spec.sigma) for m in means])
    est[counts == 0] = 0.0
    return est


def bernoulli_mean_estimator(releases, d: int) -> np.ndarray:
    """Estimate Bernoulli means from releases unbiased for 2 theta - 1."""
    if isinstance(releases, (list, tuple)) and not releases:
        raise ValueError("no releases given")
    means, counts = _observed_means(releases, d)
    if np.any(counts == 0):
        warnings.warn(
            f"{int(np.sum(counts == 0))} coordinate(s) never sampled; estimated as 1/2",
            UnsampledCoordinateWarning,
            stacklevel=2,
        )
    return np.clip(0.5 * (1.0 + means), 0.0, 1.0)


def correlated_estimator(releases, b_vector) -> np.ndarray:
    """theta_hat = b * Zbar, where Zbar averages releases of the shared bit."""
    if isinstance(releases, (list, tuple)) and not releases:
        raise ValueError("no releases given")
    rel = stack_releases(releases, 1)
    if rel.values.size == 0:
        raise ValueError("no releases given")
    z_bar = float(rel.values.mean()) / rel.unbias_factor
    return np.asarray(b_vector, dtype=float) * z_bar


def _bin_slices(n: int, d: int):
    size = n // d
    if size == 0:
        raise ValueError(f"first half of {n} samples cannot fill {d} bins")
    return size, [slice(j * size, (j + 1) * size) for j in range(d)]


def sparse_two_stage_estimator(sample, epsilon: float, spec: ProblemSpec, rng) -> np.ndarray:
    """Private two-stage estimator for a 1-sparse Gaussian mean.

    The first half is split into d contiguous bins; individuals in bin j
    release the sign of coordinate j. The coordinate whose screening estimate
    is largest in magnitude (lowest index on ties) is re-estimated from the
    second half at the full budget.

    Args:
        sample: array of shape (2n, d). A trailing odd row is dropped, and
            first-half rows beyond d * (n // d) are discarded.
        epsilon: per-individual privacy level.
        spec: problem with ``k == 1``.
        rng: randomness for the releases.
    """
    if spec.k != 1:
        raise ValueError("the two-stage estimator handles k = 1 only")
    x = np.asarray(sample, dtype=float)
    if x.ndim != 2 or x.shape[1] != spec.d:
        raise ValueError(f"sample must have shape (2n, {spec.d})")
    half = x.shape[0] // 2
    first, second = x[:half], x[half : 2 * half]
    gen = as_generator(rng)
    _, bins = _bin_slices(half, spec.d)
    pre = np.empty(spec.d)
    for j, sl in enumerate(bins):
        z = rr_sign_mechanism(first[sl, j], epsilon, gen)
        pre[j] = gaussian_location_estimator(z.values.mean(), spec.sigma)
    j_hat = int(np.argmax(np.abs(pre)))
    z = rr_sign_mechanism(second[:, j_hat], epsilon, gen)
    out = np.zeros(spec.d)
    out[j_hat] = gaussian_location_estimator(z.values.mean(), spec.sigma)
    return out


def _rr_mean_from_counts(plus: np.ndarray, total: np.ndarray, epsilon: float) -> np.ndarray:
    return rr_scale(epsilon) * (2.0 * plus / total - 1.0)


def simulate_sparse_two_stage(spec: ProblemSpec, epsilon: float, rng, n: Optional[int] = None):
    """Draw the two-stage estimate through its exact sufficient statistics.

    The estimator only depends on how many +b releases each bin produces,
    which is Binomial with success probability
    pi * Phi(theta_j/sigma) + (1 - pi) * (1 - Phi(theta_j/sigma)),
    pi = e^eps / (1 + e^eps). The half-sample size n defaults to spec.n.
    Returns ``(estimate, j_hat)``.
    """
    if spec.k != 1:
        raise ValueError("the two-stage estimator handles k = 1 only")
    n = spec.n if n is None else n
    gen = as_generator(rng)
    pi = float(expit(epsilon))
    up = ndtr(spec.theta / spec.sigma)
    q = pi * up + (1.0 - pi) * (1.0 - up)
    size, _ = _bin_slices(n, spec.d)
    plus = gen.binomial(size, q)
    pre = np.array(
        [gaussian_location_estimator(m, spec.sigma) for m in _rr_mean_from_counts(plus, size, epsilon)]
    )
    j_hat = int(np.argmax(np.abs(pre)))
    plus2 = gen.binomial(n, q[j_hat])
    out = np.zeros(spec.d)
    out[j_hat] = gaussian_location_estimator(_rr_mean_from_counts(plus2, n, epsilon), spec.sigma)
    return out, j_hat


def logistic_data_generator(theta, n: int, rng):
    """Sample (X, Y) from the two-class model with P(X_j = Y) = sigmoid(theta_j).

    Returns arrays ``x`` of shape (n, d) and ``y`` of shape (n,), entries +-1.
    """
    theta = np.asarray(theta, dtype=float)
    gen = as_generator(rng)
    y = np.where(gen.random(n) < 0.5, 1.0, -1.0)
    agree = gen.random((n, theta.size)) < expit(theta)
    x = np.where(agree, y[:, None], -y[:, None])
    return x, y


def _logistic_outcomes(d: int):
    xs = np.array(list(itertools.product([-1.0, 1.0], repeat=d)))
    return xs


def logistic_joint(theta) -> tuple:
    """Exact joint law of (X, Y) as arrays ``(xs, ys, probs)``."""
    theta = np.asarray(theta, dtype=float)
    xs = _logistic_outcomes(theta.size)
    rows, ys, ps = [], [], []
    for y in (-1.0, 1.0):
        agree = xs * y > 0
        p = 0.5 * np.prod(np.where(agree, expit(theta), expit(-theta)), axis=1)
        rows.append(xs)
        ys.append(np.full(len(xs), y))
        ps.append(p)
    return np.concatenate(rows), np.concatenate(ys), np.concatenate(ps)


def logistic_risk(theta_hat, theta_star) -> float:
    """Exact logistic risk E[log(1 + exp(-Y <X, theta_hat>))] under theta_star."""
    theta_star = np.asarray(theta_star, dtype=float)
    if theta_star.size > MAX_LOGISTIC_DIM:
        raise ValueError(f"exact risk needs d <= {MAX_LOGISTIC_DIM}")
    xs, ys, ps = logistic_joint(theta_star)
    margins = ys * (xs @ np.asarray(theta_hat, dtype=float))
    return float(np.dot(ps, np.logaddexp(0.0, -margins)))


def logistic_excess_risk(theta_hat, theta_star, d: int) -> float:
    """Excess logistic risk R(theta_hat) - R(theta_star), summed exactly."""
    if d > MAX_LOGISTIC_DIM:
        raise ValueError(f"exact risk needs d <= {MAX_LOGISTIC_DIM}")
    theta_hat = np.asarray(theta_hat, dtype=float)
    theta_star = np.asarray(theta_star, dtype=float)
    if theta_hat.shape != (d,) or theta_star.shape != (d,):
        raise ValueError(f"parameters must have length {d}")
    return max(logistic_risk(theta_hat, theta_star) - logistic_risk(theta_star, theta_star), 0.0)


def logistic_moment_estimator(releases, d: int) -> np.ndarray:
    """Estimate theta from releases of Y * X, using E[Y X_j] = tanh(theta_j / 2).

    The inverted moments are projected onto [-1, 1]^d.
    """
    means, counts = _observed_means(releases, d)
    if np.any(counts == 0):
        warnings.warn(
            f"{int(np.sum(counts == 0))} coordinate(s) never sampled; estimated as 0",
            UnsampledCoordinateWarning,
            stacklevel=2,
        )
    m = np.clip(means, -1.0 + 1e-12, 1.0 - 1e-12)
    est = np.clip(2.0 * np.arctanh(m), -1.0, 1.0)
    est[counts == 0] = 0.0
    return est
