"""Sampleable locally private releases.

Every mechanism accepts either a single input or a batch (leading axis indexes
individuals) and returns a :class:`PrivateRelease` whose ``values`` have the
same layout. Randomness comes from :class:`SeededRng`, a counter-based stream
keyed by a master seed and a substream identifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import expit, gammaln, logsumexp

from .channels import DiscreteChannel

BOUND_TOL = 1e-12


class SeededRng:
    """Reproducible random stream identified by ``(seed, stream)``.

    Two instances with the same seed and stream produce identical draws. The
    generator is Philox keyed through a ``SeedSequence`` whose spawn key is the
    stream tuple, so distinct streams are statistically independent.
    """

    def __init__(self, seed: int, stream: Sequence[int] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if isinstance(stream, (int, np.integer)):
            stream = (int(stream),)
        self.seed = seed
        self.stream = tuple(int(s) for s in stream)
        ss = np.random.SeedSequence(entropy=seed, spawn_key=self.stream)
        self.generator = np.random.Generator(np.random.Philox(ss))

    def substream(self, *keys: int) -> "SeededRng":
        return SeededRng(self.seed, self.stream + tuple(keys))

    def __repr__(self):
        return f"SeededRng(seed={self.seed}, stream={self.stream})"


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class PrivateRelease:
    """Privatized observations plus the metadata needed to debias them.

    Attributes:
        values: released values. Missing coordinates are NaN.
        magnitude_bound: b with |Z_j| <= b for every released entry.
        unbias_factor: m with E[Z_j | input] = m * target, where missing
            entries count as zero.
        sampled_coords: boolean mask of released coordinates, only for
            coordinate subsampling.
    """

    values: np.ndarray
    magnitude_bound: float
    unbias_factor: float = 1.0
    sampled_coords: Optional[np.ndarray] = None

    def __post_init__(self):
        vals = np.atleast_1d(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", vals)
        if not self.unbias_factor > 0:
            raise ValueError("unbias_factor must be positive")
        seen = vals[~np.isnan(vals)]
        if seen.size and np.max(np.abs(seen)) > self.magnitude_bound + BOUND_TOL:
            raise ValueError("released value exceeds the magnitude bound")
        if self.sampled_coords is not None:
            mask = np.asarray(self.sampled_coords, dtype=bool)
            if mask.shape != vals.shape:
                raise ValueError("sampled_coords must match the values layout")
            object.__setattr__(self, "sampled_coords", mask)

    def __len__(self):
        return self.values.shape[0]

    def to_dict(self) -> dict:
        out = {
            "values": [None if np.isnan(v) else float(v) for v in self.values.ravel()],
            "shape": list(self.values.shape),
            "magnitude_bound": self.magnitude_bound,
            "unbias_factor": self.unbias_factor,
        }
        if self.sampled_coords is not None:
            out["sampled_coords"] = self.sampled_coords.ravel().astype(int).tolist()
        return out


def stack_releases(releases, d: int) -> PrivateRelease:
    """Concatenate releases of one mechanism into an ``(n, d)`` batch.

    A single batched :class:`PrivateRelease` is reshaped the same way.
    """
    if isinstance(releases, PrivateRelease):
        releases = [releases]
    releases = list(releases)
    if not releases:
        raise ValueError("no releases given")
    first = releases[0]
    for r in releases[1:]:
        if r.magnitude_bound != first.magnitude_bound or r.unbias_factor != first.unbias_factor:
            raise ValueError("releases come from differently calibrated mechanisms")
    values = np.concatenate([r.values.reshape(-1, d) for r in releases])
    mask = None
    if first.sampled_coords is not None:
        mask = np.concatenate([r.sampled_coords.reshape(-1, d) for r in releases])
    return PrivateRelease(values, first.magnitude_bound, first.unbias_factor, mask)


def _signs(x) -> np.ndarray:
    # sign(0) := +1
    return np.where(np.asarray(x, dtype=float) >= 0, 1.0, -1.0)


def rr_scale(epsilon: float) -> float:
    """Debiasing magnitude (e^eps + 1) / (e^eps - 1)."""
    return 1.0 / math.tanh(epsilon / 2.0)


def _rr(signs: np.ndarray, epsilon: float, gen: np.random.Generator) -> np.ndarray:
    keep = gen.random(signs.shape) < expit(epsilon)
    return rr_scale(epsilon) * np.where(keep, signs, -signs)


def rr_sign_mechanism(x, epsilon: float, rng) -> PrivateRelease:
    """Randomized response on sign(x), scaled so that E[Z | x] = sign(x)."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    gen = as_generator(rng)
    z = _rr(_signs(np.atleast_1d(x)), epsilon, gen)
    return PrivateRelease(z, rr_scale(epsilon), 1.0)


def correlated_bit_mechanism(b_i, epsilon: float, rng) -> PrivateRelease:
    """Randomized response on the shared bit B_i in {-1, +1}."""
    b = np.atleast_1d(np.asarray(b_i, dtype=float))
    if not np.all(np.abs(b) == 1):
        raise ValueError("bits must be -1 or +1")
    return rr_sign_mechanism(b, epsilon, rng)


def rr_sign_channel(epsilon: float) -> DiscreteChannel:
    """Induced channel of the sign release: inputs (-1, +1), outputs (-b, +b)."""
    pi = float(expit(epsilon))
    return DiscreteChannel([[pi, 1.0 - pi], [1.0 - pi, pi]])


def subsample_size(epsilon: float, d: int, eps0: float = 1.0) -> int:
    """Number of released coordinates, floor(eps / eps0) capped at d."""
    return min(d, int(math.floor(epsilon / eps0 + 1e-12)))


def coordinate_subsample_mechanism(x, epsilon: float, rng, eps0: float = 1.0) -> PrivateRelease:
    """Release sign randomized response on a uniformly random coordinate subset.

    ``floor(eps / eps0) ∧ d`` coordinates are drawn without replacement and each
    is released at level ``eps0``. Unreleased coordinates are NaN and the mask
    of released coordinates is returned in ``sampled_coords``. Since each
    coordinate is released with probability k/d, the unbias factor is k/d.
    """
    if not eps0 > 0:
        raise ValueError("eps0 must be positive")
    if not epsilon >= eps0:
        raise ValueError(f"coordinate subsampling needs epsilon >= {eps0}")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xb = np.atleast_2d(x)
    n, d = xb.shape
    if d == 0:
        raise ValueError("empty input vector")
    k = subsample_size(epsilon, d, eps0)
    gen = as_generator(rng)
    order = np.argsort(gen.random((n, d)), axis=1)[:, :k]
    mask = np.zeros((n, d), dtype=bool)
    np.put_along_axis(mask, order, True, axis=1)
    z = np.full((n, d), np.nan)
    z[mask] = _rr(_signs(xb[mask]), eps0, gen)
    if single:
        z, mask = z[0], mask[0]
    return PrivateRelease(z, rr_scale(eps0), k / d, mask)


def _linf_log_weights(d: int, epsilon: float) -> np.ndarray:
    """Log-probability of agreeing with v on exactly k of d coordinates."""
    k = np.arange(d + 1)
    s = 2 * k - d
    tilt = np.where(s > 0, epsilon, np.where(s < 0, 0.0, np.logaddexp(epsilon, 0.0) - math.log(2.0)))
    logc = gammaln(d + 1) - gammaln(k + 1) - gammaln(d - k + 1)
    lw = logc + tilt
    return lw - logsumexp(lw)


def linf_bias(d: int, epsilon: float) -> float:
    """Per-coordinate bias m = E[W_j v_j] of the hypercube release."""
    if d < 1:
        raise ValueError("d must be >= 1")
    lw = _linf_log_weights(d, epsilon)
    k = np.arange(d + 1)
    return float(np.sum(np.exp(lw) * (2 * k - d)) / d)


def linf_channel(d: int, epsilon: float) -> DiscreteChannel:
    """Induced channel from v in {-1,1}^d to W in {-1,1}^d (vertex order by bits)."""
    verts = 1.0 - 2.0 * ((np.arange(2**d)[:, None] >> np.arange(d)[::-1]) & 1)
    s = verts @ verts.T
    e = math.exp(epsilon)
    w = np.where(s > 0, e, np.where(s < 0, 1.0, (e + 1.0) / 2.0))
    return DiscreteChannel(w / w.sum(axis=1, keepdims=True))


def linf_mechanism(x, epsilon: float, rng) -> PrivateRelease:
    """Hypercube release of sign(x) with exact debiasing.

    W in {-1,1}^d has law proportional to e^eps when <W, v> > 0, to 1 when
    <W, v> < 0 and to (e^eps + 1)/2 on ties, where v = sign(x). Z = W / m with
    m the exact per-coordinate bias, so E[Z | v] = v.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xb = np.atleast_2d(x)
    n, d = xb.shape
    if d == 0:
        raise ValueError("d must be >= 1")
    gen = as_generator(rng)
    probs = np.exp(_linf_log_weights(d, epsilon))
    agree = gen.choice(d + 1, size=n, p=probs / probs.sum())
    ranks = np.argsort(np.argsort(gen.random((n, d)), axis=1), axis=1)
    flip = np.where(ranks < agree[:, None], 1.0, -1.0)
    m = linf_bias(d, epsilon)
    z = _signs(xb) * flip / m
    if single:
        z = z[0]
    return PrivateRelease(z, 1.0 / m, 1.0)


def gaussian_noise_scale(sensitivity: float, epsilon_kl: float) -> float:
    """Standard deviation s with s^2 = sensitivity^2 / (2 eps_kl)."""
    if not epsilon_kl > 0:
        raise ValueError("epsilon_kl must be positive")
    if not sensitivity > 0:
        raise ValueError("sensitivity must be positive")
    return sensitivity / math.sqrt(2.0 * epsilon_kl)


def gaussian_noise_mechanism(x, sensitivity: float, epsilon_kl: float, rng) -> PrivateRelease:
    """Additive Gaussian noise meeting a KL privacy level of eps_kl."""
    s = gaussian_noise_scale(sensitivity, epsilon_kl)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = x + s * as_generator(rng).standard_normal(x.shape)
    return PrivateRelease(z, math.inf, 1.0)


def subsample_channel(d: int, epsilon: float, eps0: float = 1.0) -> DiscreteChannel:
    """Full induced channel of coordinate subsampling, for small d.

    Inputs are sign vectors; outputs are (coordinate set, released signs).
    """
    from itertools import combinations

    k = subsample_size(epsilon, d, eps0)
    verts = 1.0 - 2.0 * ((np.arange(2**d)[:, None] >> np.arange(d)[::-1]) & 1)
    pi = float(expit(eps0))
    sets = list(combinations(range(d), k))
    cols = []
    for subset in sets:
        idx = list(subset)
        for pattern in range(2**k):
            out = 1.0 - 2.0 * ((pattern >> np.arange(k)[::-1]) & 1)
            agree = (verts[:, idx] == out).sum(axis=1)
            cols.append(pi**agree * (1.0 - pi) ** (k - agree) / len(sets))
    return DiscreteChannel(np.column_stack(cols))
