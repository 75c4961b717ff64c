"""Finite privacy channels: representation, privacy audits and projection.

A channel is a row-stochastic matrix ``probs[x, z] = q(z | x)``. Audits return
the tightest parameter for which the channel satisfies pure, approximate or
Renyi local privacy. All logarithms are natural.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.optimize import linprog
from scipy.special import logsumexp

ROW_TOL = 1e-12
AUDIT_TOL = 1e-9


class ChannelError(ValueError):
    """Raised for malformed channels or violated preconditions."""


@dataclass(frozen=True)
class PrivacySpec:
    """Privacy parameters for a single release or a whole protocol."""

    epsilon: float
    delta: float = 0.0
    renyi_order: Optional[float] = None
    epsilon_kl: Optional[float] = None

    def __post_init__(self):
        if not (self.epsilon >= 0):
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if not (0.0 <= self.delta <= 1.0):
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if self.renyi_order is not None and not (self.renyi_order >= 1):
            raise ValueError(f"renyi_order must be >= 1, got {self.renyi_order}")
        if self.epsilon_kl is not None and not (self.epsilon_kl >= 0):
            raise ValueError(f"epsilon_kl must be nonnegative, got {self.epsilon_kl}")

    @property
    def is_pure(self) -> bool:
        return self.delta == 0.0

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "renyi_order": self.renyi_order,
            "epsilon_kl": self.epsilon_kl,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PrivacySpec":
        return cls(
            epsilon=float(data["epsilon"]),
            delta=float(data.get("delta", 0.0)),
            renyi_order=data.get("renyi_order"),
            epsilon_kl=data.get("epsilon_kl"),
        )


@dataclass(frozen=True)
class DiscreteChannel:
    """Row-stochastic table q(z|x) over finite alphabets.

    The stored array is a read-only copy, so channels can be shared freely.
    """

    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float, copy=True)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ChannelError(f"channel must be a nonempty 2-D table, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ChannelError("channel has non-finite entries")
        if p.min() < 0.0 or p.max() > 1.0:
            raise ChannelError("channel entries must lie in [0, 1]")
        err = np.abs(p.sum(axis=1) - 1.0)
        if err.max() > ROW_TOL:
            bad = int(err.argmax())
            raise ChannelError(f"row {bad} sums to {p[bad].sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def input_size(self) -> int:
        return self.probs.shape[0]

    @property
    def output_size(self) -> int:
        return self.probs.shape[1]

    def __eq__(self, other):
        if not isinstance(other, DiscreteChannel):
            return NotImplemented
        return self.probs.shape == other.probs.shape and bool(np.all(self.probs == other.probs))

    def __hash__(self):
        return hash((self.probs.shape, self.probs.tobytes()))

    def __repr__(self):
        return f"DiscreteChannel(inputs={self.input_size}, outputs={self.output_size})"

    # constructors

    @classmethod
    def randomized_response(cls, epsilon: float, k: int = 2) -> "DiscreteChannel":
        """k-ary randomized response: keep the input w.p. e^eps / (e^eps + k - 1)."""
        if k < 2:
            raise ChannelError("randomized response needs at least two symbols")
        e = math.exp(epsilon)
        p = np.full((k, k), 1.0 / (e + k - 1))
        np.fill_diagonal(p, e / (e + k - 1))
        return cls(p)

    @classmethod
    def identity(cls, k: int) -> "DiscreteChannel":
        return cls(np.eye(k))

    # serialization

    def to_dict(self) -> dict:
        return {
            "inputs": self.input_size,
            "outputs": self.output_size,
            "rows": self.probs.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteChannel":
        try:
            rows = np.asarray(data["rows"], dtype=float)
            k, m = int(data["inputs"]), int(data["outputs"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ChannelError(f"malformed channel document: {exc}") from exc
        if rows.shape != (k, m):
            raise ChannelError(f"rows have shape {rows.shape}, header says ({k}, {m})")
        return cls(rows)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DiscreteChannel":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "DiscreteChannel":
        return cls.from_json(Path(path).read_text())

    def dump(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")


def _as_channel(channel) -> DiscreteChannel:
    if isinstance(channel, DiscreteChannel):
        return channel
    return DiscreteChannel(np.asarray(channel, dtype=float))


def audit_pure_dp(channel) -> float:
    """Tightest eps with q(z|x) <= e^eps q(z|x') for all x, x', z.

    Zero-over-zero counts as ratio one. Returns ``math.inf`` when some output
    is possible under one input and impossible under another.
    """
    p = _as_channel(channel).probs
    worst = 0.0
    with np.errstate(divide="ignore"):
        logp = np.log(p)
    for z in range(p.shape[1]):
        col = p[:, z]
        pos = col > 0
        if not pos.any():
            continue
        if not pos.all():
            return math.inf
        lc = logp[:, z]
        worst = max(worst, float(lc.max() - lc.min()))
    return worst


def audit_approx_dp(channel, epsilon: float) -> float:
    """Tightest delta at the given eps (largest hockey-stick divergence)."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    p = _as_channel(channel).probs
    e = math.exp(epsilon)
    worst = 0.0
    for x in range(p.shape[0]):
        excess = np.maximum(p[x][None, :] - e * p, 0.0).sum(axis=1)
        worst = max(worst, float(excess.max()))
    return min(worst, 1.0)


def renyi_divergence(p, q, alpha: float) -> float:
    """D_alpha(p || q) in nats; alpha = 1 is KL and alpha = inf the max log ratio."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    sp = p > 0
    if np.any(sp & (q <= 0)):
        return math.inf
    ps, qs = p[sp], q[sp]
    lp, lq = np.log(ps), np.log(qs)
    if alpha == 1:
        return max(float(np.sum(ps * (lp - lq))), 0.0)
    if math.isinf(alpha):
        return max(float(np.max(lp - lq)), 0.0)
    t = alpha - 1.0
    if t < 0.5:
        # expm1 form stays accurate as alpha -> 1
        s = float(np.sum(ps * np.expm1(t * (lp - lq)))) / math.fsum(ps)
        return max(math.log1p(s) / t, 0.0)
    val = logsumexp(alpha * lp + (1.0 - alpha) * lq) / t
    return max(float(val), 0.0)


def audit_renyi(channel, alpha: float) -> float:
    """Largest Renyi divergence of order alpha between any two rows."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    p = _as_channel(channel).probs
    worst = 0.0
    for x in range(p.shape[0]):
        for xp in range(p.shape[0]):
            if x != xp:
                worst = max(worst, renyi_divergence(p[x], p[xp], alpha))
                if math.isinf(worst):
                    return worst
    return worst


def projection_tv_bound(epsilon: float, delta: float) -> float:
    """Per-row total-variation allowance for the approximate-to-pure projection."""
    e = math.exp(epsilon)
    return 0.5 * (delta / (1.0 + e) + delta / (1.0 + e - delta))


def pairwise_projection(channel, x: int, x_prime: int, epsilon: float) -> np.ndarray:
    """Normalized pairwise repair of row x against row x'.

    Mass on outputs where one row exceeds e^eps times the other is pooled and
    split in the ratio e^eps : 1; other outputs keep row x unchanged.
    """
    p = _as_channel(channel).probs
    a, b = p[x], p[x_prime]
    e = math.exp(epsilon)
    s_x = a > e * b
    s_xp = b > e * a
    pooled = a + b
    q1 = np.where(s_x, pooled * e / (1.0 + e), np.where(s_xp, pooled / (1.0 + e), a))
    return q1 / q1.sum()


def _project_pairwise(p: np.ndarray, epsilon: float) -> np.ndarray:
    k = p.shape[0]
    out = np.zeros_like(p)
    for x in range(k):
        for xp in range(k):
            out[x] += pairwise_projection(p, x, xp, epsilon)
    return out / k


def _project_minimax(p: np.ndarray, epsilon: float) -> np.ndarray:
    """Pure-DP channel minimizing the largest per-row TV distance, via an LP."""
    k, m = p.shape
    e = math.exp(epsilon)
    nq = k * m
    nvar = 2 * nq + 1
    iq = np.arange(nq).reshape(k, m)
    iu = nq + iq
    it = 2 * nq

    rows, cols, vals, rhs = [], [], [], []
    r = 0
    # q[x, z] - e^eps q[x', z] <= 0
    for x in range(k):
        for xp in range(k):
            if x == xp:
                continue
            idx = np.arange(m)
            rows += [r + idx, r + idx]
            cols += [iq[x], iq[xp]]
            vals += [np.ones(m), np.full(m, -e)]
            rhs.append(np.zeros(m))
            r += m
    # |q - p| <= u
    idx = np.arange(nq)
    rows += [r + idx, r + idx, r + nq + idx, r + nq + idx]
    cols += [iq.ravel(), iu.ravel(), iq.ravel(), iu.ravel()]
    vals += [np.ones(nq), -np.ones(nq), -np.ones(nq), -np.ones(nq)]
    rhs += [p.ravel(), -p.ravel()]
    r += 2 * nq
    # 0.5 * sum_z u[x, z] <= t
    for x in range(k):
        rows += [np.full(m, r), np.array([r])]
        cols += [iu[x], np.array([it])]
        vals += [np.full(m, 0.5), np.array([-1.0])]
        rhs.append(np.zeros(1))
        r += 1
    a_ub = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(r, nvar)
    )
    b_ub = np.concatenate(rhs)
    a_eq = sparse.csr_matrix(
        (np.ones(nq), (np.repeat(np.arange(k), m), iq.ravel())), shape=(k, nvar)
    )
    c = np.zeros(nvar)
    c[it] = 1.0
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=np.ones(k),
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise ChannelError(f"projection LP failed: {res.message}")
    q = np.clip(res.x[:nq].reshape(k, m), 0.0, None)
    return _repair_ratios(q, epsilon)


def _repair_ratios(q: np.ndarray, epsilon: float, rounds: int = 5) -> np.ndarray:
    # Lift each column to within e^-eps of its max, then renormalize rows.
    floor_factor = math.exp(-epsilon)
    for _ in range(rounds):
        q = np.maximum(q, floor_factor * q.max(axis=0, keepdims=True))
        q = q / q.sum(axis=1, keepdims=True)
    return q


PROJECTION_METHODS = ("minimax", "pairwise")


def project_to_pure_dp(channel, epsilon: float, delta: float, method: str = "minimax") -> DiscreteChannel:
    """Map an (eps, delta)-DP channel to a nearby eps-pure-DP channel.

    Args:
        channel: the channel to repair.
        epsilon: target pure privacy level.
        delta: approximate-DP slack the input channel satisfies at ``epsilon``.
        method: ``"minimax"`` solves a linear program for the pure-DP channel
            with the smallest worst-row TV distance; ``"pairwise"`` averages
            the normalized pairwise repairs uniformly over reference inputs.

    Returns:
        The projected channel. Channels already eps-pure-DP are returned as is.

    Raises:
        ChannelError: if delta >= 1 + e^eps or the channel is not
            (eps, delta)-DP.
    """
    ch = _as_channel(channel)
    if epsilon < 0:
        raise ChannelError("epsilon must be nonnegative")
    if delta < 0:
        raise ChannelError("delta must be nonnegative")
    if delta >= 1.0 + math.exp(epsilon):
        raise ChannelError("delta >= 1 + e^eps makes the TV allowance degenerate")
    measured = audit_approx_dp(ch, epsilon)
    if measured > delta + ROW_TOL:
        raise ChannelError(
            f"channel is not ({epsilon}, {delta})-DP: tightest delta is {measured!r}"
        )
    if delta == 0.0 or audit_pure_dp(ch) <= epsilon:
        return ch
    if method == "minimax":
        q = _project_minimax(ch.probs, epsilon)
    elif method == "pairwise":
        q = _project_pairwise(ch.probs, epsilon)
    else:
        raise ChannelError(f"unknown projection method {method!r}; use one of {PROJECTION_METHODS}")
    return DiscreteChannel(q / q.sum(axis=1, keepdims=True))


def row_tv(a, b) -> np.ndarray:
    """Per-row total-variation distances between two channels."""
    pa = _as_channel(a).probs
    pb = _as_channel(b).probs
    return 0.5 * np.abs(pa - pb).sum(axis=1)


def random_channel(inputs: int, outputs: int, rng, max_shift: float = 0.1) -> DiscreteChannel:
    """Dirichlet rows, then a random fraction of each row moved onto one output.

    The mass shift creates likelihood-ratio violations of controlled size.
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    q = rng.dirichlet(np.ones(outputs), size=inputs)
    for x in range(inputs):
        z = rng.integers(outputs)
        s = rng.uniform(0.0, max_shift)
        q[x] *= 1.0 - s
        q[x, z] += s
    return DiscreteChannel(q / q.sum(axis=1, keepdims=True))


def random_pure_dp_channel(inputs: int, outputs: int, epsilon: float, rng) -> DiscreteChannel:
    """Random channel that is exactly eps-pure-DP.

    Rows are exponential tilts of a common base law with exponents in
    [0, eps/2], so both the tilt and the normalizer ratios stay within e^(eps/2).
    """
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    base = rng.dirichlet(np.ones(outputs))
    tilt = rng.uniform(0.0, epsilon / 2.0, size=(inputs, outputs))
    q = base[None, :] * np.exp(tilt)
    return DiscreteChannel(q / q.sum(axis=1, keepdims=True))
