"""Exact information quantities on small finite instances.

A :class:`FiniteJoint` describes a latent V, samples X_1..X_n that are i.i.d.
given V, and a sequential pipeline where Z_i depends on X_i and the earlier
outputs Z_<i. The full joint law is enumerated as a dense tensor with axes
``(V, X_1, ..., X_n, Z_1, ..., Z_n)``, so every quantity is an exact sum.
All informations are in nats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channels import DiscreteChannel, random_pure_dp_channel

MAX_ATOMS = 10**6
NORM_TOL = 1e-12


def _as_probs(channel) -> np.ndarray:
    if isinstance(channel, DiscreteChannel):
        return channel.probs
    return np.asarray(channel, dtype=float)


def _kernel_from(spec, in_size: int, prev_sizes: tuple) -> np.ndarray:
    """Tabulate step kernel K[z_1, ..., z_{i-1}, x, z_i]."""
    if not callable(spec):
        k = _as_probs(spec)
        if k.shape[0] != in_size:
            raise ValueError(f"channel has {k.shape[0]} inputs, data alphabet has {in_size}")
        return np.broadcast_to(k, prev_sizes + k.shape).copy()
    tables = {}
    for prev in itertools.product(*[range(m) for m in prev_sizes]):
        tables[prev] = _as_probs(spec(prev))
    shapes = {t.shape for t in tables.values()}
    if len(shapes) != 1:
        raise ValueError("adaptive channel must keep a fixed output alphabet")
    shape = shapes.pop()
    if shape[0] != in_size:
        raise ValueError(f"channel has {shape[0]} inputs, data alphabet has {in_size}")
    out = np.empty(prev_sizes + shape)
    for prev, t in tables.items():
        out[prev] = t
    return out


@dataclass(frozen=True)
class FiniteJoint:
    """Latent V, conditionally i.i.d. samples and a sequential release pipeline.

    Attributes:
        prior: law of V, shape (|V|,).
        px: per-sample law of X given V, shape (|V|, |X|).
        n: number of samples.
        kernels: kernel i has shape (m_1, ..., m_{i-1}, |X|, m_i).
    """

    prior: np.ndarray
    px: np.ndarray
    n: int
    kernels: tuple

    def __post_init__(self):
        prior = np.asarray(self.prior, dtype=float)
        px = np.atleast_2d(np.asarray(self.px, dtype=float))
        if abs(prior.sum() - 1.0) > NORM_TOL or prior.min() < 0:
            raise ValueError("prior must be a probability vector")
        if px.shape[0] != prior.size or np.abs(px.sum(axis=1) - 1.0).max() > NORM_TOL or px.min() < 0:
            raise ValueError("px must hold one distribution over X per value of V")
        if len(self.kernels) != self.n:
            raise ValueError("need one kernel per sample")
        for i, k in enumerate(self.kernels):
            if k.ndim != i + 2 or np.abs(k.sum(axis=-1) - 1.0).max() > NORM_TOL:
                raise ValueError(f"kernel {i} is not a valid conditional table")
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "px", px)
        if self.atoms > MAX_ATOMS:
            raise ValueError(f"instance has {self.atoms} atoms, limit is {MAX_ATOMS}")

    @classmethod
    def build(cls, prior, px, n: int, channels) -> "FiniteJoint":
        """Assemble from a channel list.

        ``channels`` is one channel used at every step, or a list of n
        entries. Each entry is a table (array or :class:`DiscreteChannel`) or a
        callable mapping the tuple of earlier outputs to a table.
        """
        px = np.atleast_2d(np.asarray(px, dtype=float))
        if n < 1:
            raise ValueError("need n >= 1")
        if isinstance(channels, (list, tuple)):
            if len(channels) != n:
                raise ValueError("need one channel per sample")
            specs = list(channels)
        else:
            specs = [channels] * n
        kernels, sizes = [], ()
        for spec in specs:
            k = _kernel_from(spec, px.shape[1], sizes)
            sizes = sizes + (k.shape[-1],)
            kernels.append(k)
        return cls(np.asarray(prior, dtype=float), px, n, tuple(kernels))

    @property
    def v_size(self) -> int:
        return self.prior.size

    @property
    def x_size(self) -> int:
        return self.px.shape[1]

    @property
    def output_sizes(self) -> tuple:
        return tuple(k.shape[-1] for k in self.kernels)

    @property
    def atoms(self) -> int:
        return self.v_size * self.x_size**self.n * int(np.prod(self.output_sizes))

    def tensor(self) -> np.ndarray:
        """Joint law with axes (V, X_1..X_n, Z_1..Z_n)."""
        n = self.n
        operands = [self.prior, [0]]
        for i in range(n):
            operands += [self.px, [0, 1 + i]]
        for i, k in enumerate(self.kernels):
            operands += [k, [1 + n + j for j in range(i)] + [1 + i, 1 + n + i]]
        return np.einsum(*operands, list(range(1 + 2 * n)), optimize="greedy")

    def axes(self, name: str) -> tuple:
        if name == "V":
            return (0,)
        if name == "X":
            return tuple(range(1, 1 + self.n))
        if name == "Z":
            return tuple(range(1 + self.n, 1 + 2 * self.n))
        raise ValueError(f"unknown variable {name!r}")


def conditional_mutual_information(p: np.ndarray, a: Sequence[int], b: Sequence[int], c: Sequence[int] = ()) -> float:
    """I(A; B | C) for a joint tensor, with variables given as axis groups."""
    a, b, c = tuple(a), tuple(b), tuple(c)
    keep = a + b + c
    drop = tuple(ax for ax in range(p.ndim) if ax not in keep)
    pabc = p.sum(axis=drop, keepdims=True) if drop else p
    pac = pabc.sum(axis=b, keepdims=True)
    pbc = pabc.sum(axis=a, keepdims=True)
    pc = pabc.sum(axis=a + b, keepdims=True)
    pac, pbc, pc = (np.broadcast_to(t, pabc.shape) for t in (pac, pbc, pc))
    mask = pabc > 0
    terms = pabc[mask] * (np.log(pabc[mask]) + np.log(pc[mask]) - np.log(pac[mask]) - np.log(pbc[mask]))
    return max(float(np.sum(terms)), 0.0)


def mutual_information(pxy) -> float:
    """I(X; Y) of a two-dimensional joint table."""
    return conditional_mutual_information(np.asarray(pxy, dtype=float), (0,), (1,))


_QUERIES = {"X;Z": ("X", "Z", None), "V;Z": ("V", "Z", None), "X;Z|V": ("X", "Z", "V")}


def exact_mutual_information(joint: FiniteJoint, which: str = "X;Z|V", given_v: Optional[int] = None) -> float:
    """Exact I(X;Z), I(V;Z) or I(X;Z|V) for a pipeline.

    With ``given_v`` set, computes I(X; Z | V = v) instead (``which`` must
    be ``"X;Z"`` or ``"X;Z|V"``).
    """
    if which not in _QUERIES:
        raise ValueError(f"unknown query {which!r}; expected one of {sorted(_QUERIES)}")
    p = joint.tensor()
    a, b, c = _QUERIES[which]
    if given_v is not None:
        if a == "V":
            raise ValueError("I(V; Z) given V is zero by definition")
        pv = joint.prior[given_v]
        if pv <= 0:
            raise ValueError("conditioning on a null event")
        p = p[given_v : given_v + 1] / pv
        c = None
    return conditional_mutual_information(p, joint.axes(a), joint.axes(b), joint.axes(c) if c else ())


@dataclass(frozen=True)
class Divergences:
    tv: float
    hellinger_sq: float
    kl: float
    renyi: float
    alpha: float


def exact_divergences(p, q, alpha: float = 2.0) -> Divergences:
    """TV, squared Hellinger (1/2 sum (sqrt p - sqrt q)^2), KL and Renyi-alpha."""
    from .channels import renyi_divergence

    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    if p.shape != q.shape:
        raise ValueError("distributions must share an index set")
    tv = 0.5 * float(np.abs(p - q).sum())
    hel = 0.5 * float(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2))
    return Divergences(
        tv=min(tv, 1.0),
        hellinger_sq=min(hel, 1.0),
        kl=renyi_divergence(p, q, 1.0),
        renyi=renyi_divergence(p, q, alpha),
        alpha=alpha,
    )


def pipeline_marginal(joint: FiniteJoint) -> np.ndarray:
    """Law of the output tuple given each V, shape (|V|, prod m_i), C order."""
    p = joint.tensor()
    pz = p.sum(axis=joint.axes("X")).reshape(joint.v_size, -1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(joint.prior[:, None] > 0, pz / joint.prior[:, None], 0.0)


def binary_joint(p_minus, p_plus, n: int, channels, prior=(0.5, 0.5)) -> FiniteJoint:
    """Pipeline with V in {-1, +1} (indices 0, 1) and X_i ~ P_V."""
    return FiniteJoint.build(np.asarray(prior, dtype=float), np.vstack([p_minus, p_plus]), n, channels)


def _hypercube(d: int) -> np.ndarray:
    """Rows are v in {-1, 1}^d; bit j of the row index (MSB first) is 1 for +1."""
    return 2.0 * ((np.arange(2**d)[:, None] >> np.arange(d)[::-1]) & 1) - 1.0


def hypercube_joint(d: int, p_minus, p_plus, n: int, channels) -> FiniteJoint:
    """Uniform V on {-1,1}^d; coordinate j of X_i is drawn from P_{v_j}.

    X is encoded as the integer with bit j (MSB first) equal to coordinate j,
    so reshaping an X axis to ``(|X_0|,) * d`` recovers the coordinates.
    """
    p_minus = np.asarray(p_minus, dtype=float)
    p_plus = np.asarray(p_plus, dtype=float)
    if p_minus.shape != p_plus.shape:
        raise ValueError("coordinate laws must share an alphabet")
    verts = _hypercube(d)
    px = []
    for v in verts:
        law = np.array([1.0])
        for vj in v:
            law = np.kron(law, p_plus if vj > 0 else p_minus)
        px.append(law)
    prior = np.full(len(verts), 1.0 / len(verts))
    return FiniteJoint.build(prior, np.array(px), n, channels)


def coordinate_marginals(joint: FiniteJoint, d: int):
    """Mixtures M_{+j}, M_{-j} of the output law over the hypercube prior.

    Returns arrays of shape (d, prod m_i) for the plus and minus halves.
    """
    if joint.v_size != 2**d:
        raise ValueError("joint prior is not indexed by the hypercube")
    m = pipeline_marginal(joint)
    verts = _hypercube(d)
    plus, minus = [], []
    for j in range(d):
        for sign, acc in ((1.0, plus), (-1.0, minus)):
            sel = verts[:, j] == sign
            w = joint.prior[sel]
            acc.append((w[:, None] * m[sel]).sum(axis=0) / w.sum())
    return np.array(plus), np.array(minus)


def exact_assouad_testing_risk(m_plus, m_minus) -> float:
    """Summed optimal testing error (1/2) sum_j (1 - TV(M_{+j}, M_{-j}))."""
    m_plus = np.atleast_2d(np.asarray(m_plus, dtype=float))
    m_minus = np.atleast_2d(np.asarray(m_minus, dtype=float))
    if m_plus.shape != m_minus.shape:
        raise ValueError("marginal arrays must match")
    tv = 0.5 * np.abs(m_plus - m_minus).sum(axis=1)
    return float(0.5 * np.sum(1.0 - np.minimum(tv, 1.0)))


def _two_point_info(p_minus, p_plus, w: np.ndarray):
    """I(V; Z) and I(X; Z) for uniform V, X ~ P_V, Z ~ W(.|X)."""
    px_v = np.vstack([p_minus, p_plus])
    pvxz = 0.5 * px_v[:, :, None] * w[None, :, :]
    i_vz = conditional_mutual_information(pvxz, (0,), (2,))
    i_xz = conditional_mutual_information(pvxz, (1,), (2,))
    return i_vz, i_xz


def _extreme_channels(k: int):
    yield np.eye(k)
    for e in (0.25, 0.5, 0.9):
        yield np.hstack([(1 - e) * np.eye(k), np.full((k, 1), e)])
    for mask in range(1, 2 ** (k - 1)):
        s = np.array([(mask >> i) & 1 for i in range(k)], dtype=float)
        yield np.column_stack([s, 1.0 - s])


def sdpi_constant_search(p_minus, p_plus, output_size: int, trials: int, rng) -> float:
    """Largest observed I(V;Z) / I(X;Z) over random and extreme channels.

    Random channels have Dirichlet rows with a random concentration and
    output sizes 2..output_size. Identity, erasure and threshold channels are
    always included. Channels with I(X;Z) below 1e-12 are skipped. The
    result is a lower estimate of the SDPI constant.
    """
    from .mechanisms import as_generator

    p_minus = np.asarray(p_minus, dtype=float)
    p_plus = np.asarray(p_plus, dtype=float)
    k = p_minus.size
    if k > 8:
        raise ValueError("search is limited to alphabets of size <= 8")
    if trials < 1 or output_size < 2:
        raise ValueError("need trials >= 1 and output_size >= 2")
    gen = as_generator(rng)
    best = 0.0

    def consider(w):
        nonlocal best
        i_vz, i_xz = _two_point_info(p_minus, p_plus, w)
        if i_xz > 1e-12:
            best = max(best, i_vz / i_xz)

    for w in _extreme_channels(k):
        consider(w)
    for _ in range(trials):
        m = int(gen.integers(2, output_size + 1))
        conc = 10.0 ** gen.uniform(-1.5, 1.0)
        consider(gen.dirichlet(np.full(m, conc), size=k))
    return best


@dataclass(frozen=True)
class DecompositionCheck:
    per_coordinate_sum: float
    total: float
    passed: bool

    @property
    def gap(self) -> float:
        return self.total - self.per_coordinate_sum

    def __bool__(self):
        return self.passed


def info_decomposition_check(joint: FiniteJoint, d: int, tol: float = 1e-10) -> DecompositionCheck:
    """Check sum_j I(X_{<=n, j}; Z | V) <= I(X_{<=n}; Z | V).

    The data alphabet must be a d-fold product, encoded as in
    :func:`hypercube_joint`.
    """
    base = round(joint.x_size ** (1.0 / d))
    if base**d != joint.x_size:
        raise ValueError(f"alphabet of size {joint.x_size} is not a {d}-fold product")
    p = joint.tensor()
    n = joint.n
    shape = (p.shape[0],) + (base,) * (d * n) + p.shape[1 + n :]
    q = p.reshape(shape)
    # X_i coordinate j sits at axis 1 + i * d + j
    zax = tuple(range(1 + d * n, q.ndim))
    total = conditional_mutual_information(q, tuple(range(1, 1 + d * n)), zax, (0,))
    per = math.fsum(
        conditional_mutual_information(q, tuple(1 + i * d + j for i in range(n)), zax, (0,)) for j in range(d)
    )
    return DecompositionCheck(per, total, per <= total + tol)


def random_sequential_pipeline(
    n: int,
    epsilon: float,
    rng,
    x_size: int = 2,
    max_outputs: int = 3,
    adaptive: bool = True,
) -> list:
    """Random eps-pure-DP sequential channels for a FiniteJoint.

    Adaptive pipelines pick a fresh random channel for every history of
    earlier outputs. Returns a list suitable for :meth:`FiniteJoint.build`.
    """
    from .mechanisms import as_generator

    gen = as_generator(rng)
    specs = []
    sizes = []
    for i in range(n):
        m = int(gen.integers(2, max_outputs + 1))
        if adaptive and i > 0:
            table = {
                prev: random_pure_dp_channel(x_size, m, epsilon, gen)
                for prev in itertools.product(*[range(s) for s in sizes])
            }
            specs.append(table.__getitem__)
        else:
            specs.append(random_pure_dp_channel(x_size, m, epsilon, gen))
        sizes.append(m)
    return specs
