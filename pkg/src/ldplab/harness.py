"""Experiment driver: Monte Carlo risk estimation and verification suites.

An experiment is a JSON document naming a problem, a mechanism, an estimator
and a privacy level, plus optional sweeps over n, d and epsilon. Each
(grid point, replication) pair draws from its own random stream keyed by
``(seed, grid index, replication index)``, so results do not depend on how
trials are scheduled across workers.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import bounds as B
from .accounting import kl_level
from .channels import (
    PrivacySpec,
    audit_approx_dp,
    audit_pure_dp,
    project_to_pure_dp,
    projection_tv_bound,
    random_channel,
    row_tv,
)
from .estimators import (
    ProblemSpec,
    UnsampledCoordinateWarning,
    bernoulli_mean_estimator,
    correlated_estimator,
    gaussian_vector_estimator,
    logistic_excess_risk,
    logistic_moment_estimator,
    simulate_sparse_two_stage,
    sparse_two_stage_estimator,
)
from .mechanisms import (
    PrivateRelease,
    SeededRng,
    coordinate_subsample_mechanism,
    correlated_bit_mechanism,
    gaussian_noise_scale,
    linf_channel,
    linf_mechanism,
    rr_sign_channel,
    subsample_channel,
)

CSV_COLUMNS = (
    "family",
    "n",
    "d",
    "epsilon",
    "epsilon_kl",
    "mechanism",
    "estimator",
    "mean_loss",
    "std_error",
    "lower_bound_scaling",
    "lower_bound_instantiated",
    "seed",
)

VECTOR_MECHANISMS = ("auto", "coordinate_subsample", "linf", "gaussian_noise")
COMPATIBLE = {
    "bernoulli": (VECTOR_MECHANISMS, ("bernoulli_mean",)),
    "gaussian": (VECTOR_MECHANISMS, ("gaussian_vector",)),
    "logistic": (VECTOR_MECHANISMS, ("logistic_moment",)),
    "correlated": (("auto", "rr_sign"), ("correlated",)),
    "sparse_gaussian": (("auto", "rr_sign"), ("sparse_two_stage", "sparse_two_stage_counts")),
}
LOSSES = ("squared", "absolute")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    """One experiment: problem, mechanism, estimator, privacy and sweep.

    ``problem`` holds the raw problem fields. ``theta`` may be a scalar,
    broadcast to every coordinate (for the sparse family, placed on the
    first coordinate only). The correlated family takes ``p`` and an
    optional ``b_vector``; the default alternates signs.
    """

    problem: dict
    privacy: PrivacySpec
    mechanism: str = "auto"
    mechanism_params: dict = field(default_factory=dict)
    estimator: Optional[str] = None
    loss: str = "squared"
    replications: int = 100
    seed: int = 0
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        fam = self.problem.get("family")
        if fam not in COMPATIBLE:
            raise ConfigError(f"unknown problem family {fam!r}; expected one of {sorted(COMPATIBLE)}")
        mechs, ests = COMPATIBLE[fam]
        if self.mechanism not in mechs:
            raise ConfigError(f"mechanism {self.mechanism!r} is incompatible with family {fam!r}; allowed: {mechs}")
        if self.estimator is None:
            self.estimator = ests[0]
        if self.estimator not in ests:
            raise ConfigError(f"estimator {self.estimator!r} is incompatible with family {fam!r}; allowed: {ests}")
        if self.loss not in LOSSES:
            raise ConfigError(f"unknown loss {self.loss!r}; expected one of {LOSSES}")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        for key, values in self.grid.items():
            if key not in ("n", "d", "epsilon"):
                raise ConfigError(f"unknown grid axis {key!r}")
            if not values or any(not v > 0 for v in values):
                raise ConfigError(f"grid axis {key!r} needs positive entries")
        # validate every grid point eagerly so errors surface before running
        for point in self.points():
            self.problem_at(point)

    def points(self) -> list:
        ns = self.grid.get("n", [self.problem["n"]])
        ds = self.grid.get("d", [self.problem["d"]])
        es = self.grid.get("epsilon", [self.privacy.epsilon])
        return [{"n": int(n), "d": int(d), "epsilon": float(e)} for n, d, e in itertools.product(ns, ds, es)]

    def problem_at(self, point: dict) -> ProblemSpec:
        pr = self.problem
        fam, d = pr["family"], point["d"]
        theta = pr.get("theta", 0.0)
        b_vector = None
        if fam == "sparse_gaussian" and np.isscalar(theta):
            theta = np.zeros(d)
            theta[0] = pr.get("theta", 0.0)
        if fam == "correlated":
            p = float(pr.get("p", 0.5))
            b_vector = pr.get("b_vector")
            if b_vector is None:
                b_vector = np.where(np.arange(d) % 2 == 0, 1.0, -1.0)
            theta = np.asarray(b_vector, dtype=float) * (2.0 * p - 1.0)
        try:
            return ProblemSpec(
                family=fam,
                d=d,
                n=point["n"],
                theta=theta,
                sigma=float(pr.get("sigma", 1.0)),
                k=pr.get("k"),
                b_vector=b_vector,
            )
        except ValueError as exc:
            raise ConfigError(f"invalid problem at grid point {point}: {exc}") from exc

    def epsilon_kl(self, epsilon: float) -> float:
        if self.privacy.epsilon_kl is not None and "epsilon" not in self.grid:
            return float(self.privacy.epsilon_kl)
        return kl_level(epsilon)

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "privacy": self.privacy.to_dict(),
            "mechanism": {"name": self.mechanism, **self.mechanism_params},
            "estimator": self.estimator,
            "loss": self.loss,
            "replications": self.replications,
            "seed": self.seed,
            "grid": self.grid,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            mech = data.get("mechanism", "auto")
            if isinstance(mech, dict):
                mech = dict(mech)
                name = mech.pop("name", "auto")
            else:
                name, mech = mech, {}
            privacy = data.get("privacy", {})
            if isinstance(privacy, (int, float)):
                privacy = {"epsilon": privacy}
            return cls(
                problem=dict(data["problem"]),
                privacy=PrivacySpec.from_dict(privacy),
                mechanism=name,
                mechanism_params=mech,
                estimator=data.get("estimator"),
                loss=data.get("loss", "squared"),
                replications=int(data.get("replications", 100)),
                seed=int(data.get("seed", 0)),
                grid=dict(data.get("grid") or {}),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed config: {exc!r}") from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


@dataclass
class RiskEstimate:
    """Monte Carlo risk at one grid point together with its matched bound."""

    family: str
    n: int
    d: int
    epsilon: float
    epsilon_kl: float
    mechanism: str
    estimator: str
    mean_loss: float
    std_error: float
    replications: int
    per_coordinate: list
    lower_bound: Optional[B.LowerBoundReport]
    seed: int
    failures: int = 0

    @property
    def lower_bound_scaling(self) -> float:
        return math.nan if self.lower_bound is None else self.lower_bound.risk_bound

    @property
    def lower_bound_instantiated(self) -> float:
        if self.lower_bound is None or self.lower_bound.instantiated is None:
            return math.nan
        return self.lower_bound.instantiated

    def row(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "d": self.d,
            "epsilon": self.epsilon,
            "epsilon_kl": self.epsilon_kl,
            "mechanism": self.mechanism,
            "estimator": self.estimator,
            "mean_loss": self.mean_loss,
            "std_error": self.std_error,
            "lower_bound_scaling": self.lower_bound_scaling,
            "lower_bound_instantiated": self.lower_bound_instantiated,
            "seed": self.seed,
        }

    def to_dict(self) -> dict:
        out = self.row()
        out.update(
            replications=self.replications,
            per_coordinate=list(self.per_coordinate),
            failures=self.failures,
            lower_bound=None if self.lower_bound is None else self.lower_bound.to_dict(),
        )
        return out


def resolve_mechanism(name: str, epsilon: float) -> str:
    if name != "auto":
        return name
    return "coordinate_subsample" if epsilon >= 1 else "linf"


def _privatize(signs: np.ndarray, mech: str, epsilon: float, eps_kl: float, params: dict, gen) -> PrivateRelease:
    if mech == "coordinate_subsample":
        eps0 = params.get("eps0", 1.0)
        if eps0 == "even":
            eps0 = epsilon / min(signs.shape[1], math.floor(epsilon))
        return coordinate_subsample_mechanism(signs, epsilon, gen, eps0=float(eps0))
    if mech == "linf":
        return linf_mechanism(signs, epsilon, gen)
    if mech == "gaussian_noise":
        # l2 sensitivity of a sign vector is 2 sqrt(d); the KL budget covers the whole vector
        s = gaussian_noise_scale(2.0 * math.sqrt(signs.shape[1]), eps_kl)
        return PrivateRelease(signs + s * gen.standard_normal(signs.shape), math.inf, 1.0)
    raise ConfigError(f"unknown mechanism {mech!r}")


def _trial(cfg: ExperimentConfig, point: dict, g: int, r: int):
    """Run one replication; returns (total loss, per-coordinate loss, failed)."""
    spec = cfg.problem_at(point)
    eps = point["epsilon"]
    eps_kl = cfg.epsilon_kl(eps)
    gen = SeededRng(cfg.seed, (g, r)).generator
    mech = resolve_mechanism(cfg.mechanism, eps)
    failed = False
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UnsampledCoordinateWarning)
        if spec.family == "sparse_gaussian":
            if cfg.estimator == "sparse_two_stage_counts":
                est, _ = simulate_sparse_two_stage(spec, eps, gen, n=spec.n // 2)
            else:
                est = sparse_two_stage_estimator(spec.sample(gen), eps, spec, gen)
        elif spec.family == "correlated":
            rel = correlated_bit_mechanism(spec.sample(gen), eps, gen)
            est = correlated_estimator(rel, spec.b_vector)
        elif spec.family == "logistic":
            x, y = spec.sample(gen)
            rel = _privatize(y[:, None] * x, mech, eps, eps_kl, cfg.mechanism_params, gen)
            est = logistic_moment_estimator(rel, spec.d)
        elif spec.family == "bernoulli":
            x = spec.sample(gen)
            rel = _privatize(2.0 * x - 1.0, mech, eps, eps_kl, cfg.mechanism_params, gen)
            est = bernoulli_mean_estimator(rel, spec.d)
        else:
            x = spec.sample(gen)
            signs = np.where(x >= 0, 1.0, -1.0)
            rel = _privatize(signs, mech, eps, eps_kl, cfg.mechanism_params, gen)
            est = gaussian_vector_estimator(rel, spec)
        failed = any(issubclass(w.category, UnsampledCoordinateWarning) for w in caught)
    err = est - spec.theta
    per = err**2 if cfg.loss == "squared" else np.abs(err)
    if spec.family == "logistic":
        total = logistic_excess_risk(est, spec.theta, spec.d)
    else:
        total = float(per.sum())
    return total, per, failed


def _run_chunk(args):
    cfg, point, g, reps = args
    return g, [_trial(cfg, point, g, r) for r in reps]


def matched_lower_bound(cfg: ExperimentConfig, spec: ProblemSpec, eps_kl: float) -> Optional[B.LowerBoundReport]:
    """Corollary bound for the problem family, or None when none applies."""
    fam = spec.family
    if fam == "bernoulli":
        return B.corollary_bernoulli_bound(spec.n, spec.d, eps_kl, cfg.loss)
    if fam == "gaussian" and cfg.loss == "squared":
        return B.corollary_gaussian_bound(spec.n, spec.d, spec.sigma2, eps_kl)
    if fam == "sparse_gaussian" and cfg.loss == "squared" and spec.d >= 2 * spec.k:
        return B.corollary_sparse_gaussian_bound(spec.n, spec.d, spec.k, spec.sigma2, eps_kl)
    if fam == "logistic":
        return B.corollary_logistic_bound(spec.n, spec.d, eps_kl)
    return None


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list:
    """Estimate the risk at every grid point; one :class:`RiskEstimate` per point.

    Trials are independent of scheduling, and results are reduced in
    replication order, so the output is identical for any worker count.
    """
    points = config.points()
    reps = config.replications
    chunk = max(1, math.ceil(reps / max(1, 4 * workers)))
    tasks = [
        (config, p, g, list(range(s, min(s + chunk, reps))))
        for g, p in enumerate(points)
        for s in range(0, reps, chunk)
    ]
    results = {g: [] for g in range(len(points))}
    if workers <= 1:
        outputs = map(_run_chunk, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        outputs = pool.map(_run_chunk, tasks)
    try:
        for g, trials in outputs:
            results[g].extend(trials)
    finally:
        if workers > 1:
            pool.shutdown()

    table = []
    for g, point in enumerate(points):
        trials = results[g]
        losses = np.array([t[0] for t in trials])
        per = np.array([t[1] for t in trials])
        spec = config.problem_at(point)
        eps_kl = config.epsilon_kl(point["epsilon"])
        se = float(losses.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
        table.append(
            RiskEstimate(
                family=spec.family,
                n=spec.n,
                d=spec.d,
                epsilon=point["epsilon"],
                epsilon_kl=eps_kl,
                mechanism=resolve_mechanism(config.mechanism, point["epsilon"]),
                estimator=config.estimator,
                mean_loss=float(losses.mean()),
                std_error=se,
                replications=reps,
                per_coordinate=per.mean(axis=0).tolist(),
                lower_bound=matched_lower_bound(config, spec, eps_kl),
                seed=int(config.seed),
                failures=int(sum(t[2] for t in trials)),
            )
        )
    return table


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_results(table, fmt: str, path) -> Path:
    """Write a results table as CSV (fixed columns) or JSON (full detail)."""
    path = Path(path)
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}; use csv or json")
    try:
        if fmt == "csv":
            with path.open("w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                for est in table:
                    row = est.row()
                    writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
        else:
            rows = [_jsonable(est.to_dict()) for est in table]
            path.write_text(json.dumps({"columns": list(CSV_COLUMNS), "rows": rows}, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


_INT_COLUMNS = {"n", "d", "seed"}
_STR_COLUMNS = {"family", "mechanism", "estimator"}


def load_results(path) -> list:
    """Read the fixed CSV columns back from either output format."""
    path = Path(path)
    if path.suffix == ".json":
        rows = json.loads(path.read_text())["rows"]
        out = []
        for r in rows:
            out.append({c: (math.nan if r[c] is None else r[c]) for c in CSV_COLUMNS})
        return out
    with path.open(newline="") as fh:
        out = []
        for r in csv.DictReader(fh):
            conv = {}
            for c in CSV_COLUMNS:
                if c in _INT_COLUMNS:
                    conv[c] = int(r[c])
                elif c in _STR_COLUMNS:
                    conv[c] = r[c]
                else:
                    conv[c] = float(r[c])
            out.append(conv)
        return out


# verification suites


@dataclass
class CheckReport:
    """Outcome of one verification check; slack < 0 marks a violation."""

    check: str
    instances: int
    worst_slack: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "instances": self.instances,
            "worst_slack": self.worst_slack if math.isfinite(self.worst_slack) else None,
            "pass": self.passed,
        }


@dataclass
class SuiteReport:
    suite: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "pass": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _check(name: str, slacks, tol: float = 0.0) -> CheckReport:
    slacks = list(slacks)
    if not slacks:
        return CheckReport(name, 0, math.inf, True)
    worst = float(min(slacks))
    return CheckReport(name, len(slacks), worst, worst >= -tol)


def _suite_channels(gen, count: int) -> list:
    sizes = [2, 3, 4]
    pure_gap, proj_eps, tv_bin, tv_multi = [], [], [], []
    for _ in range(count):
        k = sizes[int(gen.integers(len(sizes)))]
        ch = random_channel(k, int(gen.integers(2, 6)), gen)
        eps = float(gen.uniform(0.1, 2.0))
        pure_gap.append(-audit_approx_dp(ch, audit_pure_dp(ch)))
        delta = audit_approx_dp(ch, eps)
        proj = project_to_pure_dp(ch, eps, delta)
        proj_eps.append(eps - audit_pure_dp(proj))
        slack = projection_tv_bound(eps, delta) - float(row_tv(ch, proj).max())
        (tv_bin if k == 2 else tv_multi).append(slack)
    return [
        _check("approx_audit_at_pure_level", pure_gap, 1e-12),
        _check("projection_pure_ratio", proj_eps, 1e-9),
        _check("projection_tv_binary_inputs", tv_bin, 1e-12),
        _check("projection_tv_multi_inputs", tv_multi, 1e-12),
    ]


def _random_bounded_pair(gen, k: int, b_max: float = 1.0):
    while True:
        p = gen.dirichlet(np.ones(k))
        q = p * np.exp(gen.uniform(-b_max, b_max, size=k))
        q /= q.sum()
        b = float(np.max(np.abs(np.log(q) - np.log(p))))
        if b <= b_max:
            return p, q, b


def _suite_sdpi(gen, count: int) -> list:
    from .oracles import _two_point_info, sdpi_constant_search

    slacks = []
    for _ in range(count):
        k = int(gen.integers(2, 6))
        p, q, b = _random_bounded_pair(gen, k)
        w = gen.dirichlet(np.full(int(gen.integers(2, 6)), 10.0 ** gen.uniform(-1, 1)), size=k)
        i_vz, i_xz = _two_point_info(p, q, w)
        slacks.append(2.0 * math.expm1(b) ** 2 * i_xz - i_vz)
    search = []
    if count:
        for delta in (0.1, 0.2, 0.5):
            pm, pp = B.bernoulli_pair(delta)
            found = sdpi_constant_search(pm, pp, 4, max(count // 2, 1), gen)
            search.append(B.sdpi_bernoulli_pair(delta).beta - found)
    return [_check("sdpi_bounded_likelihood", slacks, 1e-10), _check("sdpi_search_below_cap", search)]


def _pipelines(gen, count: int, eps_grid=(0.25, 0.5, 1.0, 2.0), n_max: int = 3):
    """Pure-DP sequential pipelines on binary data: RR plus random channels."""
    from .channels import DiscreteChannel
    from .oracles import binary_joint, random_sequential_pipeline

    out = []
    if count == 0:
        return out
    for eps in eps_grid:
        for n in range(1, n_max + 1):
            for delta in (0.2, 0.6, 0.95):
                out.append((eps, n, binary_joint(*B.bernoulli_pair(delta), n, DiscreteChannel.randomized_response(eps))))
            for _ in range(count):
                pair = B.bernoulli_pair(float(gen.uniform(0.0, 0.95)))
                chans = random_sequential_pipeline(n, eps, gen, adaptive=bool(gen.integers(2)))
                out.append((eps, n, binary_joint(*pair, n, chans)))
    return out


def _suite_info_budget(gen, count: int) -> list:
    from .oracles import exact_mutual_information

    slacks, ratios = [], []
    for eps, n, joint in _pipelines(gen, count):
        mi = exact_mutual_information(joint, "X;Z|V")
        budget = B.info_budget_full_interactive(n, kl_level(eps))
        slacks.append(budget - mi)
        ratios.append(mi / budget)
    report = _check("full_interactive_budget", slacks, 1e-10)
    ratio = CheckReport("max_ratio_exact_over_budget", len(ratios), 1.0 - max(ratios, default=0.0), max(ratios, default=0.0) <= 1.0 + 1e-10)
    return [report, ratio]


def _suite_assouad(gen, count: int) -> list:
    from .channels import DiscreteChannel
    from .oracles import (
        binary_joint,
        exact_assouad_testing_risk,
        exact_divergences,
        exact_mutual_information,
        hypercube_joint,
        info_decomposition_check,
        pipeline_marginal,
    )

    testing, hellinger, decomposition = [], [], []
    if count == 0:
        return [_check("assouad_exact_vs_bound", []), _check("hellinger_dominance", []), _check("information_decomposition", [])]
    for eps in (0.25, 0.5, 1.0):
        for delta in (0.1, 0.2, 0.5):
            joint = binary_joint(*B.bernoulli_pair(delta), 1, DiscreteChannel.randomized_response(eps))
            m = pipeline_marginal(joint)
            exact = exact_assouad_testing_risk(m[1], m[0])
            sdpi = B.sdpi_bounded_likelihood(-math.log1p(-delta))
            bound = B.assouad_testing_bound(1, sdpi, B.info_budget_full_interactive(1, kl_level(eps)))
            testing.append(exact - bound)
    for eps, n, joint in _pipelines(gen, max(count // 4, 1), n_max=2):
        m = pipeline_marginal(joint)
        h2 = exact_divergences(m[0], m[1]).hellinger_sq
        pair = joint.px
        b = float(np.max(np.abs(np.log(pair[1]) - np.log(pair[0]))))
        info = min(exact_mutual_information(joint, "X;Z", given_v=v) for v in (0, 1))
        hellinger.append(B.braverman_hellinger_bound(B.sdpi_bounded_likelihood(b), info) - h2)
    for d in (1, 2, 3):
        for n in (1, 2):
            if 2 ** (d * n) * 2**d * 4**n > 10**6:
                continue
            for _ in range(max(count // 8, 1)):
                pair = B.bernoulli_pair(float(gen.uniform(0.1, 0.9)))
                w = gen.dirichlet(np.ones(4), size=2**d)
                res = info_decomposition_check(hypercube_joint(d, *pair, n, w), d)
                decomposition.append(res.gap)
    return [
        _check("assouad_exact_vs_bound", testing),
        _check("hellinger_dominance", hellinger, 1e-12),
        _check("information_decomposition", decomposition, 1e-10),
    ]


def _suite_mechanisms(gen, count: int) -> list:
    slacks = []
    if count == 0:
        return [_check("mechanism_channel_audits", [])]
    for eps in (0.25, math.log(3.0), 1.0, 4.0):
        slacks.append(eps - audit_pure_dp(rr_sign_channel(eps)))
        for d in range(1, 7):
            slacks.append(eps - audit_pure_dp(linf_channel(d, eps)))
    for eps in (1.0, 2.0, 3.5):
        for d in (1, 2, 3, 4):
            slacks.append(eps - audit_pure_dp(subsample_channel(d, eps)))
    return [_check("mechanism_channel_audits", slacks, 1e-9)]


SUITES = {
    "channels": _suite_channels,
    "sdpi": _suite_sdpi,
    "info_budget": _suite_info_budget,
    "assouad": _suite_assouad,
    "mechanisms": _suite_mechanisms,
}
DEFAULT_INSTANCES = {"channels": 200, "sdpi": 1000, "info_budget": 5, "assouad": 8, "mechanisms": 1}


def verify_suite(name: str, seed: int = 0, instances: Optional[int] = None) -> SuiteReport:
    """Run a named verification suite.

    ``instances`` scales the number of random instances; zero gives a vacuous
    pass in which every check reports zero instances.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    count = DEFAULT_INSTANCES[name] if instances is None else int(instances)
    if count < 0:
        raise ValueError("instances must be nonnegative")
    gen = SeededRng(seed, (0xC0FFEE,)).generator
    return SuiteReport(name, SUITES[name](gen, count))
