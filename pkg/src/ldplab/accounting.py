"""Privacy-parameter conversions and protocol budget checks.

Logs are natural throughout, including the squared log of the alphabet size.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

LN2 = math.log(2.0)


def dp_to_renyi_bound(epsilon: float, alpha: float) -> float:
    """Renyi-DP level of order alpha implied by eps-pure DP."""
    if epsilon < 0 or alpha < 1:
        raise ValueError("need epsilon >= 0 and alpha >= 1")
    if epsilon == 0:
        return 0.0
    curved = 2.0 * (alpha - 1.0) * epsilon**2 + min(2.0, math.expm1(epsilon)) * epsilon
    return min(curved, epsilon)


def kl_level(epsilon: float) -> float:
    """Per-release KL level min{eps, eps^2 / log 2} of an eps-DP release."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    return min(epsilon, epsilon * epsilon / LN2)


def dp_to_kl_average(epsilons: Iterable[float]) -> float:
    """Average KL privacy of a protocol whose i-th release is eps_i-DP."""
    eps = list(epsilons)
    if not eps:
        raise ValueError("need at least one privacy level")
    return math.fsum(kl_level(e) for e in eps) / len(eps)


@dataclass(frozen=True)
class ClauseResult:
    name: str
    applies: bool
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class AssumptionCheck:
    passed: bool
    clauses: tuple

    @property
    def violated(self) -> list:
        return [c.name for c in self.clauses if not c.holds]

    def __bool__(self):
        return self.passed


def _xlogx_inv(t: float) -> float:
    # t * log(1/t), continuous at t = 0
    return 0.0 if t <= 0 else -t * math.log(t)


def check_assumption_a1prime(epsilon: float, delta: float, alphabet_size: int) -> AssumptionCheck:
    """Evaluate every clause of the approximate-DP regularity assumption.

    All comparisons are non-strict. Clauses only needed for small eps
    (eps <= 1/6) are reported as holding when they do not apply. delta = 0
    passes everything.
    """
    if epsilon <= 0 or delta < 0 or alphabet_size < 2:
        raise ValueError("need epsilon > 0, delta >= 0 and alphabet_size >= 2")
    log2x = math.log(alphabet_size) ** 2
    scale = max(1.0 / epsilon, 1.0)
    small = epsilon <= 1.0 / 6.0

    # delta * log^2(eps/delta), taken as 0 at delta = 0
    tail = 0.0 if delta == 0 else delta * math.log(epsilon / delta) ** 2

    rows = [
        ("delta <= min(eps,1)/256", True, delta, min(epsilon, 1.0) / 256.0),
        ("delta*s*log(1/(delta*s)) <= eps^2, s=max(1/eps,1)", True, _xlogx_inv(delta * scale), epsilon**2),
        ("delta <= min(eps,eps^2)/log^2|X|", True, delta, min(epsilon, epsilon**2) / log2x),
        ("delta <= eps^5/(64 log^2|X|) [eps<=1/6]", small, delta, epsilon**5 / (64.0 * log2x)),
        ("delta*log^2(eps/delta) <= eps^5/16 [eps<=1/6]", small, tail, epsilon**5 / 16.0),
    ]
    clauses = []
    for name, applies, lhs, rhs in rows:
        holds = (not applies) or delta == 0 or lhs <= rhs
        clauses.append(ClauseResult(name, applies, lhs, rhs, holds))
    return AssumptionCheck(all(c.holds for c in clauses), tuple(clauses))


@dataclass(frozen=True)
class LedgerEntry:
    i: int
    t: int
    eps: float
    delta: float = 0.0


@dataclass
class CompositionLedger:
    """Per-(participant, round) privacy levels of a protocol."""

    n: int
    entries: list = field(default_factory=list)
    alphabet_size: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ledger needs n >= 1")
        entries = [e if isinstance(e, LedgerEntry) else LedgerEntry(**e) for e in self.entries]
        self.entries = []
        for e in entries:
            self.add(e.i, e.t, e.eps, e.delta)

    def add(self, i: int, t: int, eps: float, delta: float = 0.0) -> None:
        if eps < 0 or not (0.0 <= delta <= 1.0):
            raise ValueError(f"invalid level eps={eps}, delta={delta}")
        if any(e.i == i and e.t == t for e in self.entries):
            raise ValueError(f"duplicate ledger entry for participant {i}, round {t}")
        self.entries.append(LedgerEntry(int(i), int(t), float(eps), float(delta)))

    @property
    def rounds(self) -> int:
        return max((e.t for e in self.entries), default=0)

    def total_delta(self) -> float:
        return math.fsum(e.delta for e in self.entries)

    def total_kl(self) -> float:
        return math.fsum(kl_level(e.eps) for e in self.entries)

    def to_json(self) -> str:
        return json.dumps([{"i": e.i, "t": e.t, "eps": e.eps, "delta": e.delta} for e in self.entries])

    @classmethod
    def from_json(cls, text: str, n: int, alphabet_size: Optional[int] = None) -> "CompositionLedger":
        return cls(n=n, entries=json.loads(text), alphabet_size=alphabet_size)

    @classmethod
    def load(cls, path, n: int, alphabet_size: Optional[int] = None) -> "CompositionLedger":
        return cls.from_json(Path(path).read_text(), n, alphabet_size)


@dataclass(frozen=True)
class BudgetCheck:
    passed: bool
    delta_sum: float
    kl_sum: float
    kl_budget: float

    def __bool__(self):
        return self.passed


def check_compositional_budget(ledger: CompositionLedger, epsilon_kl: float, total_delta: float) -> BudgetCheck:
    """Check sum(delta) <= Delta <= 1/2 and sum(min{eps^2/log 2, eps}) <= n eps_kl.

    A ledger with no delta mass is fine for any Delta, since some admissible
    Delta (zero) exists.
    """
    d_sum = ledger.total_delta()
    kl_sum = ledger.total_kl()
    budget = ledger.n * epsilon_kl
    delta_ok = d_sum <= total_delta and d_sum <= 0.5
    return BudgetCheck(delta_ok and kl_sum <= budget, d_sum, kl_sum, budget)
