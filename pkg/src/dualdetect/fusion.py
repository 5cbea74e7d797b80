"""Decision fusion analytics: quorum probabilities, faults, Bayes error.

A fusing node collects n ternary votes (its neighborhood's reported
decisions, all assumed to share one ground truth) and declares an event
when at least k votes agree on it. The probability that a quorum forms
is a trinomial tail: i votes for the event of interest, j votes for the
opposite event, and the remaining n - i - j abstentions.

Sensor faults are modeled as a per-label transition table applied
independently to each sensor's decision before fusion; the closed-form
adjustment below propagates that table through the per-sensor metrics.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .decision_rules import (
    LikelihoodThresholds,
    LocalMetrics,
    gammas_from_lambdas,
    local_metrics,
)
from .signal_model import Hypothesis, Priors, SignalModel

__all__ = [
    "FusionParams",
    "FaultModel",
    "FusionQuality",
    "FusionOutcome",
    "multinomial_coeff",
    "fusion_quality",
    "enumerate_fusion_oracle",
    "prob_error",
    "fault_adjust",
    "prob_error_faulty",
]

MAX_ORACLE_SENSORS = 12

_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class FusionParams:
    """Quorum rule: k matching votes out of n neighborhood reports."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if not (1 <= self.k <= self.n):
            raise ValueError(f"k must satisfy 1 <= k <= n, got k={self.k}, n={self.n}")
        if 2 * self.k <= self.n:
            # Both events can reach quorum simultaneously; the closed-form
            # tail probabilities then double-count the conflicting vote
            # patterns and only the simulator's tie handling is exact.
            warnings.warn(
                f"2k <= n (k={self.k}, n={self.n}): both events can reach quorum "
                "in the same neighborhood and the closed-form error terms "
                "double-count those patterns",
                stacklevel=2,
            )


@dataclass(frozen=True)
class FaultModel:
    """Per-label decision corruption probabilities.

    alpha1: +1 reported as 0      alpha2: -1 reported as 0
    alpha3: +1 reported as -1     alpha4: -1 reported as +1
    alpha5:  0 reported as +1     alpha6:  0 reported as -1

    The total fault probability is the sum of all six. Per source label
    the outgoing corruption must not exceed one.
    """

    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    alpha5: float
    alpha6: float

    def __post_init__(self) -> None:
        for name in ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        for pair in (("alpha1", "alpha3"), ("alpha2", "alpha4"), ("alpha5", "alpha6")):
            total = getattr(self, pair[0]) + getattr(self, pair[1])
            if total > 1.0 + _UNIT_TOL:
                raise ValueError(
                    f"{pair[0]} + {pair[1]} must not exceed 1, got {total!r}"
                )

    @property
    def total_probability(self) -> float:
        return (
            self.alpha1 + self.alpha2 + self.alpha3
            + self.alpha4 + self.alpha5 + self.alpha6
        )

    @classmethod
    def uniform_split(cls, total: float) -> "FaultModel":
        """Split a total fault probability evenly over the six transitions."""
        if not (0.0 <= total <= 1.0):
            raise ValueError(f"total fault probability must lie in [0, 1], got {total!r}")
        share = total / 6.0
        return cls(share, share, share, share, share, share)

    @classmethod
    def none(cls) -> "FaultModel":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    def outgoing(self, source_code: int) -> tuple[tuple[int, float], tuple[int, float]]:
        """The two (target label, probability) corruption arcs for a source label."""
        if source_code == 1:
            return (0, self.alpha1), (-1, self.alpha3)
        if source_code == -1:
            return (0, self.alpha2), (1, self.alpha4)
        if source_code == 0:
            return (1, self.alpha5), (-1, self.alpha6)
        raise ValueError(f"invalid decision code {source_code!r}")


@dataclass(frozen=True)
class FusionQuality:
    """Neighborhood-level decision probabilities for a shared truth.

    q_d1 / q_d2: probability the fused decision detects event 1 / 2
    when that event is the truth. q_f1 / q_f2: probability of fusing to
    event 1 / 2 when the truth is quiet; q_f is their sum.
    """

    q_d1: float
    q_d2: float
    q_f1: float
    q_f2: float
    q_f: float


class FusionOutcome(NamedTuple):
    """Exact fused-decision distribution from the enumeration oracle."""

    event1: float
    event2: float
    normal: float


def multinomial_coeff(n: int, x: int, y: int) -> int:
    """Number of ways to place x votes of one kind and y of another among n."""
    if x < 0 or y < 0 or x + y > n:
        raise ValueError(f"need x, y >= 0 and x + y <= n, got n={n}, x={x}, y={y}")
    return math.comb(n, x) * math.comb(n - x, y)


def _quorum_tail(primary: float, secondary: float, n: int, k: int) -> float:
    """P(at least k primary votes) for i.i.d. ternary votes.

    Summed as a trinomial: i primary votes (outer), j secondary votes
    (inner), the rest abstaining.
    """
    rest = 1.0 - primary - secondary
    total = 0.0
    for i in range(k, n + 1):
        for j in range(0, n - i + 1):
            total += (
                multinomial_coeff(n, i, j)
                * primary**i
                * secondary**j
                * rest ** (n - i - j)
            )
    return total


def fusion_quality(metrics: LocalMetrics, params: FusionParams) -> FusionQuality:
    """Closed-form quorum probabilities from per-sensor metrics."""
    q_d1 = _quorum_tail(metrics.p_d1, metrics.p_m1, params.n, params.k)
    q_d2 = _quorum_tail(metrics.p_d2, metrics.p_m2, params.n, params.k)
    q_f1 = _quorum_tail(metrics.p_f1, metrics.p_f2, params.n, params.k)
    q_f2 = _quorum_tail(metrics.p_f2, metrics.p_f1, params.n, params.k)
    return FusionQuality(q_d1=q_d1, q_d2=q_d2, q_f1=q_f1, q_f2=q_f2, q_f=q_f1 + q_f2)


@lru_cache(maxsize=None)
def _vote_patterns(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    votes = np.array(list(itertools.product((1, -1, 0), repeat=n)), dtype=np.int8)
    count1 = (votes == 1).sum(axis=1)
    count2 = (votes == -1).sum(axis=1)
    return votes, count1, count2


def _fused_labels(count1: np.ndarray, count2: np.ndarray, k: int) -> np.ndarray:
    """Modified k-out-of-n rule applied to vote counts.

    Event quorums are k votes; if both events reach quorum the larger
    count wins and an exact tie falls back to the quiet label.
    """
    labels = np.zeros(count1.shape, dtype=np.int8)
    up = count1 >= k
    down = count2 >= k
    labels[up & (~down | (count1 > count2))] = 1
    labels[down & (~up | (count2 > count1))] = -1
    return labels


def enumerate_fusion_oracle(
    metrics: LocalMetrics, params: FusionParams, conditioning: Hypothesis
) -> FusionOutcome:
    """Exact fused-decision distribution by brute-force enumeration.

    Walks all 3^n vote vectors, scoring each by the product of its
    per-sensor probabilities under the conditioning hypothesis, and
    applies the same quorum rule the simulator uses. Independent of the
    closed-form tail sums on purpose; n is capped to keep the walk
    tractable.
    """
    if params.n > MAX_ORACLE_SENSORS:
        raise ValueError(
            f"enumeration oracle supports n <= {MAX_ORACLE_SENSORS}, got {params.n}"
        )
    if conditioning is Hypothesis.EVENT1:
        p_plus, p_minus = metrics.p_d1, metrics.p_m1
    elif conditioning is Hypothesis.EVENT2:
        p_plus, p_minus = metrics.p_m2, metrics.p_d2
    else:
        p_plus, p_minus = metrics.p_f1, metrics.p_f2
    p_zero = 1.0 - p_plus - p_minus

    votes, count1, count2 = _vote_patterns(params.n)
    per_vote = np.where(votes == 1, p_plus, np.where(votes == -1, p_minus, p_zero))
    mass = per_vote.prod(axis=1)
    labels = _fused_labels(count1, count2, params.k)
    return FusionOutcome(
        event1=float(mass[labels == 1].sum()),
        event2=float(mass[labels == -1].sum()),
        normal=float(mass[labels == 0].sum()),
    )


def prob_error(priors: Priors, quality: FusionQuality) -> float:
    """Bayesian probability that the fused decision is wrong."""
    return (
        priors.q0 * quality.q_f
        + priors.q1 * (1.0 - quality.q_d1)
        + priors.q2 * (1.0 - quality.q_d2)
    )


def fault_adjust(metrics: LocalMetrics, faults: FaultModel) -> LocalMetrics:
    """Propagate the fault transition table through per-sensor metrics.

    Each reported-label probability gains the mass faulted in from the
    other two labels and loses the mass faulted out. With a valid
    transition table the outputs are again probabilities; anything
    outside [0, 1] indicates inconsistent inputs and raises rather than
    being clamped.
    """
    a1, a2, a3 = faults.alpha1, faults.alpha2, faults.alpha3
    a4, a5, a6 = faults.alpha4, faults.alpha5, faults.alpha6
    m = metrics
    adjusted = {
        "p_d1": m.p_d1 + a4 * m.p_m1 + a5 * (1.0 - m.p_d1 - m.p_m1) - (a1 + a3) * m.p_d1,
        "p_d2": m.p_d2 + a3 * m.p_m2 + a6 * (1.0 - m.p_d2 - m.p_m2) - (a2 + a4) * m.p_d2,
        "p_f1": m.p_f1 + a4 * m.p_f2 + a5 * (1.0 - m.p_f1 - m.p_f2) - (a1 + a3) * m.p_f1,
        "p_f2": m.p_f2 + a3 * m.p_f1 + a6 * (1.0 - m.p_f1 - m.p_f2) - (a2 + a4) * m.p_f2,
        "p_m1": m.p_m1 + a3 * m.p_d1 + a6 * (1.0 - m.p_d1 - m.p_m1) - (a2 + a4) * m.p_m1,
        "p_m2": m.p_m2 + a4 * m.p_d2 + a5 * (1.0 - m.p_d2 - m.p_m2) - (a1 + a3) * m.p_m2,
    }
    for name, value in adjusted.items():
        if not (-_UNIT_TOL <= value <= 1.0 + _UNIT_TOL):
            raise ValueError(
                f"fault adjustment pushed {name} outside [0, 1] ({value!r}); "
                "inputs are inconsistent"
            )
    return LocalMetrics(**adjusted)


def prob_error_faulty(
    model: SignalModel,
    priors: Priors,
    lambdas: LikelihoodThresholds,
    params: FusionParams,
    faults: FaultModel,
) -> float:
    """Bayes error of the fused decision with faulty sensors.

    Composes the full pipeline: thresholds -> per-sensor metrics ->
    fault adjustment -> quorum probabilities -> Bayes error. With an
    all-zero fault model this equals the fault-free error exactly.
    """
    gammas = gammas_from_lambdas(model, lambdas)
    adjusted = fault_adjust(local_metrics(model, gammas), faults)
    return prob_error(priors, fusion_quality(adjusted, params))
