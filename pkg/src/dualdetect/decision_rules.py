"""Local ternary decision rule and its closed-form quality metrics.

Each sensor compares its scalar observation against three thresholds in
observation space and reports one of three labels: quiet (0), first
event (+1) or second event (-1). The thresholds derive from a pair of
likelihood-ratio levels; because the noise is Gaussian with unit
variance, every likelihood-ratio comparison collapses to a comparison
of the observation against a constant.

The decision regions are

    second event : x >= max(gamma2, gamma3)
    first event  : gamma1 <= x < gamma3   (otherwise)
    quiet        : everything else

which covers every ordering of the three thresholds, including the
degenerate ones where the first-event interval is empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signal_model import Hypothesis, SignalModel, normal_cdf

__all__ = [
    "LikelihoodThresholds",
    "ObservationThresholds",
    "LocalMetrics",
    "gammas_from_lambdas",
    "classify_observation",
    "classify_observations",
    "local_metrics",
]

_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class LikelihoodThresholds:
    """Likelihood-ratio test levels for the two events; both positive.

    lambda1 gates "first event vs quiet", lambda2 gates "second event
    vs quiet"; their ratio gates "second vs first".
    """

    lambda1: float
    lambda2: float

    def __post_init__(self) -> None:
        for name in ("lambda1", "lambda2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")


@dataclass(frozen=True)
class ObservationThresholds:
    """Observation-space cutoffs implied by a likelihood threshold pair.

    gamma1 separates quiet from the first event, gamma2 quiet from the
    second event, gamma3 the first event from the second. No ordering
    is imposed; all six orderings are meaningful and are handled by the
    classification rule.
    """

    gamma1: float
    gamma2: float
    gamma3: float

    def __post_init__(self) -> None:
        for name in ("gamma1", "gamma2", "gamma3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def event2_cutoff(self) -> float:
        """Lowest observation that is classified as the second event."""
        return max(self.gamma2, self.gamma3)


def gammas_from_lambdas(
    model: SignalModel, thresholds: LikelihoodThresholds
) -> ObservationThresholds:
    """Convert likelihood-ratio levels to observation-space cutoffs.

    With unit-variance Gaussian likelihoods, ln L1(x)/L0(x) >= ln lambda1
    rearranges to x >= gamma1, and similarly for the other two pairwise
    tests. The mean gaps divide, so strict mean ordering is required.
    """
    log1 = math.log(thresholds.lambda1)
    log2 = math.log(thresholds.lambda2)
    gamma1 = log1 / (model.m1 - model.m0) + (model.m1 + model.m0) / 2.0
    gamma2 = log2 / (model.m2 - model.m0) + (model.m2 + model.m0) / 2.0
    gamma3 = (log2 - log1) / (model.m2 - model.m1) + (model.m2 + model.m1) / 2.0
    return ObservationThresholds(gamma1, gamma2, gamma3)


def classify_observation(x: float, gammas: ObservationThresholds) -> Hypothesis:
    """Ternary decision for a single observation."""
    if x >= gammas.event2_cutoff:
        return Hypothesis.EVENT2
    if gammas.gamma1 <= x < gammas.gamma3:
        return Hypothesis.EVENT1
    return Hypothesis.NORMAL


def classify_observations(x: np.ndarray, gammas: ObservationThresholds) -> np.ndarray:
    """Vectorized form of :func:`classify_observation` returning int8 codes."""
    x = np.asarray(x)
    codes = np.zeros(x.shape, dtype=np.int8)
    second = x >= gammas.event2_cutoff
    first = ~second & (x >= gammas.gamma1) & (x < gammas.gamma3)
    codes[second] = Hypothesis.EVENT2.code
    codes[first] = Hypothesis.EVENT1.code
    return codes


@dataclass(frozen=True)
class LocalMetrics:
    """Per-sensor decision quality under each hypothesis.

    p_d1 / p_d2 are the detection probabilities of the two events,
    p_m1 / p_m2 the cross-event confusions (declaring the other event),
    p_f1 / p_f2 the false alarms from the quiet state. Each probability
    lies in [0, 1] and the per-hypothesis pairs cannot exceed one
    combined, since they are masses of disjoint decision regions.
    """

    p_d1: float
    p_d2: float
    p_f1: float
    p_f2: float
    p_m1: float
    p_m2: float

    def __post_init__(self) -> None:
        for name in ("p_d1", "p_d2", "p_f1", "p_f2", "p_m1", "p_m2"):
            value = getattr(self, name)
            if not (-_UNIT_TOL <= value <= 1.0 + _UNIT_TOL):
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        for a, b in (("p_d1", "p_m1"), ("p_d2", "p_m2"), ("p_f1", "p_f2")):
            total = getattr(self, a) + getattr(self, b)
            if total > 1.0 + _UNIT_TOL:
                raise ValueError(f"{a} + {b} must not exceed 1, got {total!r}")


def local_metrics(model: SignalModel, gammas: ObservationThresholds) -> LocalMetrics:
    """Closed-form decision-region masses under each hypothesis.

    The first-event region is the interval [gamma1, gamma3) (empty when
    gamma3 <= gamma1), the second-event region is [max(gamma2, gamma3),
    inf); both are evaluated with the standard normal CDF shifted by
    the hypothesis mean.
    """
    cutoff = gammas.event2_cutoff

    def first_mass(mean: float) -> float:
        if gammas.gamma3 <= gammas.gamma1:
            return 0.0
        return normal_cdf(gammas.gamma3 - mean) - normal_cdf(gammas.gamma1 - mean)

    def second_mass(mean: float) -> float:
        return 1.0 - normal_cdf(cutoff - mean)

    return LocalMetrics(
        p_d1=first_mass(model.m1),
        p_d2=second_mass(model.m2),
        p_f1=first_mass(model.m0),
        p_f2=second_mass(model.m0),
        p_m1=second_mass(model.m1),
        p_m2=first_mass(model.m2),
    )
