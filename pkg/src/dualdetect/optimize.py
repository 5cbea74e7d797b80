"""Numerical search for the likelihood thresholds minimizing Bayes error.

The objective Pe(lambda1, lambda2) has no useful closed-form minimizer,
so the search runs in log-threshold space in two stages: a coarse
uniform grid to locate the basin, then a derivative-free pattern search
that shrinks its step until the requested resolution. Both stages are
fully deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .decision_rules import LikelihoodThresholds, gammas_from_lambdas, local_metrics
from .fusion import FaultModel, FusionParams, fusion_quality, prob_error, prob_error_faulty
from .signal_model import Priors, SignalModel

__all__ = ["OptimizationResult", "minimize_error"]


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a threshold search.

    converged is False when the pattern search exhausted its evaluation
    budget before reaching the minimum step; the best point found so
    far is still reported.
    """

    lambda1: float
    lambda2: float
    objective_value: float
    evaluations: int
    converged: bool

    @property
    def thresholds(self) -> LikelihoodThresholds:
        return LikelihoodThresholds(self.lambda1, self.lambda2)


def minimize_error(
    model: SignalModel,
    priors: Priors,
    params: FusionParams,
    faults: FaultModel | None = None,
    *,
    log_bounds: tuple[float, float] = (-5.0, 5.0),
    grid_points: int = 101,
    initial_step: float = 0.1,
    min_step: float = 1e-6,
    max_refine_evaluations: int = 10_000,
) -> OptimizationResult:
    """Minimize the (optionally fault-adjusted) fused Bayes error.

    Stage 1 evaluates a grid_points x grid_points lattice over
    log_bounds in (ln lambda1, ln lambda2); ties prefer the smallest
    (ln lambda1, ln lambda2) pair. Stage 2 runs a compass pattern
    search from the best lattice point, halving the step whenever no
    axis move improves, until the step drops below min_step or the
    refinement evaluation budget is spent.
    """
    if grid_points < 2:
        raise ValueError(f"grid_points must be at least 2, got {grid_points}")
    lo, hi = log_bounds
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"log_bounds must be a finite increasing pair, got {log_bounds!r}")

    evaluations = 0

    def objective(log1: float, log2: float) -> float:
        nonlocal evaluations
        evaluations += 1
        lambdas = LikelihoodThresholds(math.exp(log1), math.exp(log2))
        if faults is None:
            gammas = gammas_from_lambdas(model, lambdas)
            quality = fusion_quality(local_metrics(model, gammas), params)
            return prob_error(priors, quality)
        return prob_error_faulty(model, priors, lambdas, params, faults)

    # Stage 1: coarse lattice. Row-major ascending scan plus strict
    # comparison implements the smallest-(u, v) tie break.
    span = hi - lo
    axis = [lo + span * i / (grid_points - 1) for i in range(grid_points)]
    best_u = best_v = axis[0]
    best_f = math.inf
    for u in axis:
        for v in axis:
            f = objective(u, v)
            if f < best_f:
                best_f, best_u, best_v = f, u, v

    # Stage 2: compass search, clamped to the lattice bounds.
    refine_used = 0
    step = initial_step
    while step >= min_step and refine_used + 4 <= max_refine_evaluations:
        candidates = (
            (best_u + step, best_v),
            (best_u - step, best_v),
            (best_u, best_v + step),
            (best_u, best_v - step),
        )
        move = None
        for u, v in candidates:
            u = min(max(u, lo), hi)
            v = min(max(v, lo), hi)
            f = objective(u, v)
            refine_used += 1
            if f < best_f:
                best_f, move = f, (u, v)
        if move is None:
            step /= 2.0
        else:
            best_u, best_v = move

    return OptimizationResult(
        lambda1=math.exp(best_u),
        lambda2=math.exp(best_v),
        objective_value=best_f,
        evaluations=evaluations,
        converged=step < min_step,
    )
