"""Exponential-kernel (Caputo-Fabrizio) fractional time derivative, discretized.

For order alpha in (0,1) and step dtau the discrete derivative of a series
v^0..v^n at level n is

    D_alpha v(t_n) = P * sum_{k=1..n} (v^{n+1-k} - v^{n-k}) * rho^k,

with geometric weights rho = exp(-alpha*dtau/(1-alpha)) and prefactor
P = (exp(alpha*dtau/(1-alpha)) - 1) / (dtau*alpha). The truncation error of
this quadrature is O(dtau) and independent of alpha; for a series linear in
time it is exact. As alpha -> 1 the weights collapse (rho -> 0, P*rho -> 1/dtau)
and the operator tends to the one-step backward difference.

The weighted sum is accumulated recursively: pushing a new level multiplies the
running sum by rho and adds the newest increment, so a time march costs O(1)
per node per step instead of O(n). The naive summation is kept as an oracle.

Note the continuous kernel definition carries a 1/(1-alpha) normalization that
the discrete weights above absorb into P; the alpha -> 1 limit test pins the
convention down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ValidationError

__all__ = [
    "CFWeights",
    "ClassicalStep",
    "StepWeights",
    "HistoryAccumulator",
    "cf_weights",
    "empty_history",
    "history_sum_naive",
    "history_push",
    "cf_derivative_apply",
]


@dataclass(frozen=True)
class CFWeights:
    """Discretization constants for fractional order alpha in (0,1)."""

    alpha: float
    dtau: float
    decay: float       # rho = exp(-alpha*dtau/(1-alpha)), in (0,1)
    prefactor: float   # P = (exp(alpha*dtau/(1-alpha)) - 1)/(dtau*alpha), 1/years

    def weight(self, k: int) -> float:
        """Geometric lag weight rho**k for k >= 1."""
        if k < 1:
            raise ValidationError(["lag k must be >= 1"])
        return self.decay**k


@dataclass(frozen=True)
class ClassicalStep:
    """Sentinel for alpha = 1: the backward difference (v^{n+1}-v^n)/dtau.

    The exponential weights are singular at alpha = 1, so the classical mode
    is handled explicitly rather than as a numerical limit.
    """

    dtau: float


StepWeights = Union[CFWeights, ClassicalStep]


def cf_weights(alpha: float, dtau: float) -> StepWeights:
    """Build the discretization constants; alpha = 1 returns the classical marker."""
    if not (math.isfinite(dtau) and dtau > 0):
        raise ValidationError(["dtau must be positive"])
    if not (math.isfinite(alpha) and 0.0 < alpha <= 1.0):
        raise ValidationError(["alpha must lie in (0,1]"])
    if alpha == 1.0:
        return ClassicalStep(dtau=dtau)
    expo = alpha * dtau / (1.0 - alpha)
    try:
        prefactor = math.expm1(expo) / (dtau * alpha)
    except OverflowError:
        prefactor = math.inf  # alpha so close to 1 the prefactor exceeds float range
    return CFWeights(
        alpha=alpha,
        dtau=dtau,
        decay=math.exp(-expo),
        prefactor=prefactor,
    )


@dataclass(frozen=True)
class HistoryAccumulator:
    """Running weighted increment sums, one per node.

    sums[m] = sum_{k=1..n} (v^{n+1-k}[m] - v^{n-k}[m]) * decay^k at level n.
    last_delta keeps the most recent raw increment so the classical backward
    difference can be read off the same state.
    """

    sums: np.ndarray
    level: int
    decay: float
    last_delta: np.ndarray | None = None

    def __post_init__(self):
        sums = np.asarray(self.sums, dtype=float)
        sums.setflags(write=False)
        object.__setattr__(self, "sums", sums)
        if self.last_delta is not None:
            ld = np.asarray(self.last_delta, dtype=float)
            ld.setflags(write=False)
            object.__setattr__(self, "last_delta", ld)


def empty_history(n_nodes: int, w: StepWeights) -> HistoryAccumulator:
    decay = w.decay if isinstance(w, CFWeights) else 0.0
    return HistoryAccumulator(sums=np.zeros(n_nodes), level=0, decay=decay)


def history_sum_naive(series: Sequence[float], w: CFWeights) -> float:
    """Direct O(n) evaluation of the weighted increment sum for one node.

    series holds v^0..v^n; requires n >= 1.
    """
    if not isinstance(w, CFWeights):
        raise ValidationError(["naive history sum requires fractional weights"])
    vals = np.asarray(series, dtype=float)
    n = vals.size - 1
    if n < 1:
        raise ValidationError(["series must hold at least two levels"])
    total = 0.0
    for k in range(1, n + 1):
        total += (vals[n + 1 - k] - vals[n - k]) * w.decay**k
    return total


def history_push(
    acc: HistoryAccumulator, v_new: np.ndarray, v_prev: np.ndarray
) -> HistoryAccumulator:
    """Advance the accumulator by one level: S <- decay*(S + v_new - v_prev)."""
    v_new = np.asarray(v_new, dtype=float)
    v_prev = np.asarray(v_prev, dtype=float)
    if v_new.shape != acc.sums.shape or v_prev.shape != acc.sums.shape:
        raise ValidationError(["node vectors must match the accumulator length"])
    delta = v_new - v_prev
    return HistoryAccumulator(
        sums=acc.decay * (acc.sums + delta),
        level=acc.level + 1,
        decay=acc.decay,
        last_delta=delta,
    )


def cf_derivative_apply(acc: HistoryAccumulator, w: StepWeights) -> np.ndarray:
    """Discrete time-derivative values at the accumulator's level, per node."""
    if isinstance(w, ClassicalStep):
        if acc.last_delta is None:
            raise ValidationError(["classical difference needs at least one push"])
        return acc.last_delta / w.dtau
    if acc.level < 1:
        raise ValidationError(["derivative needs at least one pushed level"])
    if acc.decay != w.decay:
        raise ValidationError(["accumulator was built with different weights"])
    return w.prefactor * acc.sums
