"""Penalty parameter schedules.

Three modes:

* ``fixed``    -- lambda set once, slightly above the consensus threshold.
* ``adaptive`` -- lambda_{k+1} = lambda_k * (||U||_F^2 + ||V||_F^2) /
  (2 |<U, V>|); the ratio is >= 1, so lambda never decreases.
* ``mult101``  -- lambda_{k+1} = 1.01 * lambda_k; comparison mode replicating
  an earlier heuristic, not recommended for production use.
"""

import warnings

import numpy as np

from .errors import DegenerateFactors, NonPositiveLambda
from .matcore import FactorPair
from .objective import lambda_threshold

FIXED = "fixed"
ADAPTIVE = "adaptive"
MULT101 = "mult101"

LAMBDA_CAP = 1e12
_EPS_FLOOR = 1e-8
_INNER_FLOOR = 1e-300


class PenaltySchedule:
    """Owns lambda_0, the current lambda_k, and the per-iteration history."""

    def __init__(self, mode, lambda0):
        if mode not in (FIXED, ADAPTIVE, MULT101):
            raise ValueError("unknown schedule mode %r" % mode)
        if not lambda0 > 0:
            raise NonPositiveLambda("lambda0 must be > 0, got %r" % lambda0)
        self.mode = mode
        self.lambda0 = float(lambda0)
        self.current = float(lambda0)
        self.history = [self.current]
        self.capped = False

    def copy(self):
        s = PenaltySchedule(self.mode, self.lambda0)
        s.current = self.current
        s.history = list(self.history)
        s.capped = self.capped
        return s

    def update(self, w: FactorPair):
        """Advance lambda_k once per outer iteration (no-op in fixed mode)."""
        if self.mode == FIXED:
            self.history.append(self.current)
            return self.current
        if self.mode == MULT101:
            self.current = min(1.01 * self.current, LAMBDA_CAP)
            self.history.append(self.current)
            return self.current
        return self._update_adaptive(w)

    def _update_adaptive(self, w):
        u = w.u.entries
        v = w.v.entries
        inner = abs(float(np.sum(u * v)))
        if inner < _INNER_FLOOR:
            # ratio undefined; keep lambda for this iteration
            self.history.append(self.current)
            return self.current
        # the mean-inequality guarantees ratio >= 1; clamp so rounding can
        # never shrink the penalty by an ulp
        ratio = max(
            (float(np.sum(u * u)) + float(np.sum(v * v))) / (2.0 * inner), 1.0)
        new = self.current * ratio
        if new > LAMBDA_CAP:
            if not self.capped:
                warnings.warn("penalty parameter clamped at %.1e" % LAMBDA_CAP)
            self.capped = True
            new = LAMBDA_CAP
        self.current = new
        self.history.append(self.current)
        return self.current


def update_adaptive(s: PenaltySchedule, w: FactorPair) -> float:
    """One adaptive update. Raises DegenerateFactors when <U, V> is zero."""
    if s.mode != ADAPTIVE:
        raise ValueError("update_adaptive requires an adaptive schedule")
    inner = abs(float(np.sum(w.u.entries * w.v.entries)))
    if inner < _INNER_FLOOR:
        raise DegenerateFactors("factor inner product is numerically zero")
    return s._update_adaptive(w)


def make_fixed(x, u0, margin=1.01) -> PenaltySchedule:
    """Fixed schedule at margin * threshold (floored at a tiny positive value
    when the threshold is exactly zero)."""
    bar = lambda_threshold(x, u0)
    if bar <= 0.0:
        bar = _EPS_FLOOR
    return PenaltySchedule(FIXED, margin * bar)


def make_adaptive(lambda0=1e-5) -> PenaltySchedule:
    """Adaptive schedule started at a small lambda0 (default 1e-5)."""
    return PenaltySchedule(ADAPTIVE, lambda0)


def make_mult101(lambda0=1e-5) -> PenaltySchedule:
    """Comparison-only 1.01-multiplicative schedule."""
    return PenaltySchedule(MULT101, lambda0)
