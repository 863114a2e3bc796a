"""Problem primitives: market parameters, belief handling, and virtual values."""
from __future__ import annotations

import math
from dataclasses import dataclass

# Bayes updates accumulate rounding; beliefs this close to an endpoint snap to it.
BELIEF_TOL = 1e-12


def belief(value: float) -> float:
    """Validate a probability weight on the high valuation.

    Values within 1e-12 of 0 or 1 are clamped to the endpoint; anything
    outside [-1e-12, 1 + 1e-12] is rejected.
    """
    v = float(value)
    if math.isnan(v):
        raise ValueError("belief must be a number, got NaN")
    if v < -BELIEF_TOL or v > 1.0 + BELIEF_TOL:
        raise ValueError(f"belief {value!r} lies outside [0, 1]")
    if abs(v) <= BELIEF_TOL:
        return 0.0
    if abs(v - 1.0) <= BELIEF_TOL:
        return 1.0
    return v


@dataclass(frozen=True)
class MarketParams:
    """One problem instance: the two valuations, the common discount factor,
    and the seller's prior on the high valuation."""

    v_low: float
    v_high: float
    delta: float
    mu0: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.v_low < self.v_high:
            raise ValueError(
                f"need 0 <= v_low < v_high, got v_low={self.v_low}, v_high={self.v_high}"
            )
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"discount factor must lie in (0, 1), got {self.delta}")
        object.__setattr__(self, "mu0", belief(self.mu0))

    @property
    def delta_v(self) -> float:
        """Valuation gap v_high - v_low, the high type's per-unit rent."""
        return self.v_high - self.v_low


def mu_bar_1(p: MarketParams) -> float:
    """First interior cutoff: the belief at which the virtual value hits zero."""
    return p.v_low / p.v_high


def virtual_value(p: MarketParams, mu: float) -> float:
    """Low valuation adjusted for the high type's information rent.

    Returns v_low - mu / (1 - mu) * (v_high - v_low).  Strictly decreasing in
    mu, positive below v_low / v_high and negative above.  Undefined at mu = 1
    (pole of the likelihood ratio).
    """
    m = belief(mu)
    if m == 1.0:
        raise ValueError("virtual value has a pole at belief 1")
    return p.v_low - m / (1.0 - m) * p.delta_v
