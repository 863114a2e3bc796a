"""Optimal mechanism at one prior: communication device, allocation, transfers,
and the equivalent posted price."""
from __future__ import annotations

from dataclasses import dataclass

from .core import MarketParams, belief
from .cutoffs import CutoffTable
from .value import ValueSurface, buyer_rent

INDIFFERENCE_TOL = 1e-12


class MechanismConsistencyError(Exception):
    """The posted-price indifference identity failed beyond tolerance."""


@dataclass(frozen=True)
class Split:
    """Bayes-plausible two-point distribution over posteriors with a trade
    probability at each posterior."""

    posterior_delay: float
    posterior_sale: float
    weight_delay: float
    weight_sale: float
    q_delay: float
    q_sale: float


@dataclass(frozen=True)
class Mechanism:
    """Canonical mechanism: report-indexed posterior distributions plus a
    deterministic allocation and transfer at each posterior."""

    prior: float
    n: int
    device: dict  # {"low": {posterior: prob}, "high": {posterior: prob}}
    trade_prob: dict  # {posterior: probability of trade}
    transfer: dict  # {posterior: payment}

    def to_json(self, table: CutoffTable) -> dict:
        view = posted_price_view(self, table)
        return {
            "prior": self.prior,
            "n": self.n,
            "device": {
                report: [[post, prob] for post, prob in dist.items()]
                for report, dist in self.device.items()
            },
            "trade_prob": [[post, q] for post, q in self.trade_prob.items()],
            "transfer": [[post, t] for post, t in self.transfer.items()],
            "posted_price": {
                "price": view.price,
                "accept_prob_high": view.accept_prob_high,
                "reject_posterior": view.reject_posterior,
            },
        }


@dataclass(frozen=True)
class PostedPrice:
    price: float
    accept_prob_high: float
    reject_posterior: float


@dataclass(frozen=True)
class ConstraintResiduals:
    """Residuals of the two constraints that bind at the optimum: the low
    type's participation and the high type's truth-telling."""

    participation_low: float
    truthtelling_high: float


def class_price(p: MarketParams, n: int) -> float:
    """Posted price for a class-n seller: v_low + (1 - delta^n) * dv.

    Computed as v_high - delta^n * dv so the high type's indifference
    v_high - price = delta^n * dv holds to the last bit.
    """
    if n < 0:
        raise ValueError("class index must be nonnegative")
    if n == 0:
        return p.v_low
    return p.v_high - p.delta**n * p.delta_v


def equilibrium_split(table: CutoffTable, mu0: float) -> Split:
    """Sale/delay split at one prior.

    Class 0 sells at the prior with no information; class n >= 1 splits
    between posterior 1 (sell) and the previous cutoff (delay).  With
    v_low = 0, every positive prior splits between 1 and an absorbing
    no-trade posterior 0, and belief 0 itself never trades.
    """
    m0 = belief(mu0)
    if table.degenerate:
        if m0 == 0.0:
            return Split(0.0, 0.0, 1.0, 0.0, 0.0, 0.0)
        return Split(0.0, 1.0, 1.0 - m0, m0, 0.0, 1.0)
    n = table.delay_class(m0)
    if n == 0:
        return Split(m0, m0, 0.0, 1.0, 1.0, 1.0)
    c = table.cutoffs[n - 1]
    w_sale = (m0 - c) / (1.0 - c)
    return Split(c, 1.0, 1.0 - w_sale, w_sale, 0.0, 1.0)


def build_mechanism(table: CutoffTable, mu0: float, knife_edge_delay_weight: float = 1.0) -> Mechanism:
    """Construct the optimal canonical mechanism at one prior.

    For class n >= 1 the low report is pooled onto the previous cutoff, the
    high report mixes between that cutoff and posterior 1, the sale transfer
    is the class-n posted price, and no-trade posteriors pay nothing.  At a
    prior sitting exactly on a cutoff the seller is indifferent between the
    two adjacent class mechanisms; `knife_edge_delay_weight` selects the
    longer-delay one (1.0, the default) or the shorter one (0.0).
    """
    m0 = belief(mu0)
    p = table.params

    if table.degenerate:
        if m0 == 0.0:
            return Mechanism(m0, 0, {"low": {0.0: 1.0}, "high": {0.0: 1.0}}, {0.0: 0.0}, {0.0: 0.0})
        return Mechanism(
            m0,
            table.delay_class(m0),
            {"low": {0.0: 1.0}, "high": {1.0: 1.0}},
            {1.0: 1.0, 0.0: 0.0},
            {1.0: p.v_high, 0.0: 0.0},
        )

    n = table.delay_class(m0)
    if n >= 1 and knife_edge_delay_weight != 1.0:
        if knife_edge_delay_weight != 0.0:
            raise ValueError("only the pure tie-breaks 0.0 and 1.0 are representable")
        if any(m0 == c for c in table.cutoffs[1:]):
            n -= 1

    if n == 0:
        return Mechanism(m0, 0, {"low": {m0: 1.0}, "high": {m0: 1.0}}, {m0: 1.0}, {m0: p.v_low})

    c = table.cutoffs[n - 1]
    b_delay_high = (1.0 - m0) / m0 * (c / (1.0 - c))
    price = class_price(p, n)
    return Mechanism(
        m0,
        n,
        {"low": {c: 1.0}, "high": {c: b_delay_high, 1.0: 1.0 - b_delay_high}},
        {1.0: 1.0, c: 0.0},
        {1.0: price, c: 0.0},
    )


def posted_price_view(m: Mechanism, table: CutoffTable) -> PostedPrice:
    """Read a mechanism as a take-it-or-leave-it price.

    For n >= 1, checks the defining indifference v_high - price =
    delta * rent(reject posterior) and that the low type strictly rejects;
    a violation beyond 1e-12 * v_high raises MechanismConsistencyError.
    Class 0 has no rejection on path: both types accept v_low.
    """
    p = table.params
    if m.n == 0 and not (table.degenerate and m.prior > 0.0):
        if table.degenerate:
            # belief 0 with v_low = 0: the null mechanism, never any trade
            return PostedPrice(price=p.v_high, accept_prob_high=0.0, reject_posterior=0.0)
        return PostedPrice(price=p.v_low, accept_prob_high=1.0, reject_posterior=m.prior)

    reject_posterior = min(post for post in m.trade_prob if m.trade_prob[post] == 0.0)
    price = m.transfer[1.0]
    s = ValueSurface(table)
    gap = (p.v_high - price) - p.delta * buyer_rent(s, reject_posterior)
    if abs(gap) > INDIFFERENCE_TOL * p.v_high:
        raise MechanismConsistencyError(
            f"high-type indifference off by {gap} at prior {m.prior}"
        )
    if not table.degenerate and not price > p.v_low:
        raise MechanismConsistencyError(f"price {price} does not exclude the low type")
    return PostedPrice(
        price=price,
        accept_prob_high=m.device["high"].get(1.0, 0.0),
        reject_posterior=reject_posterior,
    )


def check_binding_constraints(m: Mechanism, s: ValueSurface) -> ConstraintResiduals:
    """Evaluate both binding constraints at a constructed mechanism.

    Participation of the low type:  sum_mu' beta(mu'|low) (v_low q - t).
    Truth-telling of the high type: sum_mu' (beta(mu'|high) - beta(mu'|low))
    times (v_high q + (1 - q) delta * rent(mu') - t), where rent is the
    high type's continuation at the induced posterior.
    """
    p = s.params
    support = sorted(set(m.trade_prob) | set(m.transfer))
    pc = 0.0
    ic = 0.0
    for post in support:
        q = m.trade_prob.get(post, 0.0)
        t = m.transfer.get(post, 0.0)
        b_low = m.device["low"].get(post, 0.0)
        b_high = m.device["high"].get(post, 0.0)
        pc += b_low * (p.v_low * q - t)
        cont = 0.0 if q == 1.0 else p.delta * buyer_rent(s, post)
        ic += (b_high - b_low) * (p.v_high * q + (1.0 - q) * cont - t)
    return ConstraintResiduals(participation_low=pc, truthtelling_high=ic)
