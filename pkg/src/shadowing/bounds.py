"""Constructive quantities behind the shadowing dichotomy and attractor bounds.

Everything here is a closed-form or finitely-searched quantity used to turn
the qualitative statements (a random pseudotrajectory follows any given
tube with positive probability; an absorbing band traps pseudotrajectories)
into checkable numbers: the uniform-continuity radius delta, the ball
measure ratio eta, cover times of transitive orbits, the geometric block
bound 1 - (1 - eta^L)^k, and the absorbing-band data for the annulus
contraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import DomainError, SearchFailure, UsageError
from .rationals import frac
from .spaces import Space
from .systems import AnnulusSpiral


def delta_for_inclusion(system, d) -> Fraction:
    """Radius delta = d / (2 (1 + Lipschitz)).

    Guarantees: for any x, any z within delta of x and any y within d/2 of
    f(x), the closed delta-ball around y lies inside the closed d-ball
    around f(z), via dist(., f(z)) <= delta + d/2 + Lipschitz * delta <= d.
    """
    d = frac(d)
    if d <= 0:
        raise DomainError("d must be positive")
    return d / (2 * (1 + system.lipschitz))


def tube_delta(system, d, eps) -> Fraction:
    """Tube radius used by the dichotomy diagnostics:
    min(eps/4, delta_for_inclusion), so tube neighbors of a non-shadowable
    sequence are themselves non-shadowable at half the scale."""
    return min(frac(eps) / 4, delta_for_inclusion(system, d))


@dataclass(frozen=True)
class EtaBracket:
    """Two-sided bracket for the ball-measure ratio; ``value`` is the sound
    lower end, which keeps every probability lower bound valid."""

    lo: Fraction
    hi: Fraction
    method: str

    @property
    def value(self) -> Fraction:
        return self.lo

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def __float__(self) -> float:
        return float(self.lo)


def eta(space: Space, delta, d, net_radius=None) -> EtaBracket:
    """Ratio of the smallest delta-ball measure to the largest d-ball measure.

    Closed form on the circle (balls are congruent). Elsewhere the inf and
    sup are bracketed over an epsilon-net: evaluating at net centers bounds
    the ratio from above, while shrinking/growing the radii by the net
    radius bounds it from below. The default net radius delta/20 keeps the
    bracket width well under 10% of eta on the interval; pass a coarser
    ``net_radius`` on the annulus, where the product net grows
    quadratically as the radius shrinks.
    """
    delta = frac(delta)
    d = frac(d)
    if delta <= 0:
        raise DomainError("delta must be positive")
    if delta > d:
        raise DomainError("expected delta <= d")
    if space.kind == "circle":
        value = min(2 * delta, Fraction(1)) / min(2 * d, Fraction(1))
        return EtaBracket(value, value, "closed_form")
    h = frac(net_radius) if net_radius is not None else delta / 20
    if not 0 < h < delta:
        raise DomainError("net radius must lie in (0, delta)")
    centers = space.epsilon_net(h)
    inf_hi = min(space.ball_measure(c, delta) for c in centers)
    sup_lo = max(space.ball_measure(c, d) for c in centers)
    inf_lo = min(space.ball_measure(c, delta - h) for c in centers)
    sup_hi = max(space.ball_measure(c, d + h) for c in centers)
    return EtaBracket(inf_lo / sup_hi, inf_hi / sup_lo, "net_bracket")


def tube_probability_bound(eta_value, length: int) -> Fraction:
    """eta^length: lower bound on the probability that a random
    d-pseudotrajectory stays in the delta-tube around a given sequence for
    ``length`` consecutive steps."""
    eta_value = frac(eta_value)
    if not 0 < eta_value <= 1:
        raise DomainError("eta must lie in (0, 1]")
    if length < 0:
        raise DomainError("length must be nonnegative")
    return eta_value ** length


class CoverTime(NamedTuple):
    k1: int
    k2: int
    k: int


def cover_time(system, r, delta1, horizon: int = 10 ** 6) -> CoverTime:
    """Visitation times of the orbit of r over the delta1-net.

    k1 is the first time by which the orbit has entered every open
    delta1-ball of the net; k2 repeats the search restarted at step k1 + 1;
    k = k1 + k2 + 1. Fails loudly, naming an unvisited ball, if the horizon
    is exhausted (finite arithmetic cannot certify transitivity).
    """
    delta1 = frac(delta1)
    space = system.space
    centers = space.epsilon_net(delta1)
    point = space.canonical(r)

    def scan(start_point, budget):
        unvisited = set(range(len(centers)))
        p = start_point
        for n in range(budget + 1):
            unvisited.difference_update(space.net_neighbors(p, delta1))
            if not unvisited:
                return n, p
            p = system.apply(p)
        i = min(unvisited)
        raise SearchFailure(
            f"orbit never entered the open {delta1}-ball around net center "
            f"{centers[i]} within {budget} steps",
            target=centers[i], radius=delta1, horizon=budget)

    k1, p = scan(point, horizon)
    restart = system.apply(p)  # f^(k1+1)(r)
    k2, _ = scan(restart, horizon)
    return CoverTime(k1, k2, k1 + k2 + 1)


def nonshadow_lower_bound(eta_value, block_length: int, k: int) -> Fraction:
    """1 - (1 - eta^L)^k: lower bound on the probability that the length-kL
    prefix of a random pseudotrajectory is not shadowable at the halved
    scale. Nondecreasing in k, with limit 1."""
    eta_value = frac(eta_value)
    if not 0 < eta_value <= 1:
        raise DomainError("eta must lie in (0, 1]")
    if block_length < 1:
        raise DomainError("block length must be at least 1")
    if k < 0:
        raise DomainError("k must be nonnegative")
    return 1 - (1 - eta_value ** block_length) ** k


def blocks_for_confidence(eta_value, block_length: int, confidence) -> int:
    """Smallest k with nonshadow_lower_bound(eta, L, k) >= confidence."""
    eta_value = frac(eta_value)
    confidence = frac(confidence)
    if not 0 < confidence < 1:
        raise DomainError("confidence must lie in (0, 1)")
    miss = 1 - eta_value ** block_length
    if miss == 0:
        return 1
    return math.ceil(math.log(1 - confidence) / math.log(miss))


@dataclass(frozen=True)
class ProofQuantities:
    """Bundle of the constructive quantities; unused fields stay None."""

    d: Fraction | None = None
    delta: Fraction | None = None
    delta1: Fraction | None = None
    eta_lo: Fraction | None = None
    eta_hi: Fraction | None = None
    cover_k1: int | None = None
    cover_k2: int | None = None
    cover_k: int | None = None
    tail_n: int | None = None
    block_length: int | None = None
    # absorbing-band data for attractor experiments
    eps0: Fraction | None = None
    rho: Fraction | None = None
    band_lo: Fraction | None = None
    band_hi: Fraction | None = None
    n0: int | None = None
    d0: Fraction | None = None
    settle_s: int | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .rationals import jsonable
        out = {}
        for name in ("d", "delta", "delta1", "eta_lo", "eta_hi", "cover_k1",
                     "cover_k2", "cover_k", "tail_n", "block_length", "eps0",
                     "rho", "band_lo", "band_hi", "n0", "d0", "settle_s"):
            out[name] = jsonable(getattr(self, name))
        out.update(jsonable(self.extra))
        return out


def attractor_quantities(system: AnnulusSpiral, eps, y0, d=None,
                         margin=Fraction(1, 10)) -> ProofQuantities:
    """Absorbing-band data for the annulus contraction-rotation.

    The invariant circle r = 1 attracts the whole annulus. With
    rho = min(eps/4, w/2) the band W = {|r - 1| <= rho} absorbs: its image
    is the band of half-width lam * rho, and pseudotrajectories re-enter
    because |r_{n+1} - 1| <= lam |r_n - 1| + d.

    Returns rho, the entry time n0 (first n with lam^n |r0 - 1| <= lam*rho,
    strict interior entry), the noise ceiling d0 = (1 - margin) *
    min(eps/4, (1 - lam) rho) that keeps the band forward-invariant for
    every d < d0, and the settling time S (first n with lam^n rho <=
    delta/4, the time by which true orbits started in W are delta/4-close
    to the invariant circle). S and delta are evaluated at the working
    noise level ``d`` (default d0/2).
    """
    if not isinstance(system, AnnulusSpiral):
        raise UsageError("attractor quantities are defined for annulus spirals")
    eps = frac(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if not 0 <= margin < 1:
        raise DomainError("margin must lie in [0, 1)")
    space = system.space
    y0 = space.canonical(tuple(frac(c) for c in y0))
    lam = system.lam
    rho = min(eps / 4, space.w / 2)
    d0 = (1 - margin) * min(eps / 4, (1 - lam) * rho)
    if d is None:
        d_used = d0 / 2
    else:
        d_used = frac(d)
        if not 0 < d_used < d0:
            raise DomainError(f"need 0 < d < d0 = {d0}, got {d_used}")

    r_gap = abs(y0[0] - 1)
    n0 = 0
    gap = r_gap
    while gap > rho * lam:
        gap *= lam
        n0 += 1

    delta = delta_for_inclusion(system, d_used)
    settle = 0
    reach = rho
    while reach > delta / 4:
        reach *= lam
        settle += 1

    return ProofQuantities(
        d=d_used, delta=delta, eps0=eps / 4, rho=rho,
        band_lo=1 - rho, band_hi=1 + rho, n0=n0, d0=d0, settle_s=settle,
        extra={"lam": lam, "margin": margin, "y0": list(y0)})


def in_absorbing_band(point, rho) -> bool:
    """Membership in the band {|r - 1| <= rho} of an annulus point."""
    return abs(point[0] - 1) <= rho
