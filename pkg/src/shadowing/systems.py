"""Model self-maps of the spaces, with exact set-valued images.

Every shipped map is piecewise linear with rational parameters: circle and
interval maps are built on one piecewise-linear engine (doubling, tent,
rotations and general ``pwl`` maps are thin constructors over it), and the
annulus carries a contraction-rotation. Point evaluation, images of
enclosure sets and pointwise preimages are therefore computed exactly in
rational arithmetic; outer and inner image enclosures coincide.

The same methods run unchanged on float inputs, which is how the padded
float checker mode reuses this module.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from . import enclosure
from .enclosure import EnclosureSet
from .errors import DomainError, UsageError
from .rationals import frac
from .spaces import Space, annulus, circle, interval


@dataclass(frozen=True)
class PiecewiseLinearMap:
    """A continuous piecewise-linear self-map of the circle or interval.

    ``breakpoints`` are the left endpoints of the linear pieces (the first
    must be 0), ``slopes`` the per-piece slopes, ``offset`` the value at 0.
    On the circle the map is taken mod 1 and must close up (integer total
    winding); on the interval all piece values must stay inside [0, 1].
    Slopes must be nonzero so pointwise preimages are finite.
    """

    space: Space
    breakpoints: tuple
    slopes: tuple
    offset: Fraction
    kind: str = "pwl"

    def __post_init__(self):
        if self.space.kind not in ("circle", "interval"):
            raise UsageError("piecewise-linear maps live on circle or interval")
        bps = self.breakpoints
        if not bps or bps[0] != 0 or len(bps) != len(self.slopes):
            raise UsageError("need matching breakpoints (starting at 0) and slopes")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])) or bps[-1] >= 1:
            raise UsageError("breakpoints must increase strictly inside [0, 1)")
        if any(s == 0 for s in self.slopes):
            raise UsageError("zero slopes are not supported")
        values = [self.offset]
        ends = list(bps[1:]) + [Fraction(1)]
        for b, e, s in zip(bps, ends, self.slopes):
            values.append(values[-1] + s * (e - b))
        object.__setattr__(self, "_values", tuple(values))
        degree = values[-1] - values[0]
        if self.space.kind == "circle":
            if degree != int(degree):
                raise UsageError("circle map must have integer winding number")
            object.__setattr__(self, "degree", int(degree))
        else:
            if any(v < 0 or v > 1 for v in values):
                raise UsageError("interval map must send [0, 1] into itself")
            object.__setattr__(self, "degree", None)

    @property
    def lipschitz(self):
        return max(abs(s) for s in self.slopes)

    @property
    def alpha(self):
        if self.kind != "rotation":
            raise UsageError("alpha is defined for rotations only")
        return self.offset

    def _piece(self, x):
        i = bisect_right(self.breakpoints, x) - 1
        return min(i, len(self.slopes) - 1)

    def _value(self, x):
        """Piecewise value on [0, 1] before any wrap."""
        i = self._piece(x)
        return self._values[i] + self.slopes[i] * (x - self.breakpoints[i])

    def _lift(self, x):
        """Continuous lift on [0, 2), using the winding number on the circle."""
        if x >= 1:
            return self._value(x - 1) + self.degree
        return self._value(x)

    def apply(self, point):
        x = point[0]
        v = self._value(x)
        if self.space.kind == "circle":
            return (v % 1,)
        return (v,)

    def apply_set(self, s: EnclosureSet) -> EnclosureSet:
        if s.space != self.space:
            raise UsageError("enclosure set belongs to a different space")
        if self.space.kind == "circle":
            frags = []
            for start, length in s.fragments:
                frags.extend(self._arc_image(start, length))
            return enclosure.make(self.space, frags, s.variant)
        frags = [self._seg_image(lo, hi) for lo, hi in s.fragments]
        return enclosure.make(self.space, frags, s.variant)

    def _cuts(self, lo, hi):
        cuts = set()
        for b in self.breakpoints:
            for m in (0, 1):
                c = b + m
                if lo < c < hi:
                    cuts.add(c)
        return sorted(cuts)

    def _arc_image(self, start, length):
        xs = [start] + self._cuts(start, start + length) + [start + length]
        arcs = []
        for u, v in zip(xs, xs[1:]):
            fu, fv = self._lift(u), self._lift(v)
            lo, hi = (fu, fv) if fu <= fv else (fv, fu)
            arcs.append((lo % 1, min(hi - lo, 1)))
        return arcs

    def _seg_image(self, lo, hi):
        xs = [lo] + [b for b in self.breakpoints if lo < b < hi] + [hi]
        vals = [self._value(x) for x in xs]
        return (min(vals), max(vals))

    def preimages(self, point) -> list:
        """All solutions of apply(x) == point, canonical and sorted."""
        x = point[0]
        bps = list(self.breakpoints) + [Fraction(1)]
        found = set()
        for i, s in enumerate(self.slopes):
            v_lo, v_hi = self._values[i], self._values[i + 1]
            lo, hi = (v_lo, v_hi) if v_lo <= v_hi else (v_hi, v_lo)
            if self.space.kind == "circle":
                ms = range(math.ceil(lo - x), math.floor(hi - x) + 1)
            else:
                ms = (0,) if lo <= x <= hi else ()
            for m in ms:
                t = bps[i] + (x + m - v_lo) / s
                if bps[i] <= t <= bps[i + 1]:
                    found.add(self.space.canonical((t,))[0])
        return sorted((t,) for t in found)


@dataclass(frozen=True)
class AnnulusSpiral:
    """Contraction toward the unit circle composed with a rigid rotation:
    (r, theta) -> (1 + lam*(r-1), theta + alpha)."""

    space: Space
    lam: Fraction
    alpha: Fraction
    kind: str = "annulus_spiral"

    def __post_init__(self):
        if self.space.kind != "annulus":
            raise UsageError("spiral maps live on an annulus")
        if not 0 < self.lam < 1:
            raise DomainError("contraction factor must satisfy 0 < lam < 1")

    @property
    def lipschitz(self):
        return max(self.lam, Fraction(1))

    def apply(self, point):
        r, theta = point
        return (1 + self.lam * (r - 1), (theta + self.alpha) % 1)

    def apply_set(self, s: EnclosureSet) -> EnclosureSet:
        if s.space != self.space:
            raise UsageError("enclosure set belongs to a different space")
        frags = [(1 + self.lam * (rlo - 1), 1 + self.lam * (rhi - 1),
                  (a + self.alpha) % 1, l)
                 for rlo, rhi, a, l in s.fragments]
        return enclosure.make(self.space, frags, s.variant)

    def preimages(self, point) -> list:
        r, theta = point
        r_prev = 1 + (r - 1) / self.lam
        if abs(r_prev - 1) > self.space.w:
            return []
        return [(r_prev, (theta - self.alpha) % 1)]


def orbit(system, x0, n: int) -> list:
    """[x0, f(x0), ..., f^n(x0)] as canonical points."""
    if n < 0:
        raise DomainError("orbit length must be nonnegative")
    pts = [system.space.canonical(x0)]
    for _ in range(n):
        pts.append(system.apply(pts[-1]))
    return pts


# -- constructors ---------------------------------------------------------

def doubling() -> PiecewiseLinearMap:
    return PiecewiseLinearMap(circle(), (Fraction(0),), (Fraction(2),),
                              Fraction(0), kind="doubling")


def tent(s) -> PiecewiseLinearMap:
    s = frac(s)
    if not 0 < s <= 2:
        raise DomainError("tent slope must lie in (0, 2] to keep [0,1] invariant")
    return PiecewiseLinearMap(interval(), (Fraction(0), Fraction(1, 2)),
                              (s, -s), Fraction(0), kind="tent")


def rotation(alpha) -> PiecewiseLinearMap:
    return PiecewiseLinearMap(circle(), (Fraction(0),), (Fraction(1),),
                              frac(alpha) % 1, kind="rotation")


def pwl(pairs, offset=0, space_kind: str = "circle") -> PiecewiseLinearMap:
    """General piecewise-linear map from (breakpoint, slope) pairs."""
    pairs = sorted((frac(b), frac(s)) for b, s in pairs)
    space = circle() if space_kind == "circle" else interval()
    return PiecewiseLinearMap(space, tuple(b for b, _ in pairs),
                              tuple(s for _, s in pairs), frac(offset))


def annulus_spiral(lam, alpha, w) -> AnnulusSpiral:
    return AnnulusSpiral(annulus(w), frac(lam), frac(alpha) % 1)


def parse_system(text: str):
    """Parse a system spec string.

    Grammar: ``doubling``, ``tent:s=<rational>``, ``rotation:alpha=<rational>``,
    ``annulus:lambda=<rational>,alpha=<rational>,w=<float>``, and
    ``pwl:<breakpoint:slope,...>[,v0=<rational>][,space=circle|interval]``.
    """
    s = text.strip()
    if s == "doubling":
        return doubling()
    head, _, body = s.partition(":")
    if head == "tent":
        return tent(_params(body, {"s"})["s"])
    if head == "rotation":
        return rotation(_params(body, {"alpha"})["alpha"])
    if head == "annulus":
        p = _params(body, {"lambda", "alpha", "w"})
        return annulus_spiral(p["lambda"], p["alpha"], p["w"])
    if head == "pwl":
        pairs = []
        offset = 0
        space_kind = "circle"
        for part in body.split(","):
            if part.startswith("v0="):
                offset = frac(part[3:])
            elif part.startswith("space="):
                space_kind = part[len("space="):].strip()
            else:
                b, _, sl = part.partition(":")
                pairs.append((frac(b), frac(sl)))
        return pwl(pairs, offset, space_kind)
    raise UsageError(f"unknown system spec {text!r}")


def _params(body: str, keys: set) -> dict:
    out = {}
    for part in body.split(","):
        key, _, value = part.partition("=")
        if key.strip() not in keys:
            raise UsageError(f"unexpected parameter {key!r}")
        out[key.strip()] = frac(value)
    if set(out) != keys:
        raise UsageError(f"expected parameters {sorted(keys)}")
    return out
