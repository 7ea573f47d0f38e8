"""Compact metric measure spaces: circle, interval and annulus.

Points are tuples of numbers, one coordinate for the circle ([0,1) with
wraparound) and the interval ([0,1]), two for the annulus ((r, theta) with
r in [1-w, 1+w] and angular theta in [0,1)). The annulus carries the max
metric, so metric balls are axis-aligned boxes and uniform sampling inside
a ball factorizes per coordinate.

Reference measures are normalized length on the circle and interval (total
mass 1) and the radial-by-angular product on the annulus (total mass 2w).
Balls are truncated at non-periodic boundaries, keeping every ball's
measure strictly positive; the sampling kernel normalizes by the truncated
measure.

All methods preserve the numeric type of their inputs: exact pipelines pass
``Fraction`` coordinates through unchanged, while checkers running in
padded float arithmetic pass floats through the very same code paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, UsageError
from .rationals import frac

HALF = Fraction(1, 2)

Point = tuple


def circ_dist(a, b):
    """Arc-length distance on the unit circle, inputs canonical in [0,1)."""
    t = (a - b) % 1
    return min(t, 1 - t)


def signed_circ_diff(a, b):
    """Signed representative of a - b in [-1/2, 1/2)."""
    return (a - b + HALF) % 1 - HALF


@dataclass(frozen=True)
class Space:
    """A compact metric space with a reference measure.

    kind is one of ``circle``, ``interval``, ``annulus``; ``w`` is the
    annulus half-width (None otherwise). Instances are immutable and safe
    to share across concurrent readers.
    """

    kind: str
    w: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("circle", "interval", "annulus"):
            raise UsageError(f"unknown space kind {self.kind!r}")
        if self.kind == "annulus":
            if self.w is None or self.w <= 0:
                raise DomainError("annulus half-width w must be positive")
        elif self.w is not None:
            raise UsageError(f"{self.kind} space takes no width parameter")

    @property
    def ndim(self) -> int:
        return 2 if self.kind == "annulus" else 1

    @property
    def total_measure(self):
        return 2 * self.w if self.kind == "annulus" else Fraction(1)

    @property
    def diameter(self):
        if self.kind == "circle":
            return HALF
        if self.kind == "interval":
            return Fraction(1)
        return max(2 * self.w, HALF)

    # -- points ---------------------------------------------------------

    def canonical(self, point) -> Point:
        """Reduce a point to canonical coordinates, validating the domain.

        Angular coordinates are reduced mod 1 into [0,1) (ties at the wrap
        resolve to 0); bounded coordinates must already lie in range.
        Numeric types are preserved.
        """
        if not isinstance(point, (tuple, list)) or len(point) != self.ndim:
            raise UsageError(
                f"{self.kind} points have {self.ndim} coordinate(s), got {point!r}")
        if self.kind == "circle":
            return (point[0] % 1,)
        if self.kind == "interval":
            x = point[0]
            if not 0 <= x <= 1:
                raise DomainError(f"interval coordinate {x} outside [0, 1]")
            return (x,)
        r, theta = point
        if not 1 - self.w <= r <= 1 + self.w:
            raise DomainError(f"radial coordinate {r} outside the annulus band")
        return (r, theta % 1)

    def exact_point(self, coords) -> Point:
        """Canonical point with coordinates coerced to exact Fractions."""
        if not isinstance(coords, (tuple, list)):
            coords = (coords,)
        return self.canonical(tuple(frac(c) for c in coords))

    # -- metric and measure ---------------------------------------------

    def dist(self, a: Point, b: Point):
        if len(a) != self.ndim or len(b) != self.ndim:
            raise UsageError(f"points {a!r}, {b!r} do not belong to a {self.kind}")
        if self.kind == "circle":
            return circ_dist(a[0], b[0])
        if self.kind == "interval":
            return abs(a[0] - b[0])
        return max(abs(a[0] - b[0]), circ_dist(a[1], b[1]))

    def ball_measure(self, center: Point, radius):
        """Measure of the radius-ball around center, truncated to the space."""
        if radius <= 0:
            raise DomainError("ball radius must be positive")
        if self.kind == "circle":
            return min(2 * radius, Fraction(1))
        if self.kind == "interval":
            c = center[0]
            return min(c + radius, 1) - max(c - radius, 0)
        rc = center[0]
        radial = min(rc + radius, 1 + self.w) - max(rc - radius, 1 - self.w)
        return radial * min(2 * radius, Fraction(1))

    # -- sampling --------------------------------------------------------

    def sample_uniform_ball(self, center: Point, radius, rng) -> Point:
        """Draw a point uniformly (w.r.t. the reference measure) from the
        radius-ball around center intersected with the space.

        Consumes exactly one uniform double per coordinate, so prefixes of
        a stream reproduce regardless of later draws. Coordinates are exact
        Fractions of the drawn doubles.
        """
        if radius <= 0:
            raise DomainError("ball radius must be positive")
        if self.kind == "circle":
            return (self._sample_arc(center[0], radius, rng),)
        if self.kind == "interval":
            lo = max(center[0] - radius, 0)
            hi = min(center[0] + radius, 1)
            return (lo + (hi - lo) * Fraction(float(rng.random())),)
        rc = center[0]
        lo = max(rc - radius, 1 - self.w)
        hi = min(rc + radius, 1 + self.w)
        r = lo + (hi - lo) * Fraction(float(rng.random()))
        theta = self._sample_arc(center[1], radius, rng)
        return (r, theta)

    @staticmethod
    def _sample_arc(center, radius, rng):
        u = Fraction(float(rng.random()))
        if 2 * radius >= 1:
            return u
        return (center - radius + 2 * radius * u) % 1

    def random_point(self, rng) -> Point:
        """Uniform point of the whole space (test and oracle helper)."""
        if self.kind == "circle":
            return (Fraction(float(rng.random())),)
        if self.kind == "interval":
            return (Fraction(float(rng.random())),)
        r = 1 - self.w + 2 * self.w * Fraction(float(rng.random()))
        return (r, Fraction(float(rng.random())))

    # -- covers ----------------------------------------------------------

    def _net_shape(self, delta1):
        if delta1 <= 0:
            raise DomainError("net radius must be positive")
        n = max(math.ceil(1 / Fraction(delta1)), 1)
        if self.kind != "annulus":
            return (n,)
        nr = max(math.ceil(2 * self.w / Fraction(delta1)), 1)
        return (nr, n)

    def epsilon_net(self, delta1) -> list[Point]:
        """Centers of a finite cover of the space by open delta1-balls.

        Grid construction: every point of the space lies strictly within
        delta1 of some center.
        """
        shape = self._net_shape(delta1)
        n = shape[-1]
        if self.kind == "circle":
            return [(Fraction(k, n),) for k in range(n)]
        if self.kind == "interval":
            return [(Fraction(2 * k + 1, 2 * n),) for k in range(n)]
        nr = shape[0]
        radial = [1 - self.w + Fraction(2 * k + 1, 2 * nr) * 2 * self.w
                  for k in range(nr)]
        return [(r, Fraction(k, n)) for r in radial for k in range(n)]

    def net_neighbors(self, point: Point, delta1) -> list[int]:
        """Indices into epsilon_net(delta1) of centers strictly within
        delta1 of point. Candidates come from inverting the grid layout and
        are verified exactly, so the scan cost is independent of net size.
        """
        shape = self._net_shape(delta1)
        n = shape[-1]

        def angular_hits(x):
            lo = math.floor(n * (x - delta1))
            hi = math.ceil(n * (x + delta1))
            hits = []
            for k in range(lo, hi + 1):
                if circ_dist(x, Fraction(k, n) % 1) < delta1:
                    hits.append(k % n)
            return sorted(set(hits))

        if self.kind == "circle":
            return angular_hits(point[0])
        if self.kind == "interval":
            x = point[0]
            lo = math.floor(n * (x - delta1) - Fraction(1, 2))
            hi = math.ceil(n * (x + delta1) - Fraction(1, 2))
            hits = []
            for k in range(max(lo, 0), min(hi, n - 1) + 1):
                if abs(x - Fraction(2 * k + 1, 2 * n)) < delta1:
                    hits.append(k)
            return hits
        nr = shape[0]
        r, theta = point
        u = (r - (1 - self.w)) / (2 * self.w)  # radial position in [0, 1]
        lo = math.floor(nr * u - Fraction(1, 2))
        hi = math.ceil(nr * u + Fraction(1, 2))
        radial_hits = []
        for k in range(max(lo - 1, 0), min(hi + 1, nr - 1) + 1):
            center = 1 - self.w + Fraction(2 * k + 1, 2 * nr) * 2 * self.w
            if abs(r - center) < delta1:
                radial_hits.append(k)
        return [ir * n + k for ir in radial_hits for k in angular_hits(theta)]


def circle() -> Space:
    return Space("circle")


def interval() -> Space:
    return Space("interval")


def annulus(w) -> Space:
    return Space("annulus", frac(w))


def parse_space(text: str) -> Space:
    """Parse a space spec: ``circle``, ``interval`` or ``annulus:w=<float>``."""
    s = text.strip()
    if s == "circle":
        return circle()
    if s == "interval":
        return interval()
    if s.startswith("annulus:"):
        params = _parse_params(s[len("annulus:"):])
        if set(params) != {"w"}:
            raise UsageError(f"annulus space takes exactly w=..., got {text!r}")
        return annulus(params["w"])
    raise UsageError(f"unknown space spec {text!r}")


def _parse_params(body: str) -> dict:
    out = {}
    for part in body.split(","):
        if "=" not in part:
            raise UsageError(f"malformed parameter {part!r}")
        key, _, value = part.partition("=")
        out[key.strip()] = frac(value)
    return out
