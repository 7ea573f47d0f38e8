"""Certified finite-horizon shadowability decisions.

The decision propagates the shadow set forward: A_0 is the closed eps-ball
around y_0 and A_{n+1} = f(A_n) intersected with the closed eps-ball around
y_{n+1}. A point lies in A_n exactly when it is the n-th iterate of some
orbit that has stayed within eps of the pseudotrajectory so far, so the
trajectory is eps-shadowable over its horizon iff every A_n is nonempty.

Modes:

* ``exact``: all arithmetic is rational, the sets are exact, and the
  verdict is Yes (with a certified witness, re-checked against its orbit)
  or No (with the first empty step). Unknown never occurs.
* ``outer``: float arithmetic with every propagated set padded outward, so
  an empty chain still certifies No; when the chain survives, a witness is
  attempted and the verdict is Yes only if its orbit re-check passes in
  float arithmetic, otherwise Unknown.

Two independent oracles cross-check the propagation: a closed-form span
criterion for rotations and a brute-force grid search over candidate
initial points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from . import enclosure
from .enclosure import EnclosureSet
from .errors import DomainError, EnclosureCapError, UsageError
from .pseudotraj import Pseudotrajectory
from .spaces import signed_circ_diff
from .systems import AnnulusSpiral, PiecewiseLinearMap

OUTER_PAD = 1e-13  # absolute outward padding per step in float mode


class Verdict(str, Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ShadowVerdict:
    verdict: Verdict
    witness: tuple | None
    n_empty: int | None
    final_set: EnclosureSet

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "witness": None if self.witness is None
            else [str(c) for c in self.witness],
            "n_empty": self.n_empty,
            "set_stats": {
                "fragments": self.final_set.fragment_count(),
                "measure": str(self.final_set.measure()),
                "variant": self.final_set.variant,
            },
        }


def _float_points(points):
    return [tuple(float(c) for c in p) for p in points]


def shadow_set_forward(system, traj: Pseudotrajectory, eps,
                       mode: str = "exact") -> list[EnclosureSet]:
    """The shadow sets A_0, ..., A_N; empty tails stay empty."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    if mode not in ("exact", "outer"):
        raise UsageError(f"unknown checker mode {mode!r}")
    space = system.space
    points = traj.points
    if mode == "outer":
        points = _float_points(points)
        eps = float(eps)
    first = enclosure.ball_set(space, points[0], eps)
    if mode == "outer":
        first = enclosure.expand(first, OUTER_PAD)
    sets = [first]
    for y in points[1:]:
        current = sets[-1]
        if current.is_empty():
            sets.append(current)
            continue
        image = system.apply_set(current)
        nxt = enclosure.intersect(image, enclosure.ball_set(space, y, eps))
        if mode == "outer":
            nxt = enclosure.expand(nxt, OUTER_PAD)
        sets.append(nxt)
    return sets


def orbit_tracks(system, points, x0, eps) -> bool:
    """Direct re-check: does the orbit of x0 stay within eps of points."""
    space = system.space
    z = space.canonical(x0)
    for y in points:
        if space.dist(z, y) > eps:
            return False
        z = system.apply(z)
    return True


def pull_back_witness(system, sets, m):
    """Candidate witness: a point of A_0 pulled back from a point of A_m
    through per-step preimages, staying inside each recorded shadow set.
    Returns None if some pull-back step finds no preimage in the set, which
    can only happen on degraded (outer) sets."""
    x = sets[m].pick_point()
    for n in range(m - 1, -1, -1):
        options = [p for p in system.preimages(x) if sets[n].contains(p)]
        if not options:
            return None
        x = options[0]
    return x


def decide_shadowable(system, traj: Pseudotrajectory, eps,
                      mode: str = "exact") -> ShadowVerdict:
    """Certified verdict for eps-shadowability over the trajectory horizon.

    Yes always carries a witness initial point whose orbit has been
    re-checked directly against the trajectory. Verdicts are monotone under
    prefix extension (Yes can turn into No, never back).
    """
    sets = shadow_set_forward(system, traj, eps, mode)
    for n, s in enumerate(sets):
        if s.is_empty():
            return ShadowVerdict(Verdict.NO, None, n, s)
    points = traj.points if mode == "exact" else _float_points(traj.points)
    check_eps = eps if mode == "exact" else float(eps)
    witness = pull_back_witness(system, sets, len(sets) - 1)
    if witness is not None and orbit_tracks(system, points, witness, check_eps):
        return ShadowVerdict(Verdict.YES, witness, None, sets[-1])
    if mode == "exact":
        # exact sets cannot produce a failing witness unless a cap merge
        # degraded them; surface that as the resource problem it is
        raise EnclosureCapError(
            "witness extraction failed on exact sets (cap degradation)",
            partial=sets[-1])
    return ShadowVerdict(Verdict.UNKNOWN, None, None, sets[-1])


def first_empty_step(system, traj: Pseudotrajectory, eps,
                     mode: str = "exact") -> int | None:
    """Smallest n with A_n empty, or None; prefix verdicts derive from it."""
    sets = shadow_set_forward(system, traj, eps, mode)
    for n, s in enumerate(sets):
        if s.is_empty():
            return n
    return None


# -- closed-form rotation oracle ------------------------------------------

def rotation_deviations(system, points) -> list:
    """Continuous lift of the deviations of points from the rotation flow.

    w_0 = 0 and w_{n+1} - w_n is the signed representative of
    y_{n+1} - y_n - alpha in [-1/2, 1/2).
    """
    if system.kind != "rotation":
        raise UsageError("deviation lift is defined for rotations")
    w = [Fraction(0) if isinstance(points[0][0], Fraction) else 0.0]
    for a, b in zip(points[1:], points):
        w.append(w[-1] + signed_circ_diff(a[0], b[0] + system.alpha))
    return w


def rotation_oracle(system, traj: Pseudotrajectory, eps) -> bool:
    """Closed-form shadowability of a rotation pseudotrajectory.

    True iff the deviation lift has span at most 2*eps. Valid for
    eps < 1/4 and step bounds below 1/4, where the lift is unambiguous
    and a span window corresponds to an actual shadowing orbit.
    """
    _check_oracle_region(traj, eps)
    w = rotation_deviations(system, traj.points)
    return max(w) - min(w) <= 2 * eps


def rotation_first_failure(system, traj: Pseudotrajectory, eps) -> int | None:
    """First horizon at which the rotation oracle says not shadowable."""
    _check_oracle_region(traj, eps)
    w = rotation_deviations(system, traj.points)
    lo = hi = w[0]
    for n, v in enumerate(w):
        lo = min(lo, v)
        hi = max(hi, v)
        if hi - lo > 2 * eps:
            return n
    return None


def _check_oracle_region(traj, eps):
    if eps <= 0:
        raise DomainError("eps must be positive")
    if eps >= Fraction(1, 4):
        raise DomainError("rotation oracle requires eps < 1/4")
    if traj.d >= Fraction(1, 4):
        raise DomainError("rotation oracle requires step bound below 1/4")


# -- brute-force grid oracle ----------------------------------------------

@dataclass(frozen=True)
class BruteForceResult:
    """Outcome of the grid search over candidate initial points.

    ``found`` grants each candidate a slack of lipschitz^n * resolution at
    step n (so a true witness is never missed); ``strict`` reports whether
    some candidate passed with zero slack.
    """

    found: bool
    strict: bool
    candidate: float | None
    max_slack: float

    def __bool__(self) -> bool:
        return self.found


def _apply_array(system, xs: np.ndarray) -> np.ndarray:
    if isinstance(system, PiecewiseLinearMap):
        bps = np.array([float(b) for b in system.breakpoints])
        slopes = np.array([float(s) for s in system.slopes])
        values = np.array([float(v) for v in system._values[:-1]])
        idx = np.clip(np.searchsorted(bps, xs, side="right") - 1,
                      0, len(slopes) - 1)
        out = values[idx] + slopes[idx] * (xs - bps[idx])
        return out % 1.0 if system.space.kind == "circle" else out
    raise UsageError("grid oracle supports one-dimensional maps only")


def _dist_array(system, xs: np.ndarray, y: float) -> np.ndarray:
    if system.space.kind == "circle":
        t = np.abs((xs - y) % 1.0)
        return np.minimum(t, 1.0 - t)
    return np.abs(xs - y)


def brute_force_oracle(system, traj: Pseudotrajectory, eps,
                       grid_resolution) -> BruteForceResult:
    """Grid search for a shadowing initial point, with growing slack.

    Candidates are the grid of spacing ``grid_resolution`` over the closed
    eps-ball around y_0 (endpoints included, so halving the resolution
    refines the grid in place). Intended as a statistical cross-check for
    short horizons on one-dimensional spaces.
    """
    if grid_resolution <= 0:
        raise DomainError("grid resolution must be positive")
    if isinstance(system, AnnulusSpiral):
        raise UsageError("grid oracle supports one-dimensional maps only")
    eps_f = float(eps)
    res = float(grid_resolution)
    y = [float(p[0]) for p in traj.points]
    lo = y[0] - eps_f
    k = math.floor(2 * eps_f / res)
    grid = lo + res * np.arange(k + 1)
    if grid[-1] < y[0] + eps_f:
        grid = np.append(grid, y[0] + eps_f)
    if system.space.kind == "circle":
        grid = grid % 1.0
    else:
        grid = np.clip(grid, 0.0, 1.0)
    lip = float(system.lipschitz)

    alive = np.ones(grid.shape, dtype=bool)
    strict_alive = alive.copy()
    xs = grid.copy()
    slack = res
    max_slack = 0.0
    for n, yn in enumerate(y):
        if n > 0:
            xs = _apply_array(system, xs)
            slack = min(slack * lip, 1.0)
        dist = _dist_array(system, xs, yn)
        max_slack = max(max_slack, min(slack, 1.0))
        alive &= dist <= eps_f + slack
        strict_alive &= dist <= eps_f
        if not alive.any():
            break
    found = bool(alive.any())
    candidate = float(grid[int(np.argmax(alive))]) if found else None
    return BruteForceResult(found, bool(strict_alive.any()), candidate,
                            max_slack)
