"""Random and constructed pseudotrajectories.

A d-pseudotrajectory is a finite sequence y_0, ..., y_N whose steps track
the map up to d: dist(y_{n+1}, f(y_n)) <= d, with closed inequalities
throughout. The random generator realizes the Markov kernel that draws
y_{n+1} uniformly (w.r.t. the reference measure) from the d-ball around
f(y_n) truncated to the space, so verdicts downstream are statements about
that chain.

Reproducibility: the stream for trial t is derived from the master seed by
``numpy.random.SeedSequence(master_seed, spawn_key=(t,))``; trials are
independent and can run in any order or in parallel.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DomainError, SearchFailure, UsageError
from .rationals import frac, jsonable
from .spaces import Point
from .systems import orbit


@dataclass(frozen=True)
class Provenance:
    kind: str  # random | spliced | worst_case | exact_orbit | loaded
    seed: int | None = None
    trial: int | None = None


@dataclass(frozen=True)
class Pseudotrajectory:
    points: tuple
    d: Fraction
    provenance: Provenance

    def __post_init__(self):
        if not self.points:
            raise UsageError("a pseudotrajectory needs at least one point")
        if self.d < 0:
            raise DomainError("step bound must be nonnegative")

    @property
    def horizon(self) -> int:
        return len(self.points) - 1

    def prefix(self, m: int) -> "Pseudotrajectory":
        if not 0 <= m <= self.horizon:
            raise UsageError(f"prefix horizon {m} outside [0, {self.horizon}]")
        return Pseudotrajectory(self.points[:m + 1], self.d, self.provenance)


def trial_stream(master_seed: int, trial: int = 0) -> np.random.Generator:
    """Independent, reproducible random stream for one trial."""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(trial,)))


def generate(system, y0: Point, d, n: int, rng,
             provenance: Provenance | None = None) -> Pseudotrajectory:
    """Sample a random d-pseudotrajectory of length n from y0.

    Each step draws y_{k+1} uniformly from the d-ball around f(y_k)
    intersected with the space. Consumes a fixed number of uniforms per
    step, so a shorter horizon with the same stream yields a prefix.
    """
    if d <= 0:
        raise DomainError("step bound d must be positive")
    if n < 0:
        raise DomainError("horizon must be nonnegative")
    space = system.space
    pts = [space.canonical(y0)]
    for _ in range(n):
        center = system.apply(pts[-1])
        pts.append(space.sample_uniform_ball(center, d, rng))
    return Pseudotrajectory(tuple(pts), frac(d),
                            provenance or Provenance("random"))


def exact_orbit(system, x0: Point, n: int) -> Pseudotrajectory:
    """The true orbit of x0, packaged as a 0-error pseudotrajectory."""
    return Pseudotrajectory(tuple(orbit(system, x0, n)), Fraction(0),
                            Provenance("exact_orbit"))


def validate(system, points, d) -> bool:
    """True iff every consecutive pair satisfies dist(y_{n+1}, f(y_n)) <= d."""
    space = system.space
    return all(space.dist(points[k + 1], system.apply(points[k])) <= d
               for k in range(len(points) - 1))


def splice(system, r: Point, z0: Point, tail: Pseudotrajectory, delta1,
           horizon: int = 10 ** 6) -> Pseudotrajectory:
    """Connect z0 to the tail through the orbit of a transit point r.

    Finds the first n1 with dist(z0, f^n1(r)) < 2*delta1 and the first
    n2 >= n1 with dist(tail_0, f^n2(r)) < 2*delta1, then returns the orbit
    segment f^n1(r), ..., f^(n2-1)(r) followed by the tail. The result is
    validated as a pseudotrajectory with bound 2 * tail.d and construction
    fails loudly if the bound does not hold (it does whenever
    2*delta1 <= tail.d).
    """
    if delta1 <= 0:
        raise DomainError("net radius delta1 must be positive")
    space = system.space
    z0 = space.canonical(z0)
    target = tail.points[0]
    bound = 2 * delta1

    point = space.canonical(r)
    n1 = None
    n = 0
    while n <= horizon:
        if n1 is None and space.dist(z0, point) < bound:
            n1 = n
        if n1 is not None and space.dist(target, point) < bound:
            n2 = n
            break
        point = system.apply(point)
        n += 1
    else:
        missing = z0 if n1 is None else target
        raise SearchFailure(
            f"transit orbit never entered the {bound}-ball around {missing} "
            f"within {horizon} steps",
            target=missing, radius=bound, horizon=horizon)

    segment = orbit(system, r, n2)[n1:n2]
    points = tuple(segment) + tail.points
    d = 2 * tail.d
    out = Pseudotrajectory(points, d, Provenance("spliced"))
    if not validate(system, out.points, d):
        raise DomainError(
            f"spliced sequence violates the step bound {d}; "
            f"need 2*delta1 <= tail step bound (got delta1={delta1}, "
            f"tail d={tail.d})")
    return out


def worst_case_pseudotrajectory(system, d, eps) -> Pseudotrajectory:
    """Constant-drift sequence around a rotation that no orbit can track.

    Returns p_n = p_0 + n*(alpha + d/2) for n = 0..N with
    N = ceil(4*eps/d) + 1: a d/2-pseudotrajectory whose total drift
    N*d/2 exceeds 2*eps strictly, so it is not eps-shadowable.
    """
    if system.kind != "rotation":
        raise UsageError("the drift construction is specific to rotations")
    d = frac(d)
    eps = frac(eps)
    if d <= 0:
        raise DomainError("step bound d must be positive")
    if eps >= Fraction(1, 4):
        raise DomainError("eps must be below 1/4 for the closed-form verdict")
    n_steps = math.ceil(4 * eps / d) + 1
    step = system.alpha + d / 2
    pts = tuple(((step * k) % 1,) for k in range(n_steps + 1))
    return Pseudotrajectory(pts, d / 2, Provenance("worst_case"))


# -- serialization --------------------------------------------------------

def save_trajectory(traj: Pseudotrajectory, system_spec: str, base) -> None:
    """Write <base>.csv (n,coord0[,coord1]) and a <base>.json sidecar."""
    base = Path(base)
    base.parent.mkdir(parents=True, exist_ok=True)
    ncoords = len(traj.points[0])
    with open(base.with_suffix(".csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n"] + [f"coord{i}" for i in range(ncoords)])
        for n, p in enumerate(traj.points):
            writer.writerow([n] + [str(c) for c in p])
    sidecar = {
        "system": system_spec,
        "d": str(traj.d),
        "N": traj.horizon,
        "seed": traj.provenance.seed,
        "trial": traj.provenance.trial,
        "provenance": traj.provenance.kind,
    }
    with open(base.with_suffix(".json"), "w") as fh:
        json.dump(jsonable(sidecar), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_trajectory(base) -> tuple[Pseudotrajectory, str]:
    """Read a trajectory written by save_trajectory; returns (traj, system_spec)."""
    base = Path(base)
    with open(base.with_suffix(".json")) as fh:
        sidecar = json.load(fh)
    points = []
    with open(base.with_suffix(".csv"), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        ncoords = len(header) - 1
        for row in reader:
            points.append(tuple(Fraction(c) for c in row[1:1 + ncoords]))
    prov = Provenance(sidecar.get("provenance", "loaded"),
                      sidecar.get("seed"), sidecar.get("trial"))
    traj = Pseudotrajectory(tuple(points), Fraction(sidecar["d"]), prov)
    return traj, sidecar["system"]
