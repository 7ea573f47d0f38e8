"""Monte Carlo estimation of shadowing probability and the shipped experiments.

An experiment draws independent random pseudotrajectories to the largest
requested horizon and decides shadowability of every horizon prefix on the
same samples, so the estimated curve p_hat(N) is nonincreasing by
construction. Each trial owns a stream derived from (master seed, trial),
making runs reproducible and trials order-independent; reruns of the same
config produce byte-identical output files.

Unknown verdicts (possible only outside exact arithmetic, or when a checker
resource error aborts a trial) are excluded from both the numerator and the
denominator of p_hat and reported separately.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from scipy.stats import beta as _beta

from . import bounds as bounds_mod
from .errors import DomainError, EnclosureCapError, InvariantViolation, UsageError
from .pseudotraj import Provenance, generate, trial_stream
from .rationals import frac, jsonable, parse_point
from .shadowcheck import orbit_tracks, pull_back_witness, shadow_set_forward
from .systems import AnnulusSpiral, parse_system


@dataclass(frozen=True)
class ExperimentConfig:
    system_spec: str
    y0: tuple
    d: Fraction
    eps: Fraction
    horizons: tuple
    trials: int
    seed: int
    mode: str = "exact"
    out: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("need at least one trial")
        if self.d <= 0 or self.eps <= 0:
            raise DomainError("d and eps must be positive")
        if any(b <= a for a, b in zip(self.horizons, self.horizons[1:])):
            raise DomainError("horizons must increase strictly")
        if any(h < 0 for h in self.horizons):
            raise DomainError("horizons must be nonnegative")
        if self.mode not in ("exact", "outer"):
            raise UsageError(f"unknown checker mode {self.mode!r}")

    @property
    def system(self):
        return parse_system(self.system_spec)

    @property
    def max_horizon(self) -> int:
        return max(self.horizons) if self.horizons else 0

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(
            system_spec=data["system"],
            y0=parse_point(data["y0"]),
            d=frac(data["d"]),
            eps=frac(data["eps"]),
            horizons=tuple(int(h) for h in data.get("horizons", [])),
            trials=int(data.get("trials", 1)),
            seed=int(data.get("seed", 0)),
            mode=data.get("mode", "exact"),
            out=data.get("out"),
        )

    def to_jsonable(self) -> dict:
        return {
            "system": self.system_spec,
            "y0": [str(c) for c in self.y0],
            "d": str(self.d),
            "eps": str(self.eps),
            "horizons": list(self.horizons),
            "trials": self.trials,
            "seed": self.seed,
            "mode": self.mode,
        }


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    first_empty: int | None
    verdicts: tuple
    error: str | None = None


@dataclass(frozen=True)
class HorizonStat:
    horizon: int
    decided: int
    shadowable: int
    unknown: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    bound: float | None = None


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    horizon_stats: tuple
    trial_outcomes: tuple
    diagnostics: dict = field(default_factory=dict)

    def p_hat(self, horizon: int) -> float:
        for stat in self.horizon_stats:
            if stat.horizon == horizon:
                return stat.p_hat
        raise KeyError(f"horizon {horizon} not in experiment")

    def with_bounds(self, bound_by_horizon: dict,
                    diagnostics: dict) -> "ExperimentResult":
        stats = tuple(
            HorizonStat(s.horizon, s.decided, s.shadowable, s.unknown,
                        s.p_hat, s.ci_lo, s.ci_hi,
                        bound_by_horizon.get(s.horizon))
            for s in self.horizon_stats)
        merged = dict(self.diagnostics)
        merged.update(diagnostics)
        return ExperimentResult(self.config, stats, self.trial_outcomes,
                                merged)


def clopper_pearson(successes: int, n: int, alpha: float = 0.05):
    """Exact two-sided binomial confidence interval."""
    if n < 0 or not 0 <= successes <= n:
        raise DomainError("need 0 <= successes <= n")
    if n == 0:
        return 0.0, 1.0
    lo = 0.0 if successes == 0 else float(
        _beta.ppf(alpha / 2, successes, n - successes + 1))
    hi = 1.0 if successes == n else float(
        _beta.ppf(1 - alpha / 2, successes + 1, n - successes))
    return lo, hi


def _run_trial(system, config: ExperimentConfig, trial: int,
               band=None) -> TrialOutcome:
    """Generate one trajectory, decide every horizon prefix on it.

    ``band`` is (rho, n0) for attractor runs: every point from step n0 on
    must lie in the absorbing band, else the bound computation is wrong.
    """
    rng = trial_stream(config.seed, trial)
    traj = generate(system, config.y0, config.d, config.max_horizon, rng,
                    Provenance("random", config.seed, trial))
    if band is not None:
        rho, n0 = band
        for n, p in enumerate(traj.points[n0:], start=n0):
            if not bounds_mod.in_absorbing_band(p, rho):
                raise InvariantViolation(
                    f"trial {trial}: point {p} at step {n} escaped the "
                    f"absorbing band of half-width {rho} (entry step {n0})")
    try:
        sets = shadow_set_forward(system, traj, config.eps, config.mode)
        first_empty = next(
            (n for n, s in enumerate(sets) if s.is_empty()), None)
        exact = config.mode == "exact"
        points = traj.points if exact else [
            tuple(float(c) for c in p) for p in traj.points]
        eps_c = config.eps if exact else float(config.eps)
        verdicts = []
        for m in config.horizons:
            if first_empty is not None and m >= first_empty:
                verdicts.append("No")
                continue
            witness = pull_back_witness(system, sets, m)
            if witness is not None and orbit_tracks(
                    system, points[:m + 1], witness, eps_c):
                verdicts.append("Yes")
            elif exact:
                raise EnclosureCapError(
                    f"witness extraction failed at horizon {m}",
                    partial=sets[m])
            else:
                verdicts.append("Unknown")
        return TrialOutcome(trial, first_empty, tuple(verdicts))
    except EnclosureCapError as exc:
        return TrialOutcome(trial, None, ("Unknown",) * len(config.horizons),
                            error=str(exc))


def _trial_task(args):
    system, config, trial, band = args
    return _run_trial(system, config, trial, band)


def _aggregate(config: ExperimentConfig, outcomes) -> ExperimentResult:
    stats = []
    for i, m in enumerate(config.horizons):
        yes = sum(1 for o in outcomes if o.verdicts[i] == "Yes")
        no = sum(1 for o in outcomes if o.verdicts[i] == "No")
        unknown = sum(1 for o in outcomes if o.verdicts[i] == "Unknown")
        decided = yes + no
        p_hat = yes / decided if decided else float("nan")
        ci_lo, ci_hi = clopper_pearson(yes, decided)
        stats.append(HorizonStat(m, decided, yes, unknown, p_hat,
                                 ci_lo, ci_hi))
    return ExperimentResult(config, tuple(stats), tuple(outcomes))


def estimate_probability(config: ExperimentConfig,
                         workers: int = 1,
                         _band=None) -> ExperimentResult:
    """Monte Carlo estimate of the shadowing probability at each horizon.

    All horizon prefixes of a trial are decided on the same trajectory, so
    the p_hat column is nonincreasing. Fully reproducible from the master
    seed; ``workers`` > 1 fans trials out to processes without changing any
    output.
    """
    system = config.system
    tasks = [(system, config, t, _band) for t in range(config.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_trial_task, tasks, chunksize=8))
    else:
        outcomes = [_trial_task(t) for t in tasks]
    outcomes.sort(key=lambda o: o.trial)
    return _aggregate(config, outcomes)


# -- shipped experiments ----------------------------------------------------

def dichotomy_bound_curve(config: ExperimentConfig,
                          cover_horizon: int = 10 ** 6) -> tuple[dict, dict]:
    """Theoretical nonshadowability bound for a rotation branch.

    Uses the tube radius min(eps/4, d/(2(1+Lip))), the measure ratio eta at
    that radius, the cover time of the rotation orbit over the delta/4 net
    and the drift witness length to form blocks of length L = K + N + 1;
    the chance that a k-block prefix shadows is then at most
    (1 - eta^L)^k. Returns (bound by horizon, diagnostics).
    """
    system = config.system
    if system.kind != "rotation":
        return {}, {}
    delta = bounds_mod.tube_delta(system, config.d, config.eps)
    delta1 = delta / 4
    eta = bounds_mod.eta(system.space, delta, config.d)
    from .pseudotraj import worst_case_pseudotrajectory
    tail = worst_case_pseudotrajectory(system, config.d, config.eps)
    cov = bounds_mod.cover_time(system, config.y0, delta1, cover_horizon)
    block = cov.k + tail.horizon + 1
    eta_l = float(eta.value) ** block
    by_horizon = {}
    curve = []
    for m in config.horizons:
        k = max((m + 1) // block - 1, 0)
        lower = 1.0 - (1.0 - eta_l) ** k
        by_horizon[m] = 1.0 - lower  # upper bound on p_hat
        curve.append({"horizon": m, "blocks": k, "nonshadow_lower": lower})
    diagnostics = {
        "delta": str(delta),
        "delta1": str(delta1),
        "eta_lo": str(eta.lo),
        "eta_hi": str(eta.hi),
        "cover_k1": cov.k1,
        "cover_k2": cov.k2,
        "cover_k": cov.k,
        "tail_n": tail.horizon,
        "block_length": block,
        "nonshadow_bound_curve": curve,
    }
    return by_horizon, diagnostics


def run_dichotomy_experiment(config_shadowing: ExperimentConfig,
                             config_nonshadowing: ExperimentConfig,
                             out=None, workers: int = 1,
                             with_bound_curve: bool = True) -> dict:
    """Run both branches and produce a side-by-side report.

    The first config should exhibit p_hat near 1 at every horizon, the
    second a decay of p_hat toward 0; the rotation branch report includes
    the theoretical block bound for comparison.
    """
    res_a = estimate_probability(config_shadowing, workers)
    res_b = estimate_probability(config_nonshadowing, workers)
    if with_bound_curve:
        bound_by_h, diag = dichotomy_bound_curve(config_nonshadowing)
        if bound_by_h:
            res_b = res_b.with_bounds(bound_by_h, diag)
    report = {
        "shadowing_branch": result_summary(res_a),
        "nonshadowing_branch": result_summary(res_b),
    }
    if out is not None:
        out = Path(out)
        emit(res_a, out / "shadowing")
        emit(res_b, out / "nonshadowing")
        _write_json(out / "report.json", report)
    return report


def run_attractor_experiment(config: ExperimentConfig, out=None,
                             workers: int = 1) -> dict:
    """Attractor-branch experiment on an annulus contraction-rotation.

    Computes the absorbing-band data, rejects configs with d >= d0,
    verifies that every trial enters and stays in the band from step n0 on
    (a violation aborts the run: it would mean the bound itself is wrong),
    and reports the decay of p_hat at the quarter scale eps0 = eps / 4.
    """
    system = config.system
    if not isinstance(system, AnnulusSpiral):
        raise UsageError("attractor experiment needs an annulus spiral system")
    q = bounds_mod.attractor_quantities(system, config.eps, config.y0,
                                        d=config.d)
    inner = ExperimentConfig(
        system_spec=config.system_spec, y0=config.y0, d=config.d,
        eps=q.eps0, horizons=config.horizons, trials=config.trials,
        seed=config.seed, mode=config.mode)
    result = estimate_probability(inner, workers, _band=(q.rho, q.n0))
    result = result.with_bounds({}, {"quantities": q.to_json()})
    report = {
        "quantities": q.to_json(),
        "result": result_summary(result),
    }
    if out is not None:
        out = Path(out)
        emit(result, out)
        _write_json(out / "report.json", report)
    return report


# -- persistence ------------------------------------------------------------

def result_summary(result: ExperimentResult) -> dict:
    return {
        "config": result.config.to_jsonable(),
        "horizons": [
            {
                "horizon": s.horizon,
                "trials": s.decided,
                "shadowable": s.shadowable,
                "unknown": s.unknown,
                "p_hat": s.p_hat,
                "ci_lo": s.ci_lo,
                "ci_hi": s.ci_hi,
                "bound": s.bound,
            }
            for s in result.horizon_stats
        ],
        "diagnostics": jsonable(result.diagnostics),
        "trials": [
            {
                "trial": o.trial,
                "first_empty": o.first_empty,
                "verdicts": list(o.verdicts),
                "error": o.error,
            }
            for o in result.trial_outcomes
        ],
    }


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def emit(result: ExperimentResult, path) -> None:
    """Write summary.json, curve.csv and trials.csv under ``path``.

    Outputs are pure functions of the result, hence byte-identical across
    reruns of the same config.
    """
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        _write_json(out / "summary.json", result_summary(result))

        curve = io.StringIO()
        writer = csv.writer(curve, lineterminator="\n")
        writer.writerow(["horizon", "trials", "shadowable", "p_hat",
                         "ci_lo", "ci_hi", "bound"])
        for s in result.horizon_stats:
            writer.writerow([s.horizon, s.decided, s.shadowable,
                             repr(s.p_hat), repr(s.ci_lo), repr(s.ci_hi),
                             "" if s.bound is None else repr(s.bound)])
        (out / "curve.csv").write_text(curve.getvalue())

        trials = io.StringIO()
        writer = csv.writer(trials, lineterminator="\n")
        writer.writerow(["trial", "seed", "verdict", "first_empty"])
        for o in result.trial_outcomes:
            final = o.verdicts[-1] if o.verdicts else (
                "Yes" if o.first_empty is None else "No")
            writer.writerow([o.trial, result.config.seed, final,
                             "" if o.first_empty is None else o.first_empty])
        (out / "trials.csv").write_text(trials.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write experiment outputs under {out}: {exc}") \
            from exc
