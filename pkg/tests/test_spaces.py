"""Metric, measure, sampling and cover properties of the three spaces."""

import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy.stats import chisquare

from shadowing import (DomainError, UsageError, annulus, circle, interval,
                       parse_space, trial_stream)
from shadowing.spaces import circ_dist, signed_circ_diff

SPACES = [circle(), interval(), annulus(F(1, 2))]


def ids(space):
    return space.kind


# -- metric axioms ---------------------------------------------------------

@pytest.mark.parametrize("space", SPACES, ids=ids)
def test_metric_axioms_on_random_triples(space):
    rng = trial_stream(101)
    for _ in range(10_000):
        a, b, c = (space.random_point(rng) for _ in range(3))
        dab = space.dist(a, b)
        assert dab >= 0
        assert dab == space.dist(b, a)
        assert space.dist(a, a) == 0
        assert space.dist(a, c) <= dab + space.dist(b, c)
        assert dab <= space.diameter


def test_identity_of_indiscernibles_circle():
    sp = circle()
    assert sp.dist((F(1, 3),), (F(1, 3),)) == 0
    assert sp.dist((F(0),), (F(1, 2),)) == F(1, 2)
    # wrap ties resolve: distinct points at distance 0 impossible mod 1
    assert sp.canonical((F(1),)) == (F(0),)


def test_canonicalization_idempotent():
    rng = trial_stream(102)
    for space in SPACES:
        for _ in range(200):
            p = space.random_point(rng)
            q = space.canonical(p)
            assert space.canonical(q) == q


def test_kind_specific_distances():
    assert circle().dist((F(1, 10),), (F(9, 10),)) == F(1, 5)
    assert interval().dist((F(1, 4),), (F(3, 4),)) == F(1, 2)
    an = annulus(F(1, 2))
    assert an.dist((F(6, 5), F(1, 10)), (F(9, 10), F(19, 20))) == F(3, 10)


def test_signed_circ_diff_representative():
    assert signed_circ_diff(F(1, 10), F(9, 10)) == F(1, 5)
    assert signed_circ_diff(F(9, 10), F(1, 10)) == -F(1, 5)
    assert circ_dist(F(0), F(1, 2)) == F(1, 2)


# -- ball measures ---------------------------------------------------------

def test_ball_measure_closed_forms():
    assert circle().ball_measure((F(0),), F(1, 10)) == F(1, 5)
    assert interval().ball_measure((F(1, 20),), F(1, 10)) == F(3, 20)
    an = annulus(F(1, 2))
    assert an.ball_measure((F(29, 20), F(3, 10)), F(1, 10)) == F(3, 100)


def test_ball_measure_positive_and_rejects_bad_radius():
    for space in SPACES:
        rng = trial_stream(103)
        for _ in range(50):
            c = space.random_point(rng)
            assert space.ball_measure(c, F(1, 1000)) > 0
        with pytest.raises(DomainError):
            space.ball_measure(space.random_point(rng), F(0))


def _mc_ball_measure(space, center, radius, n, seed):
    """Monte Carlo integration oracle for mu(B(radius, center) & M)."""
    rng = trial_stream(seed)
    if space.kind == "circle":
        pts = rng.random(n)
        t = np.abs((pts - float(center[0])) % 1.0)
        inside = np.minimum(t, 1.0 - t) <= float(radius)
        total = 1.0
    elif space.kind == "interval":
        pts = rng.random(n)
        inside = np.abs(pts - float(center[0])) <= float(radius)
        total = 1.0
    else:
        w = float(space.w)
        r = 1 - w + 2 * w * rng.random(n)
        th = rng.random(n)
        t = np.abs((th - float(center[1])) % 1.0)
        inside = (np.abs(r - float(center[0])) <= float(radius)) \
            & (np.minimum(t, 1.0 - t) <= float(radius))
        total = 2 * w
    p = inside.mean()
    se = math.sqrt(max(p * (1 - p), 1e-12) / n) * total
    return p * total, se


@pytest.mark.parametrize("space,center,radius", [
    (circle(), (F(0),), F(1, 10)),
    (circle(), (F(97, 100),), F(1, 4)),
    (interval(), (F(1, 20),), F(1, 10)),
    (interval(), (F(1, 2),), F(3, 10)),
    (annulus(F(1, 2)), (F(29, 20), F(3, 10)), F(1, 10)),
    (annulus(F(1, 2)), (F(1), F(0)), F(2, 5)),
], ids=["circ-int", "circ-wrap", "ivl-edge", "ivl-mid", "ann-corner", "ann-mid"])
def test_ball_measure_matches_monte_carlo(space, center, radius):
    est, se = _mc_ball_measure(space, center, radius, 100_000, 104)
    assert abs(float(space.ball_measure(center, radius)) - est) <= 3 * se


# -- sampling --------------------------------------------------------------

@pytest.mark.parametrize("space", SPACES, ids=ids)
def test_samples_stay_in_closed_ball(space):
    rng = trial_stream(105)
    for _ in range(40):
        c = space.random_point(rng)
        radius = F(1, 10)
        for _ in range(25):
            p = space.sample_uniform_ball(c, radius, rng)
            assert space.dist(p, c) <= radius
            assert space.canonical(p) == p


def test_sampling_respects_truncation():
    sp = interval()
    rng = trial_stream(106)
    for _ in range(500):
        x = sp.sample_uniform_ball((F(0),), F(1, 10), rng)[0]
        assert 0 <= x < F(1, 10)


def test_circle_samples_open_arc():
    sp = circle()
    rng = trial_stream(107)
    for _ in range(500):
        x = sp.sample_uniform_ball((F(1, 2),), F(1, 10), rng)[0]
        assert F(2, 5) < x < F(3, 5)


def test_uniformity_chi_square():
    # 10 equal sub-arcs of the target arc, 10^4 samples, significance 0.001
    sp = circle()
    rng = trial_stream(108)
    lo, width = 0.4, 0.2
    xs = [float(sp.sample_uniform_ball((F(1, 2),), F(1, 10), rng)[0])
          for _ in range(10_000)]
    counts = np.histogram(xs, bins=10, range=(lo, lo + width))[0]
    assert counts.sum() == 10_000
    assert chisquare(counts).pvalue > 0.001


def test_uniformity_chi_square_truncated_annulus_ball():
    an = annulus(F(1, 2))
    rng = trial_stream(109)
    center, radius = (F(29, 20), F(3, 10)), F(1, 10)
    rs, ths = [], []
    for _ in range(10_000):
        p = an.sample_uniform_ball(center, radius, rng)
        rs.append(float(p[0]))
        ths.append(float(p[1]))
    # radial part truncated to [1.35, 1.5], angular to [0.2, 0.4]
    counts_r = np.histogram(rs, bins=10, range=(1.35, 1.5))[0]
    counts_t = np.histogram(ths, bins=10, range=(0.2, 0.4))[0]
    assert counts_r.sum() == counts_t.sum() == 10_000
    assert chisquare(counts_r).pvalue > 0.001
    assert chisquare(counts_t).pvalue > 0.001


# -- epsilon nets ------------------------------------------------------------

def test_epsilon_net_examples():
    assert len(circle().epsilon_net(F(1, 4))) == 4
    net = interval().epsilon_net(F(1, 2))
    assert len(net) >= 2 and (F(1, 4),) in net and (F(3, 4),) in net
    with pytest.raises(DomainError):
        circle().epsilon_net(F(0))


@pytest.mark.parametrize("space", SPACES, ids=ids)
@pytest.mark.parametrize("delta1", [F(1, 4), F(1, 10), F(3, 100)])
def test_epsilon_net_covers(space, delta1):
    centers = space.epsilon_net(delta1)
    rng = trial_stream(110)
    for _ in range(1000):
        p = space.random_point(rng)
        assert min(space.dist(p, c) for c in centers) < delta1


def test_parse_space_grammar():
    assert parse_space("circle") == circle()
    assert parse_space("interval") == interval()
    assert parse_space("annulus:w=0.5") == annulus(F(1, 2))
    assert parse_space("annulus:w=1/3").w == F(1, 3)
    with pytest.raises(UsageError):
        parse_space("torus")
    with pytest.raises(UsageError):
        parse_space("annulus:width=0.5")
    with pytest.raises(DomainError):
        parse_space("annulus:w=0")


@pytest.mark.parametrize("space", SPACES, ids=ids)
@pytest.mark.parametrize("delta1", [F(1, 4), F(2, 23), F(3, 100)])
def test_net_neighbors_match_linear_scan(space, delta1):
    centers = space.epsilon_net(delta1)
    rng = trial_stream(111)
    for _ in range(300):
        p = space.random_point(rng)
        expected = [i for i, c in enumerate(centers)
                    if space.dist(p, c) < delta1]
        assert sorted(space.net_neighbors(p, delta1)) == expected
        assert expected  # the net covers, so some center is always near
