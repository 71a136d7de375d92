import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from comonorisk.distributions import DiscretePosition, left_quantile, mean, mixture, moments, right_quantile
from comonorisk.elicitability import (
    ScoreFunction,
    avar_levelset_search,
    consistency_check,
    expected_score,
    level_set_convexity_check,
    minimize_score,
)
from comonorisk.errors import DomainError
from comonorisk.measures import avar, expectile_measure, neg_expectation, var
from comonorisk.sampling import random_positions

from conftest import interior_levels, positions


def test_expected_score_examples():
    x = DiscretePosition([0, 1], [0.5, 0.5])
    assert expected_score(0.0, x, ScoreFunction.squared()) == 0.5
    y = DiscretePosition([-2, 1, 4], [0.2, 0.5, 0.3])
    assert expected_score(mean(y), y, ScoreFunction.squared()) == pytest.approx(moments(y)[1], abs=1e-12)
    assert expected_score(3.0, DiscretePosition.constant(3.0), ScoreFunction.pinball(0.3)) == 0.0


def test_minimizer_examples():
    y = DiscretePosition([-2, 1, 4], [0.2, 0.5, 0.3])
    assert minimize_score(y, ScoreFunction.squared()).rho == pytest.approx(-mean(y), abs=1e-9)
    m = minimize_score(y, ScoreFunction.pinball(0.2))
    assert (m.left, m.right) == (-2.0, 1.0)
    assert m.rho == 2.0
    assert minimize_score(y, ScoreFunction.expectile(0.3)).rho == pytest.approx(expectile_measure(y, 0.3), abs=1e-8)


def test_bracket_must_cover_support():
    with pytest.raises(DomainError):
        minimize_score(DiscretePosition([0, 5], [0.5, 0.5]), ScoreFunction.squared(), bracket=(1.0, 5.0))


def test_consistency_examples():
    sample = random_positions(3, 50)
    assert consistency_check(neg_expectation, ScoreFunction.squared(), sample).passed
    rep = consistency_check(lambda x: avar(x, 0.1), ScoreFunction.squared(), sample)
    assert not rep.passed and rep.witness is not None


def test_level_set_examples():
    f1 = DiscretePosition([-1, 3], [0.5, 0.5])
    f2 = DiscretePosition([0, 2], [0.5, 0.5])
    assert level_set_convexity_check(neg_expectation, f1, f2).passed
    g1 = DiscretePosition([-4, 2], [0.1, 0.9])
    g2 = DiscretePosition([-1, 2], [0.1, 0.9])
    assert level_set_convexity_check(lambda x: var(x, 0.2), g1, g2).passed
    with pytest.raises(DomainError):
        level_set_convexity_check(neg_expectation, f1, DiscretePosition.constant(5.0))
    found = avar_levelset_search(0.5)
    assert found.ok and found.witness["deviation"] > 1e-3


@given(positions())
def test_squared_minimizer_is_mean(x):
    assert minimize_score(x, ScoreFunction.squared()).rho == pytest.approx(-mean(x), abs=1e-9 * max(1.0, x.sup_norm))


@given(positions(min_atoms=2, integer=True), interior_levels)
def test_pinball_recovers_quantile(x, p):
    assume(all(abs(c - p) > 1e-6 for c in x.cumulative))
    m = minimize_score(x, ScoreFunction.pinball(p))
    assert m.left == left_quantile(x, p) == right_quantile(x, p)
    assert m.rho == var(x, p)


@given(positions(min_atoms=2, integer=True), interior_levels)
def test_pinball_invariant_under_increasing_g(x, p):
    assume(all(abs(c - p) > 1e-6 for c in x.cumulative))

    def cube(v):
        return (np.asarray(v) + 100.0) ** 3

    a = minimize_score(x, ScoreFunction.pinball(p))
    b = minimize_score(x, ScoreFunction.pinball(p, cube))
    assert (a.left, a.right) == (b.left, b.right)


@given(positions(), st.floats(0.05, 0.95))
def test_expectile_score_consistent(x, tau):
    got = minimize_score(x, ScoreFunction.expectile(tau)).rho
    assert got == pytest.approx(expectile_measure(x, tau), abs=1e-8 * max(1.0, x.sup_norm))


@given(positions(), positions())
def test_mixture_endpoints(f1, f2):
    assert mixture(f1, f2, 1.0) == f1
    assert mixture(f1, f2, 0.0) == f2


@given(positions(min_atoms=2))
def test_argmin_interval_is_ordered_and_flat(x):
    for S in (ScoreFunction.squared(), ScoreFunction.pinball(0.3), ScoreFunction.expectile(0.2)):
        m = minimize_score(x, S)
        assert m.left <= m.right
        assert expected_score(m.right, x, S) == pytest.approx(m.score, abs=1e-7 * max(1.0, x.sup_norm) ** 2)
