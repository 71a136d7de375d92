import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from comonorisk.distortions import Distortion, KusuokaMeasure
from comonorisk.distributions import DiscretePosition, negative_part_transform
from comonorisk.errors import DomainError, UnsatisfiableError
from comonorisk.measures import choquet, kusuoka_mix, max_loss, mean_acceptance, neg_expectation, var, var_acceptance
from comonorisk.sampling import binary_distortions, interior_distortions, random_positions, rng_from
from comonorisk.surplus import (
    acceptance_surplus_check,
    avar_measure,
    classify_binary_distortion,
    excess_invariant_version,
    is_excess_invariant,
    is_si_plus,
    ml_is_si_plus,
    monotone_excess_conflict_demo,
    si_convex_counterexample,
    si_counterexample,
)

from conftest import positions

SAMPLE = random_positions(17, 200)
NEGATIVE = [x.map(lambda v: -np.abs(v)) for x in SAMPLE[:50]]


def test_excess_invariance_examples():
    tilde = excess_invariant_version(lambda x: var(x, 0.1))
    assert is_excess_invariant(tilde, SAMPLE).passed
    rep = is_excess_invariant(neg_expectation, [DiscretePosition([1, 3], [0.5, 0.5])])
    assert not rep.passed and rep.witness["gap"] == pytest.approx(-2.0)
    assert is_excess_invariant(neg_expectation, NEGATIVE).passed


def test_si_plus_examples():
    assert is_si_plus(lambda x: var(x, 0.05), SAMPLE).passed
    assert ml_is_si_plus(SAMPLE).passed
    rep = is_si_plus(avar_measure(0.5), [DiscretePosition([-2, 1], [0.25, 0.75])])
    assert not rep.passed
    assert rep.witness["rho_x"] == pytest.approx(0.5) and rep.witness["rho_neg_part"] == pytest.approx(1.0)


def test_si_counterexample_avar():
    w = si_counterexample(Distortion.avar(0.5), 0.25)
    assert w.position == DiscretePosition([-2, 1], [0.25, 0.75])
    assert (w.rho_x, w.rho_positive_part, w.rho_negative_part) == pytest.approx((0.5, -0.5, 1.0), abs=1e-14)
    assert w.gap == pytest.approx(0.5)


def test_si_counterexample_minvar():
    w = si_counterexample(Distortion.minvar(2), 0.5)
    assert w.a2 == 1.0
    assert w.position == DiscretePosition([-1, 1], [0.5, 0.5])
    assert w.rho_x >= 0.0 and w.rho_positive_part < 0.0


def test_si_counterexample_binary_has_no_level():
    with pytest.raises(UnsatisfiableError):
        si_counterexample(Distortion.var(0.2))
    with pytest.raises(UnsatisfiableError):
        si_counterexample(Distortion.avar(0.5), 0.9)


def test_classify_binary_examples():
    c = classify_binary_distortion(Distortion.var(0.1))
    assert (c.t_star, c.form) == (0.1, "var")
    c0 = classify_binary_distortion(Distortion.var(0.0))
    x = DiscretePosition([-4, 2], [0.3, 0.7])
    assert c0.value(x) == 4.0 == max_loss(x)
    c1 = classify_binary_distortion(Distortion.indicator(1.0, closed=True))
    assert c1.value(x) == -2.0
    with pytest.raises(DomainError):
        classify_binary_distortion(Distortion.avar(0.3))


def test_convex_counterexample_examples():
    w = si_convex_counterexample(KusuokaMeasure.point(0.5))
    assert w.rho_x >= 0.0 and w.rho_positive_part < 0.0
    mu = KusuokaMeasure(((0.0, 0.5), (0.5, 0.5)))
    w2 = si_convex_counterexample(mu, tail_mass=0.1)
    assert w2.position.cumulative[0] == pytest.approx(0.1)
    assert kusuoka_mix(w2.position, mu) >= 0.0 and w2.rho_positive_part < 0.0
    with pytest.raises(UnsatisfiableError):
        si_convex_counterexample(KusuokaMeasure.point(0.0))


def test_conflict_demo_examples():
    assert monotone_excess_conflict_demo(neg_expectation, SAMPLE).ok
    assert monotone_excess_conflict_demo(avar_measure(0.2), SAMPLE).ok
    nonneg = [x.map(np.abs) for x in SAMPLE[:30]]
    rep = monotone_excess_conflict_demo(neg_expectation, nonneg)
    assert rep.passed and rep.witness is None


def test_acceptance_mirror():
    assert acceptance_surplus_check(var_acceptance(0.1)).passed
    assert not acceptance_surplus_check(mean_acceptance()).passed


@given(st.integers(0, 10_000))
def test_interior_witnesses(seed):
    for h in interior_distortions(rng_from(seed), 3):
        w = si_counterexample(h)
        assert w.rho_x >= 0.0
        assert w.rho_x != w.rho_negative_part
        assert w.rho_x == pytest.approx(w.rho_positive_part + w.rho_negative_part, abs=1e-12 * w.a2)


@given(st.integers(0, 10_000))
def test_binary_distortions_are_si_plus(seed):
    for h in binary_distortions(rng_from(seed), 3):
        assert is_si_plus(lambda x: choquet(x, h), random_positions(seed, 50)).passed


@given(positions())
def test_excess_version_is_nonnegative_and_invariant(x):
    tilde = excess_invariant_version(neg_expectation)
    assert tilde(x) >= 0.0
    assert tilde(x) == tilde(negative_part_transform(x))
