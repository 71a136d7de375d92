import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from comonorisk.comonotone import comonotonic_counterpart
from comonorisk.distortions import Distortion, KusuokaMeasure, SpectralDensity, spectral_from_distortion
from comonorisk.distributions import DiscretePosition, mean
from comonorisk.errors import DomainError
from comonorisk.measures import (
    AXIOMS,
    LossFunction,
    RiskMeasure,
    avar,
    axiom_check,
    choquet,
    choquet_monetary,
    entropic_measure,
    expectile_measure,
    kusuoka_mix,
    max_loss,
    mean_acceptance,
    measure_from_spec,
    nonneg_acceptance,
    rho_from_acceptance,
    shortfall_measure,
    spectral,
    var,
    var_acceptance,
)
from comonorisk.sampling import random_positions

from conftest import interior_levels, levels, positions

TAIL = DiscretePosition([-10, 5], [0.05, 0.95])
TWO = DiscretePosition([-2, 1], [0.25, 0.75])


def test_var_examples():
    assert var(TAIL, 0.05) == -5.0
    assert var(DiscretePosition.constant(3.0), 0.3) == -3.0
    assert var(TAIL, 0.0) == 10.0


def test_avar_examples():
    assert avar(TAIL, 0.05) == pytest.approx(10.0, abs=1e-12)
    assert avar(TAIL, 1.0) == pytest.approx(-4.25, abs=1e-12)
    for p in (0.0, 0.2, 1.0):
        assert avar(DiscretePosition.constant(2.0), p) == pytest.approx(-2.0, abs=1e-14)


def test_choquet_examples():
    assert choquet(TAIL, Distortion.identity()) == pytest.approx(-4.25, abs=1e-12)
    assert choquet(TWO, Distortion.avar(0.5)) == pytest.approx(0.5, abs=1e-14)
    assert choquet(TAIL, Distortion.avar(0.3)) == pytest.approx(avar(TAIL, 0.3), abs=1e-12)


def test_kusuoka_examples():
    assert kusuoka_mix(TAIL, KusuokaMeasure.point(0.3)) == avar(TAIL, 0.3)
    assert kusuoka_mix(TAIL, KusuokaMeasure.point(1.0)) == pytest.approx(-4.25, abs=1e-12)
    assert kusuoka_mix(TAIL, KusuokaMeasure.point(0.0)) == max_loss(TAIL) == 10.0


def test_spectral_examples():
    flat = SpectralDensity.from_steps((0.0, 1.0), (1.0,))
    assert spectral(TAIL, flat) == pytest.approx(-4.25, abs=1e-12)
    assert spectral(TAIL, spectral_from_distortion(Distortion.avar(0.2))) == pytest.approx(avar(TAIL, 0.2), abs=1e-12)
    atom = SpectralDensity.from_steps((0.0, 1.0), (0.0,), atom_at_zero=1.0)
    assert spectral(TAIL, atom) == 10.0


def test_expectile_examples():
    assert expectile_measure(TAIL, 0.5) == pytest.approx(-4.25, abs=1e-12)
    assert expectile_measure(DiscretePosition.constant(1.5), 0.1) == -1.5
    assert expectile_measure(DiscretePosition([0, 1], [0.5, 0.5]), 0.25) == pytest.approx(-0.25, abs=1e-14)


def test_entropic_examples():
    assert entropic_measure(DiscretePosition.constant(2.0), 3.0) == pytest.approx(-2.0, abs=1e-14)
    sym = DiscretePosition([-1, 1], [0.5, 0.5])
    assert entropic_measure(TAIL, 1e-8) == pytest.approx(-4.25, abs=1e-6)
    # At rate 50 the gap to the maximum loss is ln(2)/50; the limit shows at large rates.
    assert entropic_measure(sym, 50.0) == pytest.approx(1.0 - math.log(2) / 50, abs=1e-12)
    assert entropic_measure(sym, 1e7) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(DomainError):
        entropic_measure(sym, 0.0)


def test_shortfall_examples():
    loss = LossFunction("exponential", 1.0)
    c = math.exp(2.0)
    rho0 = shortfall_measure(DiscretePosition.constant(0.0), loss, c)
    assert rho0 == pytest.approx(-2.0, abs=1e-9)
    for x0 in (-3.0, 0.5, 4.0):
        got = shortfall_measure(DiscretePosition.constant(x0), loss, c)
        assert got == pytest.approx(-x0 - 2.0, abs=1e-9)
    x = DiscretePosition([0.0, 3.0], [0.5, 0.5])
    assert shortfall_measure(x, loss, c) <= 0.0
    with pytest.raises(DomainError):
        shortfall_measure(x, loss, 0.5)


def test_shortfall_is_si_plus():
    loss = LossFunction("expectile_loss", 2.0)
    for x in random_positions(11, 100):
        r = shortfall_measure(x, loss, 1.0)
        if r >= 0:
            neg = x.map(lambda v: np.minimum(v, 0.0))
            assert shortfall_measure(neg, loss, 1.0) == pytest.approx(r, abs=1e-8)


def test_acceptance_examples():
    for x in random_positions(5, 30):
        assert rho_from_acceptance(var_acceptance(0.1), x) == pytest.approx(var(x, 0.1), abs=1e-9)
        assert rho_from_acceptance(mean_acceptance(), x) == pytest.approx(-mean(x), abs=1e-9)
        assert rho_from_acceptance(nonneg_acceptance(), x) == pytest.approx(max_loss(x), abs=1e-9)


def test_axiom_check_examples():
    coh = RiskMeasure.choquet(Distortion.power(0.5))
    assert axiom_check(coh, "subadditivity", trials=100).passed
    rep = axiom_check(RiskMeasure.var(0.05), "subadditivity", trials=100)
    assert not rep.passed and rep.witness
    assert axiom_check(RiskMeasure.choquet(Distortion.var(0.2)), "comonotonic_additivity", trials=100).passed
    with pytest.raises(DomainError):
        axiom_check(coh, "bogus")


@pytest.mark.parametrize(
    "spec",
    [
        {"measure": "var", "p": 0.05},
        {"measure": "avar", "p": 0.1},
        {"measure": "expectile", "tau": 0.25},
        {"measure": "entropic", "beta": 1.0},
        {"measure": "choquet", "distortion": {"kind": "minvar", "n": 3}},
        {"measure": "kusuoka", "atoms": [[0.1, 0.5], [1.0, 0.5]]},
        {"measure": "spectral", "breaks": [0, 0.5, 1], "heights": [2, 0]},
        {"measure": "shortfall", "loss": {"kind": "exponential", "param": 1}, "c": 2.0},
        {"measure": "max_loss"},
    ],
)
def test_spec_round_trip(spec):
    rho = measure_from_spec(spec)
    assert measure_from_spec(rho.to_spec())(TAIL) == pytest.approx(rho(TAIL), abs=1e-9)


def test_malformed_spec():
    with pytest.raises(DomainError):
        measure_from_spec({"measure": "var"})
    with pytest.raises(DomainError):
        measure_from_spec({"measure": "nope"})


ALL = [
    RiskMeasure.var(0.1),
    RiskMeasure.avar(0.2),
    RiskMeasure.choquet(Distortion.minvar(3)),
    RiskMeasure.kusuoka_mixture(KusuokaMeasure(((0.0, 0.2), (0.5, 0.8)))),
    RiskMeasure.spectral(Distortion.power(0.6)),
    RiskMeasure.expectile(0.3),
    RiskMeasure.entropic(0.5),
    RiskMeasure.shortfall(LossFunction("exponential", 0.5), 2.0),
    RiskMeasure.max_loss(),
    RiskMeasure.neg_expectation(),
]


@given(positions(), st.integers(-50, 50).map(float))
def test_cash_additivity(x, b):
    for rho in ALL:
        tol = 1e-8 if rho.kind == "shortfall" else 1e-9
        assert rho(x - b) == pytest.approx(rho(x) + b, abs=tol * max(1.0, x.sup_norm))


@given(positions(), interior_levels)
def test_avar_dominates_var(x, p):
    assert var(x, p) <= avar(x, p) + 1e-12 * max(1.0, x.sup_norm)


@given(positions(), st.integers(0, 1000))
def test_concave_choquet_dominates_expected_loss(x, seed):
    from comonorisk.sampling import random_concave_distortion, rng_from

    h = random_concave_distortion(rng_from(seed))
    assert choquet(x, h) >= -mean(x) - 1e-9 * max(1.0, x.sup_norm)


@given(positions(), positions())
def test_comonotone_additivity_on_counterparts(f, g):
    t = comonotonic_counterpart([f, g])
    s = t.law_of(t.column(0) + t.column(1))
    for rho in ALL[:5]:
        assert rho(s) == pytest.approx(rho(f) + rho(g), abs=1e-9 * max(1.0, f.sup_norm + g.sup_norm))


@given(positions(min_atoms=2), st.sampled_from([Distortion.avar(0.3), Distortion.minvar(2), Distortion.power(0.5)]))
def test_monetary_form_matches_choquet(x, h):
    assert choquet_monetary(x, h) == pytest.approx(choquet(x, h), abs=1e-9 * max(1.0, x.sup_norm))


@given(positions(), levels)
def test_var_is_negative_right_quantile(x, p):
    from comonorisk.distributions import right_quantile

    assert var(x, p) == -right_quantile(x, p)


def test_axiom_names():
    assert len(AXIOMS) == 8
