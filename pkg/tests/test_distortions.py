import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from comonorisk.distortions import (
    Distortion,
    KusuokaMeasure,
    SpectralDensity,
    check_concave,
    distortion_from_spec,
    from_kusuoka,
    kusuoka_from_distortion,
    parse_distortion,
    spectral_from_distortion,
)
from comonorisk.distributions import DiscretePosition
from comonorisk.errors import DomainError, InvariantViolation
from comonorisk.measures import avar, choquet, kusuoka_mix, max_loss, spectral
from comonorisk.sampling import distortion_zoo, random_kusuoka, rng_from

from conftest import levels, positions


@pytest.mark.parametrize(
    "h, t, expected",
    [
        (Distortion.identity(), 0.3, 0.3),
        (Distortion.avar(0.5), 0.25, 0.5),
        (Distortion.minvar(2), 0.5, 0.75),
        (Distortion.var(0.1), 0.1, 0.0),
        (Distortion.var(0.1), 0.2, 1.0),
        (Distortion.indicator(0.1, closed=True), 0.1, 1.0),
        (Distortion.power(0.5), 0.25, 0.5),
    ],
)
def test_eval(h, t, expected):
    assert h(t) == pytest.approx(expected, abs=1e-15)


def test_eval_out_of_range():
    with pytest.raises(DomainError):
        Distortion.identity()(1.2)


def test_from_kusuoka_examples():
    assert from_kusuoka(KusuokaMeasure.point(0.3)) == Distortion.avar(0.3)
    assert from_kusuoka(KusuokaMeasure.point(1.0)) == Distortion.identity()
    h0 = from_kusuoka(KusuokaMeasure.point(0.0))
    assert h0(1e-9) == 1.0 and h0(0.0) == 0.0


def test_point_mass_at_zero_is_max_loss():
    h0 = from_kusuoka(KusuokaMeasure.point(0.0))
    rng = rng_from(3)
    for _ in range(50):
        x = DiscretePosition(rng.integers(-9, 10, 3).astype(float), [0.2, 0.3, 0.5])
        assert choquet(x, h0) == pytest.approx(max_loss(x), abs=1e-12)


def test_spectral_examples():
    ident = spectral_from_distortion(Distortion.identity())
    assert ident.atom_at_zero == 0.0 and ident.density(0.7) == 1.0
    av = spectral_from_distortion(Distortion.avar(0.2))
    assert av.density(0.1) == pytest.approx(5.0) and av.density(0.2) == pytest.approx(5.0)
    assert av.density(0.3) == 0.0
    mv = spectral_from_distortion(Distortion.minvar(3))
    for t in (0.1, 0.5, 0.9):
        assert mv.density(t) == pytest.approx(3 * (1 - t) ** 2, rel=1e-12)


@pytest.mark.parametrize(
    "h, concave",
    [
        (Distortion.avar(0.3), True),
        (Distortion.var(0.3), False),
        (Distortion.power(0.4), True),
        (Distortion.power(1.5), False),
        (Distortion.minvar(4), True),
        (Distortion.exp_family(2.0), True),
    ],
)
def test_check_concave(h, concave):
    assert check_concave(h) is concave
    assert h.is_concave is concave


def test_non_concave_has_no_spectral_or_kusuoka_form():
    with pytest.raises(DomainError):
        spectral_from_distortion(Distortion.var(0.3))
    with pytest.raises(DomainError):
        kusuoka_from_distortion(Distortion.var(0.3))


def test_invalid_objects():
    with pytest.raises(InvariantViolation):
        KusuokaMeasure(((0.2, 0.5), (0.4, 0.4)))
    with pytest.raises(InvariantViolation):
        SpectralDensity.from_steps((0.0, 0.5, 1.0), (0.5, 1.5))
    with pytest.raises(DomainError):
        parse_distortion("bogus:1")


@pytest.mark.parametrize("text", ["avar:0.5", "var:0.05", "var_closed:0.05", "minvar:3", "power:0.5", "exp:2", "identity"])
def test_parse_and_spec_round_trip(text):
    h = parse_distortion(text)
    assert distortion_from_spec(h.to_spec()) == h


@given(st.integers(0, 10_000))
def test_kusuoka_round_trip(seed):
    rng = rng_from(seed)
    mu = random_kusuoka(rng)
    h = from_kusuoka(mu)
    x = DiscretePosition(rng.uniform(-50, 50, 4), rng.dirichlet(np.ones(4)) * 0.96 + 0.01)
    assert choquet(x, h) == pytest.approx(kusuoka_mix(x, mu), abs=1e-12 * max(1.0, x.sup_norm))
    back = kusuoka_from_distortion(h)
    assert kusuoka_mix(x, back) == pytest.approx(kusuoka_mix(x, mu), abs=1e-9 * max(1.0, x.sup_norm))


@given(st.integers(0, 10_000), positions())
def test_spectral_equals_choquet(seed, x):
    for h in distortion_zoo(rng_from(seed), 5):
        if not h.is_concave:
            continue
        lhs = spectral(x, spectral_from_distortion(h))
        assert lhs == pytest.approx(choquet(x, h), abs=1e-9 * max(1.0, x.sup_norm))


@given(st.integers(0, 10_000), levels, levels)
def test_distortions_are_monotone(seed, a, b):
    a, b = sorted((a, b))
    for h in distortion_zoo(rng_from(seed), 8):
        assert h(a) <= h(b) + 1e-15
        assert h(0.0) == 0.0 and h(1.0) == pytest.approx(1.0, abs=1e-15)


def test_avar_mixture_identity():
    x = DiscretePosition([-3, 0, 4], [0.2, 0.3, 0.5])
    mu = KusuokaMeasure(((0.1, 0.25), (0.5, 0.75)))
    assert kusuoka_mix(x, mu) == pytest.approx(0.25 * avar(x, 0.1) + 0.75 * avar(x, 0.5), abs=1e-14)
