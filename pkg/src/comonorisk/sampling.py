"""Seeded generators for positions, tables, distortions and trees.

Every generator takes an explicit ``numpy.random.Generator`` so that all
searches are reproducible from a single seed.
"""

from __future__ import annotations

import numpy as np

from .comonotone import ScenarioTable
from .distortions import Distortion, KusuokaMeasure
from .distributions import DiscretePosition

VALUE_RANGE = 100.0


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_probs(rng: np.random.Generator, n: int, floor: float = 0.05) -> np.ndarray:
    w = rng.uniform(floor, 1.0, size=n)
    return w / w.sum()


def random_position(
    rng: np.random.Generator,
    n_atoms: tuple[int, int] = (2, 8),
    scale: float = VALUE_RANGE,
    integer: bool = False,
) -> DiscretePosition:
    """Position with 2 to 8 atoms, values in ``[-scale, scale]``."""
    n = int(rng.integers(n_atoms[0], n_atoms[1] + 1))
    if integer:
        vals = rng.choice(np.arange(-int(scale), int(scale) + 1), size=n, replace=False).astype(float)
    else:
        vals = rng.uniform(-scale, scale, size=n)
    return DiscretePosition(vals, random_probs(rng, n))


def random_positions(seed, count: int, **kw) -> list[DiscretePosition]:
    rng = rng_from(seed)
    return [random_position(rng, **kw) for _ in range(count)]


def random_table(
    rng: np.random.Generator,
    n_states: int = 5,
    n_assets: int = 2,
    scale: float = VALUE_RANGE,
    integer: bool = False,
    equiprobable: bool = False,
) -> ScenarioTable:
    probs = np.full(n_states, 1.0 / n_states) if equiprobable else random_probs(rng, n_states)
    if integer:
        pay = rng.integers(-int(scale), int(scale) + 1, size=(n_states, n_assets)).astype(float)
    else:
        pay = rng.uniform(-scale, scale, size=(n_states, n_assets))
    return ScenarioTable(probs, pay)


def random_concave_distortion(rng: np.random.Generator, max_knots: int = 6, jump: bool | None = None) -> Distortion:
    """Concave piecewise-linear distortion with random knots and slopes."""
    m = int(rng.integers(1, max_knots + 1))
    inner = np.sort(rng.uniform(0.02, 0.98, size=m - 1)) if m > 1 else np.array([])
    ts = np.unique(np.concatenate(([0.0], inner, [1.0])))
    if jump is None:
        jump = bool(rng.random() < 0.3)
    h0 = float(rng.uniform(0.05, 0.4)) if jump else 0.0
    slopes = np.sort(rng.uniform(0.0, 1.0, size=ts.size - 1))[::-1]
    incr = slopes * np.diff(ts)
    if incr.sum() <= 0.0:
        incr = np.diff(ts)
    incr = incr / incr.sum() * (1.0 - h0)
    vals = h0 + np.concatenate(([0.0], np.cumsum(incr)))
    vals[-1] = 1.0
    return Distortion.piecewise(list(zip(ts, vals)))


def random_kusuoka(rng: np.random.Generator, max_atoms: int = 4, allow_zero: bool = True) -> KusuokaMeasure:
    k = int(rng.integers(1, max_atoms + 1))
    levels = np.unique(np.round(rng.uniform(0.01, 1.0, size=k), 6))
    if allow_zero and rng.random() < 0.3:
        levels = np.unique(np.concatenate(([0.0], levels)))
    w = random_probs(rng, levels.size)
    w[-1] = 1.0 - w[:-1].sum()
    return KusuokaMeasure(tuple(zip(levels.tolist(), w.tolist())))


def distortion_zoo(rng: np.random.Generator, count: int = 20) -> list[Distortion]:
    """Named concave families first, then random piecewise-linear ones."""
    fixed = [
        Distortion.identity(),
        Distortion.avar(0.05),
        Distortion.avar(0.5),
        Distortion.avar(0.9),
        Distortion.minvar(2),
        Distortion.minvar(5),
        Distortion.power(0.3),
        Distortion.power(0.7),
        Distortion.exp_family(1.0),
        Distortion.exp_family(10.0),
        Distortion.avar(0.0),
    ]
    out = fixed[:count]
    while len(out) < count:
        out.append(random_concave_distortion(rng))
    return out


def interior_distortions(rng: np.random.Generator, count: int = 20) -> list[Distortion]:
    """Distortions in the broad class taking some value strictly inside (0, 1)."""
    fixed = [
        Distortion.avar(0.5),
        Distortion.avar(0.05),
        Distortion.identity(),
        Distortion.minvar(2),
        Distortion.minvar(4),
        Distortion.power(0.5),
        Distortion.power(2.0),
        Distortion.exp_family(3.0),
        Distortion.exp_family(-2.0),
    ]
    out = fixed[:count]
    while len(out) < count:
        if len(out) % 2:
            out.append(random_concave_distortion(rng))
        else:
            # Non-concave: increasing piecewise-linear with a convex kink.
            t = float(rng.uniform(0.2, 0.8))
            v = float(rng.uniform(0.05, t * 0.9))
            out.append(Distortion.piecewise([(0.0, 0.0), (t, v), (1.0, 1.0)]))
    return out


def binary_distortions(rng: np.random.Generator, count: int = 20) -> list[Distortion]:
    fixed = [
        Distortion.var(0.0),
        Distortion.var(0.05),
        Distortion.var(0.5),
        Distortion.indicator(1.0, closed=True),
        Distortion.indicator(0.3, closed=True),
    ]
    out = fixed[:count]
    while len(out) < count:
        p = float(np.round(rng.uniform(0.01, 0.99), 4))
        out.append(Distortion.indicator(p, closed=bool(len(out) % 2)))
    return out
