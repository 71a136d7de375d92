"""Finite-support positions and their exact distribution functions.

A position is a bounded random variable with finitely many atoms.  All
quantile integrals downstream are finite sums over the step quantile
function built here, never numerical quadrature.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, InvariantViolation

PROB_TOL = 1e-9
# Cumulative probabilities are compared against quantile levels with this
# slack so that levels reached exactly in exact arithmetic are not lost to
# rounding in the running sum.
TIE_TOL = 1e-12


class DiscretePosition:
    """Law of a bounded payoff with finite support.

    The constructor canonicalizes: atoms are sorted ascending, equal values
    are merged and probabilities are renormalized to sum to one exactly
    (up to floating point).  Instances are immutable.

    Parameters
    ----------
    values : sequence of float
        Monetary payoffs; gains positive, losses negative.
    probs : sequence of float
        Strictly positive probabilities summing to one within ``1e-9``.
    label : str, optional
        Free-form name carried through reports.
    """

    __slots__ = ("_values", "_probs", "_cum", "label")

    def __init__(self, values: Iterable[float], probs: Iterable[float], label: str | None = None):
        v = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float).ravel()
        p = np.asarray(list(probs) if not isinstance(probs, np.ndarray) else probs, dtype=float).ravel()
        if v.size == 0:
            raise InvariantViolation("a position needs at least one atom")
        if v.shape != p.shape:
            raise InvariantViolation(f"{v.size} values but {p.size} probabilities")
        if not np.all(np.isfinite(v)):
            raise InvariantViolation("payoff values must be finite")
        if not np.all(np.isfinite(p)) or np.any(p <= 0.0):
            raise InvariantViolation("every probability must be finite and strictly positive")
        total = math.fsum(p)
        if abs(total - 1.0) > PROB_TOL:
            raise InvariantViolation(f"probabilities sum to {total!r}, not 1")

        uniq, inverse = np.unique(v, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inverse, p)
        merged /= math.fsum(merged)
        cum = np.cumsum(merged)
        cum[-1] = 1.0

        uniq.setflags(write=False)
        merged.setflags(write=False)
        cum.setflags(write=False)
        object.__setattr__(self, "_values", uniq)
        object.__setattr__(self, "_probs", merged)
        object.__setattr__(self, "_cum", cum)
        object.__setattr__(self, "label", label)

    def __setattr__(self, name, value):
        raise AttributeError("DiscretePosition is immutable")

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[float, float]], label: str | None = None) -> DiscretePosition:
        atoms = list(atoms)
        if not atoms:
            raise InvariantViolation("a position needs at least one atom")
        values, probs = zip(*atoms)
        return cls(values, probs, label=label)

    @classmethod
    def constant(cls, c: float, label: str | None = None) -> DiscretePosition:
        return cls([c], [1.0], label=label)

    @classmethod
    def from_states(cls, payoffs: Sequence[float], state_probs: Sequence[float], label: str | None = None) -> DiscretePosition:
        """Law of a state vector on a finite sample space."""
        return cls(payoffs, state_probs, label=label)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def cumulative(self) -> np.ndarray:
        """``F`` evaluated at each atom, last entry exactly 1."""
        return self._cum

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return [(float(v), float(p)) for v, p in zip(self._values, self._probs)]

    @property
    def essinf(self) -> float:
        return float(self._values[0])

    @property
    def esssup(self) -> float:
        return float(self._values[-1])

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self._values)))

    def __len__(self) -> int:
        return self._values.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscretePosition):
            return NotImplemented
        return np.array_equal(self._values, other._values) and np.array_equal(self._probs, other._probs)

    def __hash__(self) -> int:
        return hash((self._values.tobytes(), self._probs.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"({v:g}, {p:g})" for v, p in self.atoms)
        return f"DiscretePosition({{{body}}})"

    def isclose(self, other: DiscretePosition, atol: float = 1e-12) -> bool:
        return (
            len(self) == len(other)
            and np.allclose(self._values, other._values, rtol=0.0, atol=atol)
            and np.allclose(self._probs, other._probs, rtol=0.0, atol=atol)
        )

    def map(self, f: Callable[[np.ndarray], np.ndarray], label: str | None = None) -> DiscretePosition:
        """Law of ``f(X)`` for a vectorized map ``f``."""
        return DiscretePosition(np.asarray(f(self._values), dtype=float), self._probs, label=label)

    def __neg__(self) -> DiscretePosition:
        return DiscretePosition(-self._values, self._probs)

    def __add__(self, c: float) -> DiscretePosition:
        if isinstance(c, DiscretePosition):
            raise TypeError("the law of a sum needs a joint distribution; use a ScenarioTable")
        return DiscretePosition(self._values + float(c), self._probs)

    __radd__ = __add__

    def __sub__(self, c: float) -> DiscretePosition:
        return self + (-float(c))

    def __mul__(self, lam: float) -> DiscretePosition:
        return DiscretePosition(self._values * float(lam), self._probs)

    __rmul__ = __mul__

    def positive_part(self) -> DiscretePosition:
        """Law of ``X^+ = max(X, 0)``."""
        return self.map(lambda v: np.maximum(v, 0.0))

    def to_dict(self) -> dict:
        d = {"atoms": [[v, p] for v, p in self.atoms]}
        if self.label is not None:
            d["label"] = self.label
        return d

    @classmethod
    def from_dict(cls, d: dict) -> DiscretePosition:
        return cls.from_atoms([tuple(a) for a in d["atoms"]], label=d.get("label"))


def _check_level(p: float) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise DomainError(f"quantile level must lie in [0, 1], got {p!r}")
    return p


def cdf(pos: DiscretePosition, x: float) -> float:
    """``P(X <= x)``; right-continuous step function."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"cdf argument must be finite, got {x!r}")
    k = np.searchsorted(pos.values, x, side="right")
    return 0.0 if k == 0 else float(pos.cumulative[k - 1])


def left_quantile(pos: DiscretePosition, p: float) -> float:
    """``q_X(p) = inf{x : F(x) >= p}``, with ``q_X(0) = essinf X``."""
    p = _check_level(p)
    if p == 0.0:
        return pos.essinf
    k = int(np.searchsorted(pos.cumulative, p - TIE_TOL, side="left"))
    return float(pos.values[min(k, len(pos) - 1)])


def right_quantile(pos: DiscretePosition, p: float) -> float:
    """``q_X^+(p) = inf{x : F(x) > p}``, with ``q_X^+(1) = esssup X``."""
    p = _check_level(p)
    if p == 1.0:
        return pos.esssup
    k = int(np.searchsorted(pos.cumulative, p + TIE_TOL, side="right"))
    return float(pos.values[min(k, len(pos) - 1)])


def moments(pos: DiscretePosition) -> tuple[float, float]:
    mean = math.fsum(pos.values * pos.probs)
    var = math.fsum((pos.values - mean) ** 2 * pos.probs)
    return mean, max(var, 0.0)


def mean(pos: DiscretePosition) -> float:
    return moments(pos)[0]


def negative_part_transform(pos: DiscretePosition) -> DiscretePosition:
    """Law of ``-X^- = min(X, 0)``."""
    return pos.map(lambda v: np.minimum(v, 0.0))


def quantile_steps(pos: DiscretePosition) -> tuple[np.ndarray, np.ndarray]:
    """Breakpoints ``0 = c_0 < ... < c_n = 1`` and the step values.

    ``q_X`` equals ``values[k]`` on ``(c_k, c_{k+1}]``.
    """
    return np.concatenate(([0.0], pos.cumulative)), pos.values


def quantile_integral(pos: DiscretePosition, a: float, b: float) -> float:
    """Exact ``int_a^b q_X(u) du`` for ``0 <= a <= b <= 1``."""
    a, b = _check_level(a), _check_level(b)
    if b < a:
        raise DomainError("integration bounds out of order")
    c, v = quantile_steps(pos)
    lengths = np.clip(np.minimum(c[1:], b) - np.maximum(c[:-1], a), 0.0, None)
    return math.fsum(v * lengths)


def mixture(f1: DiscretePosition, f2: DiscretePosition, lam: float) -> DiscretePosition:
    """Law ``lam * F1 + (1 - lam) * F2``."""
    lam = _check_level(lam)
    if lam == 1.0:
        return f1
    if lam == 0.0:
        return f2
    values = np.concatenate((f1.values, f2.values))
    probs = np.concatenate((lam * f1.probs, (1.0 - lam) * f2.probs))
    keep = probs > 0.0  # weights can underflow for extreme lam
    return DiscretePosition(values[keep], probs[keep] / probs[keep].sum())
