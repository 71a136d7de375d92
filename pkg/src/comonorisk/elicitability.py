"""Scoring functions, expected-score minimization and level-set convexity.

A functional is elicited by a score ``S(x, y)`` when the risk is minus the
smallest minimizer of ``x -> E[S(x, X)]``.  The mean is elicited by the
squared score, quantiles by the pinball score and expectiles by the
asymmetric squared score.  AVaR is not elicitable: it has non-convex level
sets in the space of laws, which a direct search exhibits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .distributions import TIE_TOL, DiscretePosition, cdf, mean, mixture
from .errors import DomainError
from .measures import avar
from .reports import CheckReport

SCORE_KINDS = ("squared", "pinball", "expectile_score")
ARGMIN_TOL = 1e-12


def _identity(x):
    return x


@dataclass(frozen=True)
class ScoreFunction:
    """Score ``S(x, y)`` for a forecast ``x`` and a realization ``y``.

    ``squared``: ``(x - y)^2``.  ``pinball``: ``(1(x >= y) - p)(g(x) - g(y))``
    for a strictly increasing ``g``.  ``expectile_score``:
    ``|1(x >= y) - tau| (x - y)^2``.
    """

    kind: str
    level: float = 0.5
    g: Callable[[np.ndarray], np.ndarray] = field(default=_identity, compare=False)

    def __post_init__(self):
        if self.kind not in SCORE_KINDS:
            raise DomainError(f"unknown score kind {self.kind!r}")
        if self.kind != "squared" and not (0.0 < self.level < 1.0):
            raise DomainError(f"score level must lie in (0, 1), got {self.level!r}")

    @classmethod
    def squared(cls) -> ScoreFunction:
        return cls("squared")

    @classmethod
    def pinball(cls, p: float, g: Callable | None = None) -> ScoreFunction:
        return cls("pinball", float(p), g or _identity)

    @classmethod
    def expectile(cls, tau: float) -> ScoreFunction:
        return cls("expectile_score", float(tau))

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "squared":
            return (x - y) ** 2
        ind = (x >= y).astype(float)
        if self.kind == "pinball":
            return (ind - self.level) * (self.g(x) - self.g(y))
        return np.abs(ind - self.level) * (x - y) ** 2

    def _slope_sign_right(self, x: float, pos: DiscretePosition) -> float:
        """A quantity with the sign of the right derivative of the expected score."""
        v, p = pos.values, pos.probs
        if self.kind == "squared":
            return x - mean(pos)
        if self.kind == "pinball":
            return cdf(pos, x) - self.level + TIE_TOL
        up = math.fsum(np.maximum(v - x, 0.0) * p)
        down = math.fsum(np.maximum(x - v, 0.0) * p)
        return (1.0 - self.level) * down - self.level * up

    def _slope_sign_left(self, x: float, pos: DiscretePosition) -> float:
        if self.kind == "pinball":
            below = math.fsum(pos.probs[pos.values < x])
            return below - self.level - TIE_TOL
        return self._slope_sign_right(x, pos)

    def to_spec(self) -> dict:
        d = {"kind": self.kind}
        if self.kind != "squared":
            d["level"] = self.level
        if self.g is not _identity:
            d["g"] = getattr(self.g, "__name__", "custom")
        return d


def expected_score(x: float, pos: DiscretePosition, S: ScoreFunction) -> float:
    """``E[S(x, X)] = sum_i p_i S(x, v_i)``."""
    return math.fsum(np.asarray(S(x, pos.values)) * pos.probs)


@dataclass(frozen=True)
class Minimizer:
    """Argmin interval ``[left, right]`` of the expected score and ``rho = -left``."""

    left: float
    right: float
    score: float

    @property
    def rho(self) -> float:
        return -self.left

    def to_dict(self) -> dict:
        return {"left": self.left, "right": self.right, "score": self.score, "rho": self.rho}


def _bisect(pred: Callable[[float], bool], lo: float, hi: float, tol: float) -> tuple[float, float]:
    for _ in range(400):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def minimize_score(
    pos: DiscretePosition,
    S: ScoreFunction,
    bracket: tuple[float, float] | None = None,
    tol: float = ARGMIN_TOL,
) -> Minimizer:
    """Smallest and largest minimizers of ``x -> E[S(x, X)]``.

    The scores handled are convex in ``x`` (or monotone transforms of convex
    ones), so the argmin is an interval.  A scan over atoms and midpoints
    locates the cell containing the sign change of the one-sided
    derivatives, which bisection then resolves to ``tol`` relative to the
    payoff scale.  Pinball endpoints are snapped to the atom they converge to.
    """
    lo, hi = bracket if bracket is not None else (pos.essinf, pos.esssup)
    if lo > pos.essinf or hi < pos.esssup:
        raise DomainError("bracket must contain [essinf X, esssup X]")
    scale = max(1.0, pos.sup_norm)
    eps = tol * scale
    grid = np.unique(np.concatenate(([lo, hi], pos.values, 0.5 * (pos.values[1:] + pos.values[:-1]))))

    right_ok = [S._slope_sign_right(float(x), pos) >= 0.0 for x in grid]
    k = right_ok.index(True) if True in right_ok else grid.size - 1
    a = float(grid[max(k - 1, 0)])
    b = float(grid[k])
    if k == 0:
        left = b
    else:
        _, left = _bisect(lambda x: S._slope_sign_right(x, pos) >= 0.0, a, b, eps)

    left_ok = [S._slope_sign_left(float(x), pos) <= 0.0 for x in grid]
    j = len(left_ok) - 1 - left_ok[::-1].index(True) if True in left_ok else 0
    a = float(grid[j])
    b = float(grid[min(j + 1, grid.size - 1)])
    if j == grid.size - 1:
        right = a
    else:
        right, _ = _bisect(lambda x: S._slope_sign_left(x, pos) > 0.0, a, b, eps)

    if S.kind == "pinball":
        left = _snap(left, pos.values, eps)
        right = _snap(right, pos.values, eps)
    right = max(right, left)
    return Minimizer(left, right, expected_score(left, pos, S))


def _snap(x: float, atoms: np.ndarray, eps: float) -> float:
    k = int(np.argmin(np.abs(atoms - x)))
    return float(atoms[k]) if abs(atoms[k] - x) <= 4.0 * eps else x


def consistency_check(
    rho: Callable[[DiscretePosition], float],
    S: ScoreFunction,
    family: Iterable[DiscretePosition],
    tol: float = 1e-8,
) -> CheckReport:
    """``-min argmin E[S(., X)] == rho(X)`` on every position of the family."""
    claim = f"{S.kind} score elicits {getattr(rho, '__name__', repr(rho))}"
    n = 0
    for n, x in enumerate(family, start=1):
        m = minimize_score(x, S)
        r = rho(x)
        if abs(m.rho - r) > tol:
            return CheckReport(claim, False, tolerance=tol, checked=n,
                               witness={"position": x, "score_rho": m.rho, "rho": r, "argmin": m.to_dict()})
    return CheckReport(claim, True, tolerance=tol, checked=n)


def level_set_convexity_check(
    rho: Callable[[DiscretePosition], float],
    f1: DiscretePosition,
    f2: DiscretePosition,
    lambdas: Sequence[float] = (0.1, 0.25, 0.5, 0.75, 0.9),
    tol: float = 1e-6,
) -> CheckReport:
    """Evaluate ``rho`` on mixtures of two laws with equal risk.

    A deviation above ``tol`` shows a non-convex level set, which rules out
    elicitability.
    """
    r1, r2 = rho(f1), rho(f2)
    if abs(r1 - r2) > 1e-9:
        raise DomainError(f"laws have different risks {r1!r} and {r2!r}")
    devs = [(lam, rho(mixture(f1, f2, lam)) - r1) for lam in lambdas]
    lam, dev = max(devs, key=lambda t: abs(t[1]))
    claim = f"level set of {getattr(rho, '__name__', repr(rho))} at {r1:.6g} is convex"
    witness = None
    if abs(dev) > tol:
        witness = {"f1": f1, "f2": f2, "lambda": lam, "rho_level": r1, "rho_mixture": r1 + dev, "deviation": dev}
    return CheckReport(claim, abs(dev) <= tol, tolerance=tol, checked=len(devs), witness=witness,
                       details={"max_deviation": abs(dev)})


def _two_point_laws(values: Sequence[float], probs: Sequence[float]):
    for a in values:
        for b in values:
            if b <= a:
                continue
            for q in probs:
                yield DiscretePosition([a, b], [q, 1.0 - q])


def avar_levelset_search(
    p: float = 0.5,
    threshold: float = 1e-3,
    values: Sequence[float] = (-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0),
    probs: Sequence[float] = (0.1, 0.25, 0.5, 0.75, 0.9),
    lam: float = 0.5,
) -> CheckReport:
    """Brute-force search for two-point laws with equal AVaR whose mixture moves AVaR.

    The second law is shifted by cash to match the first law's AVaR, which
    keeps both in the same level set.
    """

    def rho(x: DiscretePosition) -> float:
        return avar(x, p)

    rho.__name__ = f"avar({p})"
    laws = list(_two_point_laws(values, probs))
    n = 0
    for f1 in laws:
        r1 = rho(f1)
        for f2 in laws:
            n += 1
            g2 = f2 + (rho(f2) - r1)
            rep = level_set_convexity_check(rho, f1, g2, (lam,), tol=threshold)
            if not rep.passed:
                return CheckReport(f"level sets of avar({p}) are convex", False, expect="witness",
                                   tolerance=threshold, checked=n, witness=rep.witness)
    return CheckReport(f"level sets of avar({p}) are convex", True, expect="witness", tolerance=threshold, checked=n)
