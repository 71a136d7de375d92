"""Excess invariance, surplus invariance subject to positivity (SI+) and witnesses.

A measure is excess invariant when ``rho(X) = rho(-X^-)`` for every
position, and SI+ when the identity is only required where
``rho(X) >= 0``.  Among Choquet measures only VaR-type (binary) distortions
are SI+, and among coherent ones only maximum loss; the constructions below
produce explicit witnesses for every other case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .distortions import Distortion, KusuokaMeasure
from .distributions import DiscretePosition, left_quantile, negative_part_transform, right_quantile
from .errors import DomainError, UnsatisfiableError
from .measures import AcceptanceSet, avar, choquet, kusuoka_mix, max_loss, rho_from_acceptance
from .reports import CheckReport
from .sampling import random_position, rng_from

SI_TOL = 1e-9
NONNEG_GATE = -1e-12

Measure = Callable[[DiscretePosition], float]


def _name(rho) -> str:
    return repr(rho) if not callable(rho) or hasattr(rho, "kind") else getattr(rho, "__name__", repr(rho))


def is_excess_invariant(rho: Measure, positions: Iterable[DiscretePosition], tol: float = SI_TOL) -> CheckReport:
    """Check ``rho(X) = rho(-X^-)`` on every position; report the first violation."""
    n = 0
    for n, x in enumerate(positions, start=1):
        rx = rho(x)
        rn = rho(negative_part_transform(x))
        if abs(rx - rn) > tol:
            return CheckReport(
                f"{_name(rho)} is excess invariant",
                False,
                tolerance=tol,
                checked=n,
                witness={"position": x, "rho_x": rx, "rho_neg_part": rn, "gap": rx - rn},
            )
    return CheckReport(f"{_name(rho)} is excess invariant", True, tolerance=tol, checked=n)


def is_si_plus(rho: Measure, positions: Iterable[DiscretePosition], tol: float = SI_TOL) -> CheckReport:
    """Check ``rho(X) = rho(-X^-)`` on positions with ``rho(X) >= 0``."""
    n = gated = 0
    for n, x in enumerate(positions, start=1):
        rx = rho(x)
        if rx < NONNEG_GATE:
            continue
        gated += 1
        rn = rho(negative_part_transform(x))
        if abs(rx - rn) > tol:
            return CheckReport(
                f"{_name(rho)} is SI+",
                False,
                tolerance=tol,
                checked=n,
                witness={"position": x, "rho_x": rx, "rho_neg_part": rn, "gap": rx - rn},
            )
    return CheckReport(f"{_name(rho)} is SI+", True, tolerance=tol, checked=n, details={"nonnegative_cases": gated})


@dataclass(frozen=True)
class SIWitness:
    """Two-point position violating SI+ with the three risks of its split."""

    position: DiscretePosition
    t0: float
    a1: float
    a2: float
    rho_x: float
    rho_positive_part: float
    rho_negative_part: float

    @property
    def gap(self) -> float:
        """``rho(-X^-) - rho(X) = -rho(X^+)``, positive for every witness built here."""
        return self.rho_negative_part - self.rho_x

    def to_dict(self) -> dict:
        return {
            "position": self.position.to_dict(),
            "t0": self.t0,
            "a1": self.a1,
            "a2": self.a2,
            "rho_x": self.rho_x,
            "rho_positive_part": self.rho_positive_part,
            "rho_negative_part": self.rho_negative_part,
            "gap": self.gap,
        }


def interior_level(h: Distortion, grid: int = 1000) -> float:
    """Level ``t0 = k/grid`` whose value ``h(t0)`` is closest to 1/2 inside (0, 1)."""
    ts = np.arange(1, grid) / grid
    hv = np.asarray(h(ts))
    inside = (hv > 0.0) & (hv < 1.0)
    if not np.any(inside):
        raise UnsatisfiableError(f"{h!r} takes no value strictly between 0 and 1")
    k = int(np.argmin(np.where(inside, np.abs(hv - 0.5), np.inf)))
    return float(ts[k])


def si_counterexample(h: Distortion, t0: float | None = None) -> SIWitness:
    """SI+ witness for a distortion with an interior value.

    With ``a1 = -1`` and ``a2`` the smallest positive integer satisfying
    ``a2 h(t0) > 1 - h(t0)``, the position ``X`` paying ``-a2`` with
    probability ``t0`` and ``1`` otherwise has ``rho_h(X) > 0`` while
    ``rho_h(X^+) = h(t0) - 1 < 0``.  Since ``X^+`` and ``-X^-`` are
    comonotonic, ``rho_h(-X^-) = rho_h(X) - rho_h(X^+) != rho_h(X)``.
    """
    if t0 is None:
        t0 = interior_level(h)
    if not (0.0 < t0 < 1.0):
        raise UnsatisfiableError(f"t0 must lie in (0, 1), got {t0!r}")
    ht = float(h(t0))
    if not (0.0 < ht < 1.0):
        raise UnsatisfiableError(f"h(t0) = {ht!r} is not strictly between 0 and 1")
    a1 = -1.0
    a2 = float(math.floor((1.0 - ht) / ht) + 1)
    x = DiscretePosition([-a2, -a1], [t0, 1.0 - t0])
    return SIWitness(
        position=x,
        t0=t0,
        a1=a1,
        a2=a2,
        rho_x=choquet(x, h),
        rho_positive_part=choquet(x.positive_part(), h),
        rho_negative_part=choquet(negative_part_transform(x), h),
    )


@dataclass(frozen=True)
class BinaryClassification:
    """A {0,1}-valued distortion ``h = 1(t > t*)`` or ``h = 1(t >= t*)``.

    ``form`` is ``"var"`` when ``h(t*) = 0`` (so ``rho_h = VaR_{t*}``) and
    ``"left_quantile"`` when ``h(t*) = 1`` (so ``rho_h(X) = -q_X(t*)``).
    """

    t_star: float
    form: str

    def value(self, pos: DiscretePosition) -> float:
        if self.form == "var":
            return -right_quantile(pos, self.t_star)
        return -left_quantile(pos, self.t_star)

    def to_dict(self) -> dict:
        return {"t_star": self.t_star, "form": self.form}


def classify_binary_distortion(h: Distortion, trials: int = 100, seed: int = 0) -> BinaryClassification:
    """Identify the quantile functional a binary distortion induces.

    The classification is validated against :func:`choquet` on ``trials``
    seeded positions and must agree exactly.
    """
    if not h.is_binary:
        raise DomainError(f"{h!r} is not {{0,1}}-valued")
    t_s, t_i = h.zero_one_levels()
    t_star = t_s
    form = "left_quantile" if float(h(t_star)) == 1.0 else "var"
    out = BinaryClassification(t_star, form)
    rng = rng_from(seed)
    for _ in range(trials):
        x = random_position(rng, integer=True, scale=20.0)
        if choquet(x, h) != out.value(x):
            raise DomainError(f"classification of {h!r} disagrees with the Choquet integral on {x!r}")
    return out


def si_convex_counterexample(mu: KusuokaMeasure, tail_mass: float | None = None) -> SIWitness:
    """SI+ witness for an AVaR mixture that is not maximum loss.

    Let ``p'`` be the smallest positive level carrying mass and
    ``delta = p'/2``.  The position ``X`` paying ``-a`` with probability
    ``delta`` and ``1`` otherwise has ``P(X <= 0) < p'`` and risk affine in
    ``a``; ``a`` is the smallest positive integer making ``rho(X) >= 0``.
    Every AVaR level above ``delta`` then gives ``X^+`` negative risk.
    """
    positive = [p for p, _ in mu.atoms if p > 0.0]
    if not positive:
        raise UnsatisfiableError("the maximum-loss measure is SI+; no witness exists")
    delta = positive[0] / 2.0 if tail_mass is None else float(tail_mass)
    if not (0.0 < delta < positive[-1]):
        raise UnsatisfiableError(f"tail mass {delta!r} must lie in (0, {positive[-1]})")
    # rho(X) = slope * a - offset, exactly.
    slope = math.fsum(w * (min(delta, p) / p if p > 0.0 else 1.0) for p, w in mu.atoms)
    offset = math.fsum(w * max(p - delta, 0.0) / p for p, w in mu.atoms if p > 0.0)
    a = float(max(1, math.ceil(offset / slope - 1e-12)))
    x = DiscretePosition([-a, 1.0], [delta, 1.0 - delta])
    while kusuoka_mix(x, mu) < NONNEG_GATE:
        a += 1.0
        x = DiscretePosition([-a, 1.0], [delta, 1.0 - delta])
    return SIWitness(
        position=x,
        t0=delta,
        a1=-1.0,
        a2=a,
        rho_x=kusuoka_mix(x, mu),
        rho_positive_part=kusuoka_mix(x.positive_part(), mu),
        rho_negative_part=kusuoka_mix(negative_part_transform(x), mu),
    )


def excess_invariant_version(rho0: Measure) -> Measure:
    """``X -> rho0(-X^-)``, the excess-invariant measure built on ``rho0``."""

    def tilde(x: DiscretePosition) -> float:
        return rho0(negative_part_transform(x))

    tilde.__name__ = f"excess[{_name(rho0)}]"
    return tilde


def monotone_excess_conflict_demo(rho0: Measure, positions: Sequence[DiscretePosition], tol: float = SI_TOL) -> CheckReport:
    """Show that ``X -> rho0(-X^-)`` is non-negative yet not comonotonic additive.

    Finds ``X`` with positive risk and compares it with ``X + ||X||``; a
    constant is comonotonic with everything, so additivity would force
    equal risks up to ``rho(||X||) = 0``.
    """
    tilde = excess_invariant_version(rho0)
    claim = f"{tilde.__name__} is comonotonic additive"
    negative = [x for x in positions if tilde(x) < -tol]
    if negative:
        return CheckReport(claim, False, expect="witness", tolerance=tol, checked=len(positions),
                           details={"nonnegativity_violated": negative[0]})
    for n, x in enumerate(positions, start=1):
        rx = tilde(x)
        if rx > tol:
            c = x.sup_norm
            shifted = tilde(x + c)
            rc = tilde(DiscretePosition.constant(c))
            gap = rx + rc - shifted
            if abs(gap) > tol:
                return CheckReport(
                    claim,
                    False,
                    expect="witness",
                    tolerance=tol,
                    checked=n,
                    witness={"position": x, "shift": c, "rho_x": rx, "rho_shift": rc, "rho_sum": shifted, "gap": gap},
                )
    return CheckReport(claim, True, expect="witness", tolerance=tol, checked=len(positions))


def acceptance_surplus_check(
    A: AcceptanceSet,
    trials: int = 200,
    seed: int = 0,
    margin: float = 1e-8,
) -> CheckReport:
    """Check that ``X in A`` and ``Y^- <= X^-`` statewise imply ``Y in A``.

    ``X`` is a random position shifted just inside ``A``; ``Y`` keeps a
    random fraction of each loss of ``X`` and an arbitrary nonnegative
    payoff elsewhere.  The pair ``Y = -X^-`` is always tried first.
    """
    rng = rng_from(seed)
    claim = f"{A.name} is surplus invariant"
    for n in range(1, trials + 1):
        base = random_position(rng, integer=bool(n % 2), scale=10.0)
        m = rho_from_acceptance(A, base)
        x = base + (m + margin)
        v, p = x.values, x.probs
        if not A.accepts(v, p):
            continue
        candidates = [np.minimum(v, 0.0)]
        u = rng.uniform(0.0, 1.0, size=v.size)
        z = rng.uniform(0.0, 10.0, size=v.size)
        candidates.append(np.where(v < 0.0, u * v, z))
        for y in candidates:
            if not A.accepts(y, p):
                return CheckReport(
                    claim,
                    False,
                    tolerance=margin,
                    checked=n,
                    witness={"x": v, "y": y, "probs": p},
                )
    return CheckReport(claim, True, tolerance=margin, checked=trials)


def ml_is_si_plus(positions: Iterable[DiscretePosition]) -> CheckReport:
    return is_si_plus(_named(max_loss, "max_loss"), positions)


def _named(f: Measure, name: str) -> Measure:
    def g(x):
        return f(x)

    g.__name__ = name
    return g


def avar_measure(p: float) -> Measure:
    return _named(lambda x: avar(x, p), f"avar({p})")
