"""Capital requirements raised in a risky eligible asset instead of cash.

For an acceptance set ``A`` and an eligible asset ``S = (S0, S1)`` the
requirement is ``rho_{A,S}(X) = inf{m : X + (m / S0) S1 in A}``.  With a
risk-free ``S`` this is the usual cash-additive measure; with a risky ``S``
the VaR- and AVaR-based versions lose comonotonic additivity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .comonotone import ScenarioTable, _comonotone_columns
from .distortions import KusuokaMeasure
from .errors import DomainError, InvariantViolation
from .measures import (
    BISECT_TOL,
    AcceptanceSet,
    RiskMeasure,
    bisect_capital,
    measure_acceptance,
    var_acceptance,
)
from .reports import CheckReport
from .sampling import rng_from

GRID = (-2.0, -1.0, 0.0, 1.0, 2.0)


@dataclass(frozen=True)
class EligibleAsset:
    """Traded asset with price ``s0 > 0`` and terminal payoff ``s1 >= epsilon > 0``."""

    s0: float
    s1: np.ndarray
    probs: np.ndarray
    epsilon: float | None = None

    def __post_init__(self):
        s1 = np.array(self.s1, dtype=float).ravel()
        probs = np.array(self.probs, dtype=float).ravel()
        if not self.s0 > 0.0:
            raise InvariantViolation(f"eligible asset price must be positive, got {self.s0!r}")
        if s1.shape != probs.shape:
            raise InvariantViolation("payoff and probability vectors differ in length")
        if abs(math.fsum(probs) - 1.0) > 1e-9 or np.any(probs <= 0.0):
            raise InvariantViolation("state probabilities must be positive and sum to 1")
        eps = float(np.min(s1)) if self.epsilon is None else float(self.epsilon)
        if not eps > 0.0 or np.min(s1) < eps:
            raise InvariantViolation("eligible payoff must be bounded below by a positive epsilon")
        s1.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "s0", float(self.s0))
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def risk_free(cls, probs, s0: float = 1.0, s1: float = 1.0) -> EligibleAsset:
        probs = np.asarray(probs, dtype=float)
        return cls(s0, np.full(probs.size, float(s1)), probs)

    @classmethod
    def from_table(cls, table: ScenarioTable, column, s0: float) -> EligibleAsset:
        return cls(s0, table.column(column), table.probs)

    @property
    def n_states(self) -> int:
        return self.s1.size

    @property
    def is_risk_free(self) -> bool:
        return bool(np.ptp(self.s1) == 0.0)

    @property
    def gross_return(self) -> np.ndarray:
        return self.s1 / self.s0

    def prob_outperform(self) -> float:
        """``P(S1 > S0)``."""
        return math.fsum(self.probs[self.s1 > self.s0])

    def leveraged_position(self, lam: float) -> np.ndarray:
        """``lam (1 - S1/S0)``: short ``lam/S0`` units of ``S`` against ``lam`` cash."""
        return lam * (1.0 - self.gross_return)

    def to_dict(self) -> dict:
        return {"s0": self.s0, "s1": self.s1.tolist(), "probs": self.probs.tolist(), "epsilon": self.epsilon}


def _check_x(S: EligibleAsset, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size != S.n_states:
        raise DomainError(f"position has {x.size} states, eligible asset has {S.n_states}")
    return x


def s_rho(A: AcceptanceSet, S: EligibleAsset, x, tol: float = BISECT_TOL) -> float:
    """``inf{m : X + (m/S0) S1 in A}`` by bisection on ``m``."""
    x = _check_x(S, x)
    bound = S.s0 * (float(np.max(np.abs(x))) + 1.0) / S.epsilon
    r = S.s1 / S.s0
    return bisect_capital(lambda m: A.accepts(x + m * r, S.probs), -bound, bound, tol)


def s_var(x, S: EligibleAsset, p: float, tol: float = BISECT_TOL) -> float:
    return s_rho(var_acceptance(p), S, x, tol)


def s_avar(x, S: EligibleAsset, p: float, tol: float = BISECT_TOL) -> float:
    return s_rho(measure_acceptance(RiskMeasure.avar(p)), S, x, tol)


def s_dr(x, S: EligibleAsset, mu: KusuokaMeasure, tol: float = BISECT_TOL) -> float:
    """Eligible-asset version of the AVaR mixture ``mu``."""
    return s_rho(measure_acceptance(RiskMeasure.kusuoka_mixture(mu)), S, x, tol)


def s_var_closed_form(x, S: EligibleAsset, p: float) -> float:
    """``q_R(1 - p)`` with ``R = -X S0 / S1``; reference value for :func:`s_var`."""
    from .distributions import DiscretePosition, left_quantile

    x = _check_x(S, x)
    return left_quantile(DiscretePosition(-x * S.s0 / S.s1, S.probs), 1.0 - p)


def check_s_additivity(A: AcceptanceSet, S: EligibleAsset, x, lam: float, tol: float = BISECT_TOL) -> bool:
    """``rho_{A,S}(X + lam S1) = rho_{A,S}(X) - lam S0`` within twice the bisection tolerance."""
    x = _check_x(S, x)
    lhs = s_rho(A, S, x + lam * S.s1, tol)
    rhs = s_rho(A, S, x, tol) - lam * S.s0
    return abs(lhs - rhs) <= 2.0 * tol + 1e-12 * max(1.0, abs(rhs))


def _measure_fn(S: EligibleAsset, p: float, measure: str, mu: KusuokaMeasure | None):
    if measure == "var":
        return lambda v: s_var(v, S, p)
    if measure == "avar":
        return lambda v: s_avar(v, S, p)
    if measure == "dr":
        if mu is None:
            raise DomainError("measure 'dr' needs a Kusuoka measure")
        return lambda v: s_dr(v, S, mu)
    raise DomainError(f"unknown eligible measure {measure!r}")


def _grid_pairs(n: int):
    vectors = list(itertools.product(GRID, repeat=n))
    for x in vectors:
        xa = np.array(x)
        if np.ptp(xa) == 0.0:
            continue
        for y in vectors:
            ya = np.array(y)
            if _comonotone_columns(xa, ya):
                yield xa, ya


def comonotonic_additivity_violation(
    S: EligibleAsset,
    p: float,
    measure: str = "var",
    budget: int = 10_000,
    seed: int = 0,
    threshold: float = 1e-6,
    mu: KusuokaMeasure | None = None,
    expect: str = "witness",
) -> CheckReport:
    """Search for comonotonic ``X, Y`` with ``rho(X+Y) != rho(X) + rho(Y)``.

    Comonotone pairs on the integer grid ``{-2..2}`` are enumerated first
    (state counts up to 5), then random comonotone pairs are drawn.  The
    search stops at the first gap above ``threshold``; exhausting the budget
    is reported as such and is no proof of additivity.
    """
    rho = _measure_fn(S, p, measure, mu)
    rng = rng_from(seed)
    n = S.n_states
    claim = f"S-{measure}({p}) is comonotonic additive"
    cache: dict[bytes, float] = {}

    def value(v: np.ndarray) -> float:
        key = v.tobytes()
        if key not in cache:
            cache[key] = rho(v)
        return cache[key]

    def candidates():
        if n <= 5:
            yield from _grid_pairs(n)
        while True:
            order = rng.permutation(n)
            x = np.empty(n)
            y = np.empty(n)
            x[order] = np.sort(rng.integers(-5, 6, size=n)).astype(float)
            y[order] = np.sort(rng.integers(-5, 6, size=n)).astype(float)
            yield x, y

    tried = 0
    best = 0.0
    for x, y in candidates():
        if tried >= budget:
            break
        tried += 1
        rx, ry, rs = value(x), value(y), value(x + y)
        gap = rs - rx - ry
        best = max(best, abs(gap))
        if abs(gap) > threshold:
            return CheckReport(
                claim,
                False,
                expect=expect,
                tolerance=threshold,
                checked=tried,
                witness={"x": x, "y": y, "rho_x": rx, "rho_y": ry, "rho_sum": rs, "gap": gap, "asset": S},
            )
    return CheckReport(
        claim, True, expect=expect, tolerance=threshold, checked=tried, details={"max_gap": best, "budget_exhausted": True}
    )


def leverage_slope(S: EligibleAsset, p: float, lambdas=(1.0, 2.0, 4.0, 8.0, 16.0)) -> dict:
    """Fit ``S-VaR_p(lam (1 - S1/S0))`` against ``lam`` by least squares."""
    lam = np.asarray(lambdas, dtype=float)
    vals = np.array([s_var(S.leveraged_position(float(k)), S, p) for k in lam])
    design = np.column_stack([lam, np.ones_like(lam)])
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    resid = float(np.max(np.abs(design @ coef - vals)))
    return {"lambdas": lam, "values": vals, "slope": float(coef[0]), "intercept": float(coef[1]), "residual": resid}


def span_acceptance_check(A: AcceptanceSet, S: EligibleAsset, lambdas=(0.0, 0.5, 1.0, 10.0, 100.0)) -> CheckReport:
    """Whether ``lam (1 - S1/S0)`` lies in ``A`` for every tested ``lam >= 0``."""
    for n, lam in enumerate(lambdas, start=1):
        v = S.leveraged_position(lam)
        if not A.accepts(v, S.probs):
            return CheckReport(
                f"span(1 - S1/S0) in {A.name}", False, checked=n, witness={"lambda": lam, "position": v}
            )
    return CheckReport(f"span(1 - S1/S0) in {A.name}", True, checked=len(lambdas))


def pointedness_check(A: AcceptanceSet, S: EligibleAsset, trials: int = 200, seed: int = 0) -> CheckReport:
    """Sampled check of ``A cap (-A) = {0}``.

    Passing only means the sample is consistent with the property; it is
    never reported as verified.
    """
    rng = rng_from(seed)
    samples = [S.leveraged_position(1.0), -S.leveraged_position(1.0)]
    samples += [rng.integers(-5, 6, size=S.n_states).astype(float) for _ in range(trials)]
    for n, v in enumerate(samples, start=1):
        if np.any(v != 0.0) and A.accepts(v, S.probs) and A.accepts(-v, S.probs):
            return CheckReport(f"{A.name} is pointed", False, checked=n, witness={"position": v})
    return CheckReport(f"{A.name} is pointed", True, checked=len(samples), details={"verdict": "consistent-with"})
