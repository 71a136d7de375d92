"""Two risky assets plus a risk-free payoff: mean-variance and mean-spectral choice.

A portfolio is ``X_{beta,gamma} = beta (gamma X1 + (1 - gamma) X2) + (1 - beta) x0``
with ``beta >= 0`` (and ``beta <= 1`` without short sales).  Mean-variance
problems have interior closed-form solutions.  A coherent spectral risk is
affine in ``beta`` along each ray, so the trade-off problem only ever picks a
corner: nothing, everything, or an unbounded position in the tangency
portfolio.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from .comonotone import ScenarioTable
from .distortions import Distortion, SpectralDensity
from .errors import DegenerateProblem, DomainError, UnsatisfiableError
from .measures import RiskMeasure
from .reports import CheckReport

OBJECTIVES = ("mv_tradeoff", "mv_limited", "spectral_tradeoff", "spectral_limited")
GAMMA_RANGE = (-10.0, 10.0)
GOLDEN_TOL = 1e-8
TIE_RTOL = 1e-12


class Corner(enum.Enum):
    """Corner verdicts of the mean-spectral trade-off problem."""

    ZERO = "0"
    FULL = "1"
    UNBOUNDED = "unbounded"

    @property
    def beta(self) -> float:
        return {"0": 0.0, "1": 1.0, "unbounded": math.inf}[self.value]


@dataclass(frozen=True)
class PortfolioProblem:
    """Assets ``X1, X2`` (the first two table columns), risk-free ``x0`` and an objective.

    ``lam`` is the risk aversion (``> 0`` for mean-variance, in ``[0, 1]``
    for mean-spectral), ``mu_target`` the required mean of the limited
    problems and ``phi`` the spectral density or concave distortion.
    """

    table: ScenarioTable
    x0: float
    objective: str = "mv_tradeoff"
    lam: float | None = None
    mu_target: float | None = None
    phi: SpectralDensity | Distortion | None = None
    short_sales: bool = True

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise DomainError(f"unknown objective {self.objective!r}")
        if self.table.n_assets < 2:
            raise DomainError("a portfolio problem needs two risky assets")
        object.__setattr__(self, "x0", float(self.x0))
        if self.objective.endswith("tradeoff"):
            if self.lam is None:
                raise DomainError(f"{self.objective} needs a risk aversion lam")
            lam = float(self.lam)
            if self.objective == "mv_tradeoff" and not lam > 0.0:
                raise DomainError(f"mean-variance risk aversion must be positive, got {lam!r}")
            if self.objective == "spectral_tradeoff" and not (0.0 <= lam <= 1.0):
                raise DomainError(f"spectral trade-off weight must lie in [0, 1], got {lam!r}")
            object.__setattr__(self, "lam", lam)
        elif self.mu_target is None:
            raise DomainError(f"{self.objective} needs mu_target")
        else:
            object.__setattr__(self, "mu_target", float(self.mu_target))
        if self.objective.startswith("spectral") and self.phi is None:
            raise DomainError(f"{self.objective} needs a spectral density phi")
        if self.denominator <= 0.0:
            raise DegenerateProblem("V(X1) + V(X2) - 2 Cov(X1, X2) must be positive")

    def replace(self, **kw) -> PortfolioProblem:
        fields = dict(
            table=self.table, x0=self.x0, objective=self.objective, lam=self.lam,
            mu_target=self.mu_target, phi=self.phi, short_sales=self.short_sales,
        )
        fields.update(kw)
        return PortfolioProblem(**fields)

    @property
    def x1(self) -> np.ndarray:
        return self.table.column(0)

    @property
    def x2(self) -> np.ndarray:
        return self.table.column(1)

    @property
    def means(self) -> np.ndarray:
        return self.table.probs @ self.table.payoffs[:, :2]

    @property
    def covariance(self) -> np.ndarray:
        dev = self.table.payoffs[:, :2] - self.means
        return (dev * self.table.probs[:, None]).T @ dev

    @property
    def denominator(self) -> float:
        c = self.covariance
        return float(c[0, 0] + c[1, 1] - 2.0 * c[0, 1])

    @property
    def risk_measure(self) -> RiskMeasure:
        if self.phi is None:
            raise DomainError("no spectral density on this problem")
        return RiskMeasure.spectral(self.phi)

    def risky_payoff(self, gamma: float) -> np.ndarray:
        """Statewise payoff of ``X_gamma = gamma X1 + (1 - gamma) X2``."""
        return gamma * self.x1 + (1.0 - gamma) * self.x2

    def payoff(self, beta: float, gamma: float) -> np.ndarray:
        return beta * self.risky_payoff(gamma) + (1.0 - beta) * self.x0

    def expected_return(self, beta: float, gamma: float) -> float:
        return math.fsum(self.table.probs * self.payoff(beta, gamma))

    def variance(self, beta: float, gamma: float) -> float:
        x = self.payoff(beta, gamma)
        m = math.fsum(self.table.probs * x)
        return math.fsum(self.table.probs * (x - m) ** 2)

    def spectral_risk(self, beta: float, gamma: float) -> float:
        return self.risk_measure(self.table.law_of(self.payoff(beta, gamma)))

    def risk(self, beta: float, gamma: float) -> float:
        """Variance for mean-variance objectives, spectral risk otherwise."""
        if self.objective.startswith("mv"):
            return self.variance(beta, gamma)
        return self.spectral_risk(beta, gamma)

    def objective_value(self, beta: float, gamma: float) -> float:
        """Trade-off objective at ``(beta, gamma)``."""
        e = self.expected_return(beta, gamma)
        if self.objective == "mv_tradeoff":
            return e - 0.5 * self.lam * self.variance(beta, gamma)
        if self.objective == "spectral_tradeoff":
            return (1.0 - self.lam) * e - self.lam * self.spectral_risk(beta, gamma)
        raise DomainError("objective_value is defined for trade-off problems only")

    def to_dict(self) -> dict:
        d = {
            "table": self.table.to_dict(),
            "x0": self.x0,
            "objective": self.objective,
            "short_sales": self.short_sales,
        }
        if self.lam is not None:
            d["lam"] = self.lam
        if self.mu_target is not None:
            d["mu_target"] = self.mu_target
        if self.phi is not None:
            d["phi"] = self.risk_measure.to_spec()
        return d


# -- mean-variance ------------------------------------------------------------


@dataclass(frozen=True)
class MVSolution:
    """Optimal ``(beta, gamma)`` and the closed-form ingredients.

    ``gamma_star`` is the best mix when the whole budget sits in risky
    assets, ``gamma_tangency`` the mix of the tangency portfolio and
    ``beta_star`` the risky share along the tangency ray.  Without
    constraints binding the optimum is ``(beta_star, gamma_tangency)``.
    """

    beta: float
    gamma: float
    gamma_star: float
    beta_star: float
    gamma_mvp: float
    gamma_tangency: float

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "gamma": self.gamma,
            "gamma_star": self.gamma_star,
            "beta_star": self.beta_star,
            "gamma_mvp": self.gamma_mvp,
            "gamma_tangency": self.gamma_tangency,
        }


def gamma_mvp(problem: PortfolioProblem) -> float:
    """Minimum-variance mix ``(V2 - Cov) / (V1 + V2 - 2 Cov)``."""
    c = problem.covariance
    return float((c[1, 1] - c[0, 1]) / problem.denominator)


def _excess_weights(problem: PortfolioProblem) -> np.ndarray:
    """``Sigma^{-1} (m - x0 1)``: the direction of every mean-variance optimum."""
    c = problem.covariance
    det = float(c[0, 0] * c[1, 1] - c[0, 1] ** 2)
    if det <= 1e-14 * max(1.0, float(c[0, 0] * c[1, 1])):
        raise DegenerateProblem("the covariance matrix of X1, X2 is singular")
    return np.linalg.solve(c, problem.means - problem.x0)


def mv_tangency(problem: PortfolioProblem) -> float:
    """Mix of the mean-variance tangency portfolio.

    Exists with ``beta >= 0`` only when ``x0`` lies below the mean of the
    minimum-variance portfolio.
    """
    w = _excess_weights(problem)
    s = float(w.sum())
    if not s > 0.0:
        raise DegenerateProblem("x0 is not below the minimum-variance mean; no tangency portfolio")
    return float(w[0] / s)


def mv_tradeoff_solution(problem: PortfolioProblem) -> MVSolution:
    """Maximize ``E[X] - (lam/2) V(X)`` over ``beta >= 0`` and real ``gamma``."""
    if problem.lam is None or not problem.lam > 0.0:
        raise DomainError("mean-variance trade-off needs lam > 0")
    lam = problem.lam
    m = problem.means
    g_mvp = gamma_mvp(problem)
    g_star = g_mvp - (m[1] - m[0]) / (lam * problem.denominator)
    g_t = mv_tangency(problem)
    excess = problem.expected_return(1.0, g_t) - problem.x0
    b_star = excess / (lam * problem.variance(1.0, g_t))
    beta, gamma = b_star, g_t
    if not problem.short_sales and b_star > 1.0:
        beta, gamma = 1.0, g_star
    return MVSolution(float(beta), float(gamma), float(g_star), float(b_star), g_mvp, g_t)


def mv_limited_solution(problem: PortfolioProblem) -> MVSolution:
    """Minimize ``V(X)`` subject to ``E[X] = mu_target`` and ``beta >= 0``."""
    if problem.mu_target is None:
        raise DomainError("mean-variance limited analysis needs mu_target")
    mu, x0 = problem.mu_target, problem.x0
    m = problem.means
    g_mvp = gamma_mvp(problem)
    w = _excess_weights(problem)
    s = float(w.sum())
    h = float((m - x0) @ w)
    if mu == x0:
        g_t = float(w[0] / s) if s > 0.0 else math.nan
        return MVSolution(0.0, g_t, math.nan, 0.0, g_mvp, g_t)
    if not (s > 0.0 and h > 0.0) or (mu - x0) * s < 0.0:
        raise UnsatisfiableError(
            f"mean {mu!r} is not attained by a variance-minimizing portfolio with beta >= 0"
        )
    g_t = float(w[0] / s)
    beta = (mu - x0) * s / h
    gamma = g_t
    if not problem.short_sales and beta > 1.0:
        if m[0] == m[1]:
            raise UnsatisfiableError("equal asset means cannot reach the target with beta = 1")
        beta, gamma = 1.0, float((mu - m[1]) / (m[0] - m[1]))
    return MVSolution(float(beta), gamma, math.nan, float(beta), g_mvp, g_t)


def implied_target(problem: PortfolioProblem) -> float:
    """``mu(lam)``: the mean of the trade-off optimum, fed to the limited problem."""
    sol = mv_tradeoff_solution(problem)
    return problem.expected_return(sol.beta, sol.gamma)


def numeric_mv_tradeoff(problem: PortfolioProblem) -> tuple[float, float]:
    """Numerical optimizer of the mean-variance trade-off, used as an oracle.

    Works in the holdings ``(a, b) = (beta gamma, beta (1 - gamma))``, where
    the objective is a concave quadratic: a coarse grid picks a start and a
    root finder zeroes its central-difference gradient, which is exact for
    quadratics up to rounding.  The constraint ``beta <= 1`` is handled by
    searching the line ``a + b = 1`` when the free optimum violates it.
    """
    p, x = problem.table.probs, problem.table.payoffs[:, :2]
    lam, x0 = problem.lam, problem.x0

    def value(w):
        pay = x @ w + (1.0 - w.sum()) * x0
        mean = p @ pay
        return mean - 0.5 * lam * (p @ (pay - mean) ** 2)

    def grad(w, step=1e-2):
        e = np.eye(w.size) * step
        return np.array([(value(w + d) - value(w - d)) / (2.0 * step) for d in e])

    axis = np.linspace(-20.0, 20.0, 41)
    start = max(((a, b) for a in axis for b in axis), key=lambda w: value(np.array(w)))
    a, b = optimize.root(grad, np.array(start, float), tol=1e-14).x
    if problem.short_sales or a + b <= 1.0:
        return float(a + b), float(a / (a + b))
    g = optimize.root(lambda v: grad(np.array([v[0], 1.0 - v[0]])) @ np.array([1.0, -1.0]),
                      np.array([a / (a + b)]), tol=1e-14).x[0]
    return 1.0, float(g)


# -- mean-spectral ------------------------------------------------------------


def _gamma_kinks(problem: PortfolioProblem, lo: float, hi: float) -> np.ndarray:
    """Mixes where two states of ``X_gamma`` swap order, plus the range ends.

    Between consecutive kinks the quantile function of ``X_gamma`` is affine
    in ``gamma``, so is any spectral risk.
    """
    d = problem.x1 - problem.x2
    base = problem.x2
    dd = d[:, None] - d[None, :]
    db = base[None, :] - base[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        g = db / dd
    g = g[np.isfinite(g)]
    g = g[(g > lo) & (g < hi)]
    return np.unique(np.concatenate(([lo, hi], g)))


def _excess_risk(problem: PortfolioProblem, gamma: float) -> float:
    """``rho(X_gamma) - rho(x0)``."""
    return problem.spectral_risk(1.0, gamma) + problem.x0


def _excess_mean(problem: PortfolioProblem, gamma: float) -> float:
    return problem.expected_return(1.0, gamma) - problem.x0


def tangency_ratio(problem: PortfolioProblem, gamma: float) -> float:
    """``E[X_gamma - x0] / (rho(X_gamma) - rho(x0))``."""
    r = _excess_risk(problem, gamma)
    if not r > 0.0:
        raise DegenerateProblem(f"rho(X_gamma) <= rho(x0) at gamma={gamma!r}")
    return _excess_mean(problem, gamma) / r


@dataclass(frozen=True)
class Tangency:
    gamma: float
    ratio: float
    boundary_hit: bool
    method: str

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "ratio": self.ratio, "boundary_hit": self.boundary_hit, "method": self.method}


def spectral_tangency(
    problem: PortfolioProblem,
    gamma_range: tuple[float, float] = GAMMA_RANGE,
    method: str = "kinks",
) -> Tangency:
    """Maximize the reward-to-risk ratio over ``gamma`` in ``gamma_range``.

    ``method="kinks"`` evaluates the ratio at every order-swap mix, which is
    exact because the ratio is monotone between kinks.  ``method="golden"``
    scans a grid and refines with a bounded golden-section search to
    ``1e-8``.  Hitting either end of the range raises a warning.
    """
    lo, hi = gamma_range
    kinks = _gamma_kinks(problem, lo, hi)
    risks = np.array([_excess_risk(problem, g) for g in kinks])
    if np.all(risks <= 0.0):
        raise DegenerateProblem("every mix is at most as risky as the risk-free payoff")
    if np.any(risks <= 0.0):
        raise DegenerateProblem("some mix is no riskier than the risk-free payoff; the ratio is unbounded")
    if method == "kinks":
        ratios = np.array([_excess_mean(problem, g) for g in kinks]) / risks
        k = int(np.argmax(ratios))
        gamma, ratio = float(kinks[k]), float(ratios[k])
    elif method == "golden":
        grid = np.linspace(lo, hi, 401)
        vals = np.array([tangency_ratio(problem, g) for g in grid])
        k = int(np.argmax(vals))
        a, b = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
        res = optimize.minimize_scalar(
            lambda g: -tangency_ratio(problem, g), bounds=(a, b), method="bounded", options={"xatol": GOLDEN_TOL}
        )
        gamma, ratio = (float(res.x), -float(res.fun)) if -res.fun >= vals[k] else (float(grid[k]), float(vals[k]))
    else:
        raise DomainError(f"unknown tangency method {method!r}")
    hit = math.isclose(gamma, lo, abs_tol=1e-6) or math.isclose(gamma, hi, abs_tol=1e-6)
    if hit:
        warnings.warn(f"tangency mix {gamma:g} sits on the search boundary {gamma_range}", RuntimeWarning, stacklevel=2)
    return Tangency(gamma, ratio, hit, method)


@dataclass(frozen=True)
class SpectralSolution:
    """Corner verdict of the trade-off problem and the tangency data behind it."""

    corner: Corner
    gamma_tangency: float
    ratio: float
    threshold: float
    boundary_hit: bool

    @property
    def beta(self) -> float:
        return self.corner.beta

    def to_dict(self) -> dict:
        return {
            "beta": self.corner.value,
            "gamma_tangency": self.gamma_tangency,
            "ratio": self.ratio,
            "threshold": self.threshold,
            "boundary_hit": self.boundary_hit,
        }


def tradeoff_threshold(lam: float) -> float:
    """``lam / (1 - lam)``, infinite at ``lam = 1``."""
    return math.inf if lam >= 1.0 else lam / (1.0 - lam)


def spectral_tradeoff_solution(problem: PortfolioProblem, tangency: Tangency | None = None) -> SpectralSolution:
    """Corner solution of ``max (1 - lam) E[X] - lam rho(X)``.

    The objective is affine in ``beta`` along the tangency ray with slope
    proportional to ``ratio - lam/(1 - lam)``; a tie counts as zero.
    """
    if problem.lam is None:
        raise DomainError("spectral trade-off needs lam")
    t = tangency if tangency is not None else spectral_tangency(problem)
    thr = tradeoff_threshold(problem.lam)
    if t.ratio <= thr + TIE_RTOL * max(1.0, abs(thr)):
        corner = Corner.ZERO
    else:
        corner = Corner.UNBOUNDED if problem.short_sales else Corner.FULL
    return SpectralSolution(corner, t.gamma, t.ratio, thr, t.boundary_hit)


@dataclass(frozen=True)
class LimitedSolution:
    beta: float
    gamma: float
    risk: float

    def to_dict(self) -> dict:
        return {"beta": self.beta, "gamma": self.gamma, "risk": self.risk}


def spectral_limited_solution(
    problem: PortfolioProblem, gamma_range: tuple[float, float] = GAMMA_RANGE
) -> LimitedSolution:
    """Minimize ``rho(X)`` subject to ``E[X] = mu_target``.

    On the constraint ``beta = (mu - x0) / E[X_gamma - x0]`` the risk is a
    linear-fractional function of ``gamma`` between kinks, so its minimum
    sits on a kink, an end of ``gamma_range`` or a mix where ``beta = 1``
    becomes binding.
    """
    if problem.mu_target is None:
        raise DomainError("spectral limited analysis needs mu_target")
    mu, x0 = problem.mu_target, problem.x0
    if mu == x0:
        return LimitedSolution(0.0, math.nan, -x0)
    lo, hi = gamma_range
    cands = list(_gamma_kinks(problem, lo, hi))
    m = problem.means
    if m[0] != m[1]:
        g_full = (mu - m[1]) / (m[0] - m[1])
        if lo <= g_full <= hi:
            cands.append(float(g_full))
    best = None
    for g in cands:
        ex = _excess_mean(problem, g)
        if ex == 0.0:
            continue
        beta = (mu - x0) / ex
        if beta < 0.0 or (not problem.short_sales and beta > 1.0 + 1e-12):
            continue
        beta = min(beta, 1.0) if not problem.short_sales else beta
        r = problem.spectral_risk(beta, g)
        if best is None or r < best.risk:
            best = LimitedSolution(float(beta), float(g), float(r))
    if best is None:
        raise UnsatisfiableError(f"no admissible portfolio has mean {mu!r}")
    return best


# -- frontier and structural checks ------------------------------------------


@dataclass(frozen=True)
class FrontierPoint:
    beta: float
    gamma: float
    expected_return: float
    risk: float
    efficient: bool

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "gamma": self.gamma,
            "expected_return": self.expected_return,
            "risk": self.risk,
            "efficient": self.efficient,
        }


FRONTIER_COLUMNS = ("beta", "gamma", "expected_return", "risk", "efficient")


def non_dominated(expected: np.ndarray, risk: np.ndarray) -> np.ndarray:
    """Mask of points no other point beats in mean (up) and risk (down), one strictly."""
    expected = np.asarray(expected, float)
    risk = np.asarray(risk, float)
    order = np.lexsort((-expected, risk))
    keep = np.zeros(expected.size, bool)
    best_lower = -math.inf
    i = 0
    while i < order.size:
        j = i
        while j < order.size and risk[order[j]] == risk[order[i]]:
            j += 1
        group = order[i:j]
        top = expected[group].max()
        if top > best_lower:
            keep[group[expected[group] == top]] = True
        best_lower = max(best_lower, top)
        i = j
    return keep


def efficient_frontier(
    problem: PortfolioProblem,
    betas: Sequence[float],
    gammas: Sequence[float],
) -> list[FrontierPoint]:
    """Evaluate every grid ``(beta, gamma)`` and flag the non-dominated ones.

    Risk is the variance for mean-variance problems and the spectral risk
    otherwise.  Betas outside the admissible range are dropped.
    """
    cap = math.inf if problem.short_sales else 1.0
    grid = [(float(b), float(g)) for b in betas for g in gammas if 0.0 <= b <= cap]
    e = np.array([problem.expected_return(b, g) for b, g in grid])
    r = np.array([problem.risk(b, g) for b, g in grid])
    mask = non_dominated(e, r)
    return [FrontierPoint(b, g, float(ei), float(ri), bool(k)) for (b, g), ei, ri, k in zip(grid, e, r, mask)]


def collinearity_check(problem: PortfolioProblem, points: Sequence[FrontierPoint], tol: float = 1e-6) -> CheckReport:
    """Efficient spectral points lie on the ray from ``(rho(x0), x0)`` through the tangency portfolio.

    Only points whose risk the tangency ray reaches inside the grid are
    tested; beyond it a finite grid can leave off-ray points undominated.
    """
    t = spectral_tangency(problem)
    r_t = _excess_risk(problem, t.gamma)
    e_t = _excess_mean(problem, t.gamma)
    on_ray = [pt for pt in points if math.isclose(pt.gamma, t.gamma, abs_tol=1e-9)]
    reach = max((pt.risk for pt in on_ray), default=-problem.x0)
    n = 0
    worst = 0.0
    for pt in points:
        if not pt.efficient or pt.risk > reach + tol:
            continue
        n += 1
        # Mean on the ray at this risk level.
        line = problem.x0 + (pt.risk + problem.x0) * e_t / r_t
        dev = abs(pt.expected_return - line)
        worst = max(worst, dev)
        if dev > tol:
            return CheckReport("efficient points are collinear with the tangency ray", False, tolerance=tol,
                               checked=n, witness={"point": pt.to_dict(), "ray_mean": line, "deviation": dev})
    return CheckReport("efficient points are collinear with the tangency ray", True, tolerance=tol, checked=n,
                       details={"gamma_tangency": t.gamma, "max_deviation": worst})


def mv_frontier_check(problem: PortfolioProblem, points: Sequence[FrontierPoint], tol: float = 1e-9) -> CheckReport:
    """Grid variances respect the two-fund bound ``(E - x0)^2 / H`` and tangency points attain it."""
    w = _excess_weights(problem)
    h = float((problem.means - problem.x0) @ w)
    g_t = mv_tangency(problem)
    for n, pt in enumerate(points, start=1):
        bound = (pt.expected_return - problem.x0) ** 2 / h
        scale = max(1.0, abs(bound))
        attains = math.isclose(pt.gamma, g_t, abs_tol=1e-12)
        if pt.risk < bound - tol * scale or (attains and abs(pt.risk - bound) > tol * scale):
            return CheckReport("grid matches the two-fund frontier", False, tolerance=tol, checked=n,
                               witness={"point": pt.to_dict(), "bound": bound})
    return CheckReport("grid matches the two-fund frontier", True, tolerance=tol, checked=len(points))


def beta_affinity(problem: PortfolioProblem, gamma: float, betas: Sequence[float] = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)) -> float:
    """Max residual of a straight-line fit of ``beta -> rho(X_{beta,gamma})``."""
    b = np.asarray(betas, float)
    r = np.array([problem.spectral_risk(float(k), gamma) for k in b])
    design = np.column_stack([b, np.ones_like(b)])
    coef, *_ = np.linalg.lstsq(design, r, rcond=None)
    return float(np.max(np.abs(design @ coef - r)))


def corner_sweep(problem: PortfolioProblem, lambdas: Sequence[float]) -> list[SpectralSolution]:
    """Trade-off verdicts over a range of weights, sharing one tangency search."""
    t = spectral_tangency(problem.replace(objective="spectral_tradeoff", lam=0.0, mu_target=None))
    return [spectral_tradeoff_solution(problem.replace(objective="spectral_tradeoff", lam=float(k)), t) for k in lambdas]


def nonequivalence_witness(
    problem: PortfolioProblem,
    lambdas: Sequence[float] = tuple(np.linspace(0.05, 0.95, 19)),
    targets: Sequence[float] | None = None,
) -> CheckReport:
    """Search for a parameter one analysis cannot match in the other.

    First a weight whose corner verdict no limited solution on the target
    grid reproduces; failing that, a target whose limited solution has a
    risky share strictly between the corners, which no weight produces.
    """
    base = problem.replace(objective="spectral_tradeoff", lam=0.0, mu_target=None)
    t = spectral_tangency(base)
    e_t = problem.expected_return(1.0, t.gamma)
    if targets is None:
        hi = e_t if not problem.short_sales else problem.x0 + 4.0 * (e_t - problem.x0)
        targets = tuple(np.linspace(problem.x0, hi, 9)[1:])
    limited = []
    for mu in targets:
        try:
            sol = spectral_limited_solution(problem.replace(objective="spectral_limited", lam=None, mu_target=float(mu)))
        except UnsatisfiableError:
            continue
        limited.append((float(mu), sol))
    betas = [s.beta for _, s in limited]
    verdicts = [spectral_tradeoff_solution(base.replace(lam=float(lam)), t) for lam in lambdas]
    corner_betas = sorted({v.beta for v in verdicts})
    claim = "limited and trade-off mean-spectral analyses are equivalent"
    common = {"targets": [m for m, _ in limited], "limited_betas": betas,
              "lambdas": list(map(float, lambdas)), "tradeoff_betas": [v.corner.value for v in verdicts],
              "gamma_tangency": t.gamma, "ratio": t.ratio}
    n = 0
    for lam, sol in zip(lambdas, verdicts):
        n += 1
        if sol.corner is Corner.ZERO:
            continue
        if all(not math.isclose(b, sol.beta, rel_tol=1e-9, abs_tol=1e-9) for b in betas):
            return CheckReport(claim, False, expect="witness", checked=n, witness=dict(
                common, direction="tradeoff_not_limited", lam=float(lam), tradeoff_beta=sol.corner.value,
                threshold=sol.threshold))
    for mu, sol in limited:
        n += 1
        if all(not math.isclose(sol.beta, b, rel_tol=1e-9, abs_tol=1e-9) for b in corner_betas):
            return CheckReport(claim, False, expect="witness", checked=n, witness=dict(
                common, direction="limited_not_tradeoff", mu_target=mu, limited_beta=sol.beta,
                limited_gamma=sol.gamma))
    return CheckReport(claim, True, expect="witness", checked=n)


def random_problem(
    rng: np.random.Generator,
    objective: str = "mv_tradeoff",
    n_states: int = 5,
    lam: float | None = None,
    phi=None,
    short_sales: bool = True,
    mu_target: float | None = None,
) -> PortfolioProblem:
    """Random nondegenerate problem with ``x0`` below the minimum-variance mean."""
    from .sampling import random_table

    for _ in range(1000):
        table = random_table(rng, n_states=n_states, n_assets=2, scale=10.0)
        probe = PortfolioProblem(table, 0.0, "mv_tradeoff", lam=1.0) if _spread(table) else None
        if probe is None:
            continue
        try:
            w = np.linalg.solve(probe.covariance, np.ones(2))
        except np.linalg.LinAlgError:
            continue
        c = probe.covariance
        if c[0, 0] * c[1, 1] - c[0, 1] ** 2 <= 1e-6:
            continue
        mvp_mean = float(probe.means @ w / w.sum())
        x0 = mvp_mean - float(rng.uniform(0.5, 3.0))
        kw = {"lam": lam} if objective.endswith("tradeoff") else {"mu_target": mu_target}
        if objective.endswith("tradeoff") and lam is None:
            kw["lam"] = float(rng.uniform(0.2, 5.0)) if objective.startswith("mv") else float(rng.uniform(0.0, 0.9))
        if not objective.endswith("tradeoff") and mu_target is None:
            kw["mu_target"] = x0 + float(rng.uniform(0.1, 2.0))
        problem = PortfolioProblem(table, x0, objective, phi=phi, short_sales=short_sales, **kw)
        if objective.startswith("spectral"):
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("error")
                    spectral_tangency(problem)
            except (DegenerateProblem, RuntimeWarning):
                continue
        return problem
    raise DegenerateProblem("could not draw a nondegenerate problem")


def _spread(table: ScenarioTable) -> bool:
    d = table.column(0) - table.column(1)
    return bool(np.ptp(d) > 1e-6)
