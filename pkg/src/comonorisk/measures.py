"""Static risk measures on finite distributions, acceptance sets and axiom checks.

Sign convention: positions are payoffs (gains positive), a risk measure
returns the capital needed to make the position acceptable.  All
law-invariant measures are computed as exact finite sums over the step
quantile function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .comonotone import ScenarioTable, comonotonic_counterpart
from .distortions import (
    Distortion,
    KusuokaMeasure,
    SpectralDensity,
    check_concave,
    distortion_from_spec,
    spectral_from_distortion,
)
from .distributions import (
    DiscretePosition,
    _check_level,
    left_quantile,
    mean,
    quantile_integral,
    right_quantile,
)
from .errors import BracketError, DomainError, InvariantViolation
from .reports import CheckReport
from .sampling import random_position, random_table, rng_from

BISECT_TOL = 1e-10
ENTROPIC_HIGH = 1e8
ENTROPIC_LOW = 1e-8


# -- quantile-based measures -------------------------------------------------


def max_loss(pos: DiscretePosition) -> float:
    """``ML(X) = esssup(-X)``."""
    return -pos.essinf


def neg_expectation(pos: DiscretePosition) -> float:
    return -mean(pos)


def var(pos: DiscretePosition, p: float) -> float:
    """``VaR_p(X) = q_{-X}(1 - p) = -q_X^+(p)``."""
    p = _check_level(p)
    return left_quantile(-pos, 1.0 - p)


def avar(pos: DiscretePosition, p: float) -> float:
    """``AVaR_p(X) = (1/p) int_0^p VaR_q(X) dq``; ``p = 0`` gives maximum loss."""
    p = _check_level(p)
    if p == 0.0:
        return max_loss(pos)
    return -quantile_integral(pos, 0.0, p) / p


def choquet(pos: DiscretePosition, h: Distortion) -> float:
    """Choquet integral of ``-X`` against the capacity ``h o P``.

    With ``X`` sorted as ``x_1 < ... < x_n`` and cumulative probabilities
    ``c_j``, the survival function of ``-X`` is a step function and the
    integral reduces to ``-x_n + sum_j h(c_j) (x_{j+1} - x_j)``.
    """
    x = pos.values
    if x.size == 1:
        return -float(x[0])
    weights = np.asarray(h(pos.cumulative[:-1]))
    return -float(x[-1]) + math.fsum(weights * np.diff(x))


def _distorted_survival_integral(pos: DiscretePosition, h: Distortion, lo: float, hi: float, shift: float) -> float:
    """``int_lo^hi (h(P(-X > y)) - shift) dy`` for finite ``lo <= hi``."""
    if hi <= lo:
        return 0.0
    y = (-pos).values
    surv = 1.0 - (-pos).cumulative
    edges = np.concatenate(([-np.inf], y, [np.inf]))
    levels = np.concatenate(([1.0], surv))
    levels[-1] = 0.0
    hv = np.asarray(h(np.clip(levels, 0.0, 1.0))) - shift
    lengths = np.clip(np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo), 0.0, None)
    return math.fsum(hv * lengths)


def choquet_monetary(pos: DiscretePosition, h: Distortion) -> float:
    """Choquet risk through the levels where ``h`` leaves 0 and reaches 1.

    With ``t_s = sup{h = 0}``, ``t_i = inf{h = 1}``, ``a = q_{-X}(1 - t_i)``
    and ``b = q_{-X}(1 - t_s)`` the integral equals
    ``max(0,a) + min(0,b) + int_{min(0,a)}^{min(0,b)} (h o S - 1)
    + int_{max(0,a)}^{max(0,b)} h o S``.  Used as an independent cross-check
    of :func:`choquet`; at ties between atoms and ``t_s`` the two can differ
    when ``h(t_s) > 0``.
    """
    t_s, t_i = h.zero_one_levels()
    neg = -pos
    a = left_quantile(neg, 1.0 - t_i)
    b = left_quantile(neg, 1.0 - t_s)
    return (
        max(0.0, a)
        + min(0.0, b)
        + _distorted_survival_integral(pos, h, min(0.0, a), min(0.0, b), 1.0)
        + _distorted_survival_integral(pos, h, max(0.0, a), max(0.0, b), 0.0)
    )


def kusuoka_mix(pos: DiscretePosition, mu: KusuokaMeasure) -> float:
    """``int AVaR_t(X) mu(dt)`` for a finitely supported ``mu``."""
    return math.fsum(w * avar(pos, p) for p, w in mu.atoms)


def spectral(pos: DiscretePosition, phi: SpectralDensity) -> float:
    """``h(0+) ML(X) - int_0^1 q_X(t) phi(t) dt`` as an exact step sum."""
    c = np.concatenate(([0.0], pos.cumulative))
    big_phi = np.asarray(phi.cumulative(c))
    big_phi[0] = 0.0
    body = -math.fsum(pos.values * np.diff(big_phi))
    if phi.atom_at_zero:
        body += phi.atom_at_zero * max_loss(pos)
    return body


# -- expectiles, entropic and shortfall ---------------------------------------


def _expectile_gap(v: np.ndarray, p: np.ndarray, tau: float, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = v[None, :] - x[:, None]
    up = (np.maximum(d, 0.0) * p).sum(axis=1)
    down = (np.maximum(-d, 0.0) * p).sum(axis=1)
    return tau * up - (1.0 - tau) * down


def expectile(pos: DiscretePosition, tau: float) -> float:
    """The ``tau``-expectile ``mu_tau(X)``.

    ``G(x) = tau E[(X-x)^+] - (1-tau) E[(x-X)^+]`` is strictly decreasing
    and linear between atoms, so the root is found exactly by locating the
    sign change on the atom grid and solving the linear piece.
    """
    if not (0.0 < tau < 1.0):
        raise DomainError(f"expectile level must lie in (0, 1), got {tau!r}")
    v, p = pos.values, pos.probs
    if v.size == 1:
        return float(v[0])
    g = _expectile_gap(v, p, tau, v)
    k = int(np.searchsorted(-g, 0.0, side="left"))
    if k < v.size and g[k] == 0.0:
        return float(v[k])
    k = min(max(k, 1), v.size - 1)
    lo, hi = v[k - 1], v[k]
    glo, ghi = g[k - 1], g[k]
    return float(lo + glo * (hi - lo) / (glo - ghi))


def expectile_measure(pos: DiscretePosition, tau: float) -> float:
    """Risk ``-mu_tau(X)``."""
    return -expectile(pos, tau)


def entropic_measure(pos: DiscretePosition, beta: float) -> float:
    """``(1/beta) ln E[exp(-beta X)]``, evaluated with log-sum-exp."""
    beta = float(beta)
    if not beta > 0.0:
        raise DomainError(f"entropic rate must be positive, got {beta!r}")
    if beta > ENTROPIC_HIGH:
        return max_loss(pos)
    if beta < ENTROPIC_LOW:
        return neg_expectation(pos)
    return float(logsumexp(-beta * pos.values, b=pos.probs)) / beta


@dataclass(frozen=True)
class LossFunction:
    """Nondecreasing, non-constant loss ``l`` on ``[0, inf)``.

    Kinds: ``exponential`` with ``l(x) = exp(beta x)``, ``expectile_loss``
    with ``l(x) = lam * x**2`` (squared shortfall) and ``piecewise`` with
    linear interpolation between ``knots`` and a flat extension beyond the
    last knot.
    """

    kind: str
    param: float = 1.0
    knots: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in ("exponential", "expectile_loss", "piecewise"):
            raise DomainError(f"unknown loss kind {self.kind!r}")
        if self.kind != "piecewise" and not self.param > 0.0:
            raise DomainError("loss parameter must be positive")
        if self.kind == "piecewise":
            ks = sorted((float(a), float(b)) for a, b in self.knots)
            if len(ks) < 2 or ks[0][0] != 0.0:
                raise DomainError("piecewise loss needs knots starting at x=0")
            vals = [b for _, b in ks]
            if any(b2 < b1 for b1, b2 in zip(vals, vals[1:])) or vals[-1] == vals[0]:
                raise DomainError("loss must be nondecreasing and non-constant")
            object.__setattr__(self, "knots", tuple(ks))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "exponential":
            with np.errstate(over="ignore"):
                return np.exp(self.param * x)
        if self.kind == "expectile_loss":
            return self.param * x * x
        ks = np.array(self.knots)
        return np.interp(x, ks[:, 0], ks[:, 1])

    @property
    def at_zero(self) -> float:
        return float(self(0.0))

    @property
    def supremum(self) -> float:
        return float(self.knots[-1][1]) if self.kind == "piecewise" else math.inf

    def inverse(self, c: float) -> float:
        """Smallest ``x >= 0`` with ``l(x) >= c``."""
        if self.kind == "exponential":
            return max(math.log(c) / self.param, 0.0)
        if self.kind == "expectile_loss":
            return math.sqrt(max(c, 0.0) / self.param)
        ks = np.array(self.knots)
        return float(np.interp(c, ks[:, 1], ks[:, 0]))

    def to_spec(self) -> dict:
        if self.kind == "piecewise":
            return {"kind": self.kind, "knots": [list(k) for k in self.knots]}
        return {"kind": self.kind, "param": self.param}


def shortfall_measure(pos: DiscretePosition, loss: LossFunction, c: float, tol: float = BISECT_TOL) -> float:
    """``inf{m : E[l((X + m)^-)] <= c}`` by bisection on ``m``."""
    if not (loss.at_zero <= c < loss.supremum):
        raise DomainError(f"threshold {c!r} outside [l(0), sup l) = [{loss.at_zero}, {loss.supremum})")
    v, p = pos.values, pos.probs

    def expected_loss(m: float) -> float:
        return math.fsum(loss(np.maximum(-(v + m), 0.0)) * p)

    hi = -pos.essinf
    step = 1.0
    lo = -pos.esssup - step
    while expected_loss(lo) <= c:
        step *= 2.0
        lo = -pos.esssup - step
        if step > 1e12:
            raise BracketError("shortfall bracket did not close")
    if expected_loss(hi) > c:
        raise BracketError("upper shortfall bracket not acceptable")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if expected_loss(mid) <= c:
            hi = mid
        else:
            lo = mid
    return hi


# -- the measure object --------------------------------------------------------


MEASURE_KINDS = (
    "var",
    "avar",
    "choquet",
    "kusuoka",
    "spectral",
    "expectile",
    "entropic",
    "shortfall",
    "max_loss",
    "neg_expectation",
)


@dataclass(frozen=True)
class RiskMeasure:
    """A risk measure of a named kind with its parameters.

    Only the fields relevant to ``kind`` are used: ``level`` holds ``p``,
    ``tau`` or ``beta``; ``distortion``, ``kusuoka`` or ``density`` hold the
    representation objects; ``loss`` and ``threshold`` define shortfall risk.
    """

    kind: str
    level: float | None = None
    distortion: Distortion | None = None
    kusuoka: KusuokaMeasure | None = None
    density: SpectralDensity | None = None
    loss: LossFunction | None = None
    threshold: float | None = None

    def __post_init__(self):
        if self.kind not in MEASURE_KINDS:
            raise DomainError(f"unknown measure kind {self.kind!r}")
        need = {
            "var": "level",
            "avar": "level",
            "expectile": "level",
            "entropic": "level",
            "choquet": "distortion",
            "kusuoka": "kusuoka",
            "spectral": "density",
            "shortfall": "loss",
        }.get(self.kind)
        if need and getattr(self, need) is None:
            raise DomainError(f"{self.kind} measure needs {need}")
        if self.kind in ("var", "avar"):
            _check_level(self.level)
        if self.kind == "expectile" and not (0.0 < self.level < 1.0):
            raise DomainError("expectile level must lie in (0, 1)")
        if self.kind == "entropic" and not self.level > 0.0:
            raise DomainError("entropic rate must be positive")
        if self.kind == "shortfall" and self.threshold is None:
            raise DomainError("shortfall measure needs a threshold")

    @classmethod
    def var(cls, p: float) -> RiskMeasure:
        return cls("var", level=float(p))

    @classmethod
    def avar(cls, p: float) -> RiskMeasure:
        return cls("avar", level=float(p))

    @classmethod
    def choquet(cls, h: Distortion) -> RiskMeasure:
        return cls("choquet", distortion=h)

    @classmethod
    def kusuoka_mixture(cls, mu: KusuokaMeasure) -> RiskMeasure:
        return cls("kusuoka", kusuoka=mu)

    @classmethod
    def spectral(cls, phi: SpectralDensity | Distortion) -> RiskMeasure:
        if isinstance(phi, Distortion):
            phi = spectral_from_distortion(phi)
        return cls("spectral", density=phi)

    @classmethod
    def expectile(cls, tau: float) -> RiskMeasure:
        return cls("expectile", level=float(tau))

    @classmethod
    def entropic(cls, beta: float) -> RiskMeasure:
        return cls("entropic", level=float(beta))

    @classmethod
    def shortfall(cls, loss: LossFunction, c: float) -> RiskMeasure:
        return cls("shortfall", loss=loss, threshold=float(c))

    @classmethod
    def max_loss(cls) -> RiskMeasure:
        return cls("max_loss")

    @classmethod
    def neg_expectation(cls) -> RiskMeasure:
        return cls("neg_expectation")

    def __call__(self, pos: DiscretePosition) -> float:
        k = self.kind
        if k == "var":
            return var(pos, self.level)
        if k == "avar":
            return avar(pos, self.level)
        if k == "choquet":
            return choquet(pos, self.distortion)
        if k == "kusuoka":
            return kusuoka_mix(pos, self.kusuoka)
        if k == "spectral":
            return spectral(pos, self.density)
        if k == "expectile":
            return expectile_measure(pos, self.level)
        if k == "entropic":
            return entropic_measure(pos, self.level)
        if k == "shortfall":
            return shortfall_measure(pos, self.loss, self.threshold)
        if k == "max_loss":
            return max_loss(pos)
        return neg_expectation(pos)

    def of_states(self, values: np.ndarray, probs: np.ndarray) -> float:
        return self(DiscretePosition(values, probs))

    @property
    def is_comonotonic_additive(self) -> bool:
        return self.kind in ("var", "avar", "choquet", "kusuoka", "spectral", "max_loss", "neg_expectation")

    @property
    def is_coherent(self) -> bool:
        if self.kind == "choquet":
            return check_concave(self.distortion)
        return self.kind in ("avar", "kusuoka", "spectral", "max_loss", "neg_expectation") or (
            self.kind == "expectile" and self.level <= 0.5
        )

    def to_spec(self) -> dict:
        d: dict = {"measure": self.kind}
        if self.kind in ("var", "avar"):
            d["p"] = self.level
        elif self.kind == "expectile":
            d["tau"] = self.level
        elif self.kind == "entropic":
            d["beta"] = self.level
        elif self.kind == "choquet":
            d["distortion"] = self.distortion.to_spec()
        elif self.kind == "kusuoka":
            d["atoms"] = [list(a) for a in self.kusuoka.atoms]
        elif self.kind == "spectral":
            dens = self.density
            if dens.family is not None:
                d["distortion"] = dens.family.to_spec()
            else:
                d.update(atom=dens.atom_at_zero, breaks=list(dens.breaks), heights=list(dens.heights))
        elif self.kind == "shortfall":
            d["loss"] = self.loss.to_spec()
            d["c"] = self.threshold
        return d

    def __repr__(self) -> str:
        spec = self.to_spec()
        body = ", ".join(f"{k}={v}" for k, v in spec.items() if k != "measure")
        return f"{spec['measure']}({body})"


def loss_from_spec(spec: dict) -> LossFunction:
    kind = spec.get("kind")
    if kind == "piecewise":
        return LossFunction("piecewise", knots=tuple(tuple(k) for k in spec["knots"]))
    param = spec.get("param", spec.get("beta", spec.get("lam", 1.0)))
    return LossFunction(kind, float(param))


def measure_from_spec(spec: dict) -> RiskMeasure:
    """Build a measure from its JSON fragment, e.g. ``{"measure": "var", "p": 0.05}``."""
    if not isinstance(spec, dict) or "measure" not in spec:
        raise DomainError("measure spec must be an object with a 'measure' key")
    kind = spec["measure"]
    try:
        if kind in ("var", "avar"):
            return RiskMeasure(kind, level=float(spec["p"]))
        if kind == "expectile":
            return RiskMeasure.expectile(float(spec["tau"]))
        if kind == "entropic":
            return RiskMeasure.entropic(float(spec["beta"]))
        if kind == "choquet":
            return RiskMeasure.choquet(distortion_from_spec(spec["distortion"]))
        if kind == "kusuoka":
            return RiskMeasure.kusuoka_mixture(KusuokaMeasure(tuple(tuple(a) for a in spec["atoms"])))
        if kind == "spectral":
            if "distortion" in spec:
                return RiskMeasure.spectral(distortion_from_spec(spec["distortion"]))
            return RiskMeasure.spectral(
                SpectralDensity.from_steps(spec["breaks"], spec["heights"], spec.get("atom", 0.0))
            )
        if kind == "shortfall":
            return RiskMeasure.shortfall(loss_from_spec(spec["loss"]), float(spec["c"]))
        if kind in ("max_loss", "neg_expectation"):
            return RiskMeasure(kind)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (DomainError, InvariantViolation)):
            raise
        raise DomainError(f"malformed measure spec {spec!r}: {exc}") from exc
    raise DomainError(f"unknown measure kind {kind!r}")


# -- acceptance sets -------------------------------------------------------------

Predicate = Callable[[np.ndarray, np.ndarray], bool]


@dataclass(frozen=True)
class AcceptanceSet:
    """Acceptance set given by a statewise predicate ``(values, probs) -> bool``.

    The declared properties are informational; ``inside`` and ``outside``
    are witness payoffs checked at construction so the set is non-empty and
    proper.
    """

    name: str
    predicate: Predicate
    monotone: bool = True
    cone: bool = False
    convex: bool = False
    normalized: bool = True
    inside: tuple[float, ...] = (1.0,)
    outside: tuple[float, ...] = (-1.0,)

    def __post_init__(self):
        if not self.accepts(np.array(self.inside), None):
            raise InvariantViolation(f"{self.name}: declared inside witness rejected")
        if self.accepts(np.array(self.outside), None):
            raise InvariantViolation(f"{self.name}: declared outside witness accepted")

    def accepts(self, values: np.ndarray, probs: np.ndarray | None) -> bool:
        values = np.asarray(values, dtype=float)
        if probs is None:
            probs = np.full(values.size, 1.0 / values.size)
        return bool(self.predicate(values, np.asarray(probs, dtype=float)))

    def contains(self, pos: DiscretePosition) -> bool:
        return self.accepts(pos.values, pos.probs)


def var_acceptance(p: float) -> AcceptanceSet:
    """``{X : P(X < 0) <= p}``."""
    p = _check_level(p)
    return AcceptanceSet(
        f"var({p})",
        lambda v, q: math.fsum(q[v < 0.0]) <= p + 1e-12,
        cone=True,
        inside=(1.0,),
        outside=(-1.0,),
    )


def nonneg_acceptance() -> AcceptanceSet:
    """``{X : X >= 0 a.s.}``."""
    return AcceptanceSet("nonneg", lambda v, q: bool(np.all(v >= 0.0)), cone=True, convex=True)


def mean_acceptance() -> AcceptanceSet:
    """``{X : E[X] >= 0}``."""
    return AcceptanceSet("mean", lambda v, q: math.fsum(v * q) >= 0.0, cone=True, convex=True)


def measure_acceptance(rho: RiskMeasure) -> AcceptanceSet:
    """``A_rho = {X : rho(X) <= 0}``."""
    big = 1e6
    return AcceptanceSet(
        f"A[{rho!r}]",
        lambda v, q: rho(DiscretePosition(v, q)) <= 0.0,
        convex=rho.is_coherent,
        cone=rho.is_coherent or rho.kind == "var",
        inside=(big,),
        outside=(-big,),
    )


def bisect_capital(accepts: Callable[[float], bool], lo: float, hi: float, tol: float = BISECT_TOL) -> float:
    """Smallest ``m`` in ``[lo, hi]`` with ``accepts(m)``, for monotone ``accepts``.

    The bracket is widened by doubling up to sixty times before giving up.
    """
    for _ in range(60):
        if accepts(hi):
            break
        hi = hi + 2.0 * (hi - lo)
    else:
        raise BracketError("no acceptable capital found; predicate not monotone in m?")
    for _ in range(60):
        if not accepts(lo):
            break
        lo = lo - 2.0 * (hi - lo)
    else:
        raise BracketError("every capital accepted; set not proper?")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if accepts(mid):
            hi = mid
        else:
            lo = mid
    return hi


def rho_from_acceptance(A: AcceptanceSet, pos: DiscretePosition, tol: float = BISECT_TOL) -> float:
    """``rho_A(X) = inf{m : X + m in A}`` by bisection on ``m``."""
    bound = pos.sup_norm + 1.0
    v, p = pos.values, pos.probs
    return bisect_capital(lambda m: A.accepts(v + m, p), -bound, bound, tol)


# -- axiom checks ----------------------------------------------------------------

AXIOMS = (
    "monotonicity",
    "cash_additivity",
    "positive_homogeneity",
    "subadditivity",
    "convexity",
    "normalization",
    "law_invariance",
    "comonotonic_additivity",
)


def _structured_pairs(rho: RiskMeasure):
    """Independent Bernoulli losses; the classic source of VaR non-subadditivity."""
    p = rho.level if rho.kind in ("var", "avar") and rho.level else 0.05
    for frac in (0.75, 0.9, 1.0, 0.5):
        q = min(frac * p, 0.49)
        if q <= 0.0:
            continue
        probs = np.array([q * q, q * (1 - q), (1 - q) * q, (1 - q) ** 2])
        x = np.array([-1.0, -1.0, 0.0, 0.0])
        y = np.array([-1.0, 0.0, -1.0, 0.0])
        yield ScenarioTable(probs, np.column_stack([x, y]))


def axiom_check(
    rho: RiskMeasure,
    axiom: str,
    trials: int = 200,
    rng_seed: int = 0,
    tol: float = 1e-8,
) -> CheckReport:
    """Randomized search for a violation of one axiom.

    Returns a passing report when no violation is found in ``trials``
    seeded draws, otherwise the first violating instance.
    """
    if axiom not in AXIOMS:
        raise DomainError(f"unknown axiom {axiom!r}; expected one of {AXIOMS}")
    rng = rng_from(rng_seed)
    claim = f"{rho!r} satisfies {axiom}"

    def fail(n: int, **w) -> CheckReport:
        return CheckReport(claim, False, tolerance=tol, checked=n, witness=w)

    if axiom == "normalization":
        val = rho(DiscretePosition.constant(0.0))
        if abs(val) > tol:
            return fail(1, rho_zero=val)
        return CheckReport(claim, True, tolerance=tol, checked=1)

    tables: list[ScenarioTable] = []
    if axiom in ("subadditivity", "convexity"):
        tables.extend(_structured_pairs(rho))
    for n in range(trials):
        if axiom == "comonotonic_additivity":
            m1 = random_position(rng, integer=bool(n % 2), scale=10.0 if n % 2 else 100.0)
            m2 = random_position(rng, integer=bool(n % 2), scale=10.0 if n % 2 else 100.0)
            tables.append(comonotonic_counterpart([m1, m2]))
        elif axiom == "law_invariance":
            t = random_table(rng, n_states=int(rng.integers(2, 8)), n_assets=1, equiprobable=True)
            perm = rng.permutation(t.n_states)
            tables.append(t.with_columns([t.column(0), t.column(0)[perm]]))
        else:
            integer = bool(n % 2)
            tables.append(
                random_table(rng, n_states=int(rng.integers(2, 7)), integer=integer, scale=10.0 if integer else 100.0)
            )

    for n, t in enumerate(tables, start=1):
        x, y, q = t.column(0), t.column(1), t.probs
        rx, ry = rho.of_states(x, q), rho.of_states(y, q)
        if axiom == "monotonicity":
            lo, hi = np.minimum(x, y), np.maximum(x, y)
            r_lo, r_hi = rho.of_states(lo, q), rho.of_states(hi, q)
            if r_hi > r_lo + tol:
                return fail(n, lower=lo, upper=hi, probs=q, rho_lower=r_lo, rho_upper=r_hi)
        elif axiom == "cash_additivity":
            b = float(rng.uniform(-50, 50))
            shifted = rho.of_states(x - b, q)
            if abs(shifted - (rx + b)) > tol:
                return fail(n, x=x, probs=q, b=b, rho_x=rx, rho_shifted=shifted)
        elif axiom == "positive_homogeneity":
            lam = float(rng.uniform(0.1, 5.0))
            scaled = rho.of_states(lam * x, q)
            if abs(scaled - lam * rx) > tol * max(1.0, abs(lam * rx)):
                return fail(n, x=x, probs=q, lam=lam, rho_x=rx, rho_scaled=scaled)
        elif axiom == "subadditivity":
            rs = rho.of_states(x + y, q)
            if rs > rx + ry + tol:
                return fail(n, x=x, y=y, probs=q, rho_x=rx, rho_y=ry, rho_sum=rs, gap=rs - rx - ry)
        elif axiom == "convexity":
            lam = float(rng.uniform(0.05, 0.95)) if n > 4 else 0.5
            rm = rho.of_states(lam * x + (1 - lam) * y, q)
            bound = lam * rx + (1 - lam) * ry
            if rm > bound + tol:
                return fail(n, x=x, y=y, probs=q, lam=lam, rho_mix=rm, bound=bound, gap=rm - bound)
        elif axiom == "law_invariance":
            if abs(rx - ry) > tol:
                return fail(n, x=x, y=y, probs=q, rho_x=rx, rho_y=ry)
        elif axiom == "comonotonic_additivity":
            rs = rho.of_states(x + y, q)
            if abs(rs - rx - ry) > tol:
                return fail(n, x=x, y=y, probs=q, rho_x=rx, rho_y=ry, rho_sum=rs, gap=rs - rx - ry)
    return CheckReport(claim, True, tolerance=tol, checked=len(tables))
