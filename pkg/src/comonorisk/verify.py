"""Seeded verification suites and the JSON report they produce.

Each suite returns a list of :class:`CheckReport`.  Claims expected to hold
carry ``expect="pass"``; impossibility results carry ``expect="witness"``
and succeed only when a counterexample is exhibited.  Reports contain no
timings or other run-dependent data, so equal seeds give identical bytes.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from typing import Callable

import numpy as np

from .comonotone import comonotonic_counterpart
from .distortions import Distortion, kusuoka_from_distortion, spectral_from_distortion
from .distributions import DiscretePosition, left_quantile, mean
from .dynamic import (
    DynamicFamily,
    FiltrationTree,
    check_relevance,
    check_time_consistency,
    conditional_axiom_check,
    random_tree,
    tower_gap_search,
)
from .elicitability import ScoreFunction, avar_levelset_search, consistency_check
from .eligible import (
    EligibleAsset,
    check_s_additivity,
    comonotonic_additivity_violation,
    leverage_slope,
    pointedness_check,
    s_var,
)
from .measures import (
    AXIOMS,
    RiskMeasure,
    axiom_check,
    choquet,
    expectile_measure,
    kusuoka_mix,
    mean_acceptance,
    spectral,
    var,
    var_acceptance,
)
from .portfolio import (
    Corner,
    beta_affinity,
    collinearity_check,
    corner_sweep,
    efficient_frontier,
    implied_target,
    mv_frontier_check,
    mv_limited_solution,
    mv_tangency,
    mv_tradeoff_solution,
    nonequivalence_witness,
    numeric_mv_tradeoff,
    random_problem,
    spectral_tangency,
)
from .preferences import ap_more_risk_averse, ordering_mismatch_search
from .reports import CheckReport, jsonable
from .sampling import (
    binary_distortions,
    distortion_zoo,
    interior_distortions,
    random_kusuoka,
    random_position,
    random_positions,
    rng_from,
)
from .surplus import (
    acceptance_surplus_check,
    avar_measure,
    is_si_plus,
    ml_is_si_plus,
    monotone_excess_conflict_demo,
    si_convex_counterexample,
    si_counterexample,
)

SCHEMA = 1
REPRESENTATION_TOL = 1e-10


def _witness(rep: CheckReport) -> CheckReport:
    return dataclasses.replace(rep, expect="witness")


def _sub(seed: int, k: int) -> int:
    """Deterministic per-check seed derived from the suite seed."""
    return int(np.random.SeedSequence([int(seed), k]).generate_state(1)[0])


# -- representation and axioms -------------------------------------------------


def representation_gap(x: DiscretePosition, h: Distortion) -> tuple[float, float]:
    """``|choquet - kusuoka_mix|`` and ``|choquet - spectral|`` for one position."""
    c = choquet(x, h)
    mu = kusuoka_from_distortion(h, grid=x.cumulative)
    return abs(c - kusuoka_mix(x, mu)), abs(c - spectral(x, spectral_from_distortion(h)))


def representation_check(seed: int, n_positions: int = 500, n_distortions: int = 20) -> CheckReport:
    rng = rng_from(seed)
    zoo = distortion_zoo(rng, n_distortions)
    positions = [random_position(rng, integer=bool(k % 2), scale=10.0 if k % 2 else 100.0) for k in range(n_positions)]
    worst = (0.0, 0.0)
    for h in zoo:
        for x in positions:
            gk, gs = representation_gap(x, h)
            worst = (max(worst[0], gk), max(worst[1], gs))
            if gk > REPRESENTATION_TOL or gs > REPRESENTATION_TOL:
                return CheckReport("Choquet, Kusuoka and spectral forms agree", False, tolerance=REPRESENTATION_TOL,
                                   witness={"position": x, "distortion": h, "kusuoka_gap": gk, "spectral_gap": gs})
    return CheckReport("Choquet, Kusuoka and spectral forms agree", True, tolerance=REPRESENTATION_TOL,
                       checked=len(zoo) * len(positions),
                       details={"max_kusuoka_gap": worst[0], "max_spectral_gap": worst[1]})


def expectation_check(positions) -> CheckReport:
    ident = Distortion.identity()
    worst = 0.0
    for n, x in enumerate(positions, start=1):
        gap = abs(choquet(x, ident) + mean(x))
        worst = max(worst, gap)
        if gap > 1e-12 * max(1.0, x.sup_norm):
            return CheckReport("identity distortion gives minus the mean", False, tolerance=1e-12, checked=n,
                               witness={"position": x, "gap": gap})
    return CheckReport("identity distortion gives minus the mean", True, tolerance=1e-12, checked=len(positions),
                       details={"max_gap": worst})


def comonotone_additivity_check(seed: int, n_pairs: int = 200, n_distortions: int = 20) -> CheckReport:
    rng = rng_from(seed)
    zoo = distortion_zoo(rng, n_distortions)
    claim = "Choquet measures are additive on comonotonic counterparts"
    for n in range(1, n_pairs + 1):
        m1 = random_position(rng, integer=bool(n % 2), scale=10.0)
        m2 = random_position(rng, integer=bool(n % 2), scale=10.0)
        t = comonotonic_counterpart([m1, m2])
        x, y = t.position(0), t.position(1)
        s = t.law_of(t.column(0) + t.column(1))
        for h in zoo:
            gap = choquet(s, h) - choquet(x, h) - choquet(y, h)
            if abs(gap) > 1e-10:
                return CheckReport(claim, False, tolerance=1e-10, checked=n,
                                   witness={"table": t, "distortion": h, "gap": gap})
    return CheckReport(claim, True, tolerance=1e-10, checked=n_pairs * len(zoo))


def axioms_suite(seed: int) -> list[CheckReport]:
    out = [
        representation_check(_sub(seed, 0), 200, 20),
        expectation_check(random_positions(_sub(seed, 1), 200, scale=100.0)),
        comonotone_additivity_check(_sub(seed, 2), 200),
    ]
    coherent = [
        RiskMeasure.avar(0.1),
        RiskMeasure.avar(0.5),
        RiskMeasure.choquet(Distortion.power(0.5)),
        RiskMeasure.spectral(Distortion.minvar(3)),
        RiskMeasure.max_loss(),
        RiskMeasure.neg_expectation(),
    ]
    for k, rho in enumerate(coherent):
        for j, ax in enumerate(AXIOMS):
            out.append(axiom_check(rho, ax, trials=100, rng_seed=_sub(seed, 100 + 10 * k + j)))
    v = RiskMeasure.var(0.05)
    for j, ax in enumerate(AXIOMS):
        rep = axiom_check(v, ax, trials=100, rng_seed=_sub(seed, 200 + j))
        out.append(_witness(rep) if ax in ("subadditivity", "convexity") else rep)
    for k, rho in enumerate((RiskMeasure.entropic(1.0), RiskMeasure.expectile(0.25))):
        out.append(_witness(axiom_check(rho, "comonotonic_additivity", trials=10_000, rng_seed=_sub(seed, 300 + k))))
        out.append(axiom_check(rho, "convexity", trials=100, rng_seed=_sub(seed, 310 + k)))
    return out


# -- surplus -------------------------------------------------------------------


def _si_witness_report(h: Distortion, min_gap: float = 0.1) -> CheckReport:
    w = si_counterexample(h)
    ok = w.rho_x >= -1e-12 and abs(w.gap) >= min_gap
    return CheckReport(f"{h!r} is SI+", not ok, expect="witness", tolerance=min_gap, checked=1,
                       witness=w.to_dict() if ok else None)


def surplus_suite(seed: int) -> list[CheckReport]:
    rng = rng_from(_sub(seed, 0))
    out = [_si_witness_report(h) for h in interior_distortions(rng, 20)]
    w = si_counterexample(Distortion.avar(0.5))
    target = (0.5, -0.5, 1.0)
    got = (w.rho_x, w.rho_positive_part, w.rho_negative_part)
    out.append(CheckReport("avar(0.5) witness has risks (0.5, -0.5, 1)",
                           all(abs(a - b) <= 1e-12 for a, b in zip(got, target)), tolerance=1e-12, checked=1,
                           details={"witness": w.to_dict()}))
    positions = random_positions(_sub(seed, 1), 1000, integer=True, scale=20.0)
    for h in binary_distortions(rng_from(_sub(seed, 2)), 20):
        out.append(is_si_plus(RiskMeasure.choquet(h), positions))
    out.append(ml_is_si_plus(positions))
    krng = rng_from(_sub(seed, 3))
    for _ in range(10):
        mu = random_kusuoka(krng, allow_zero=True)
        if all(p == 0.0 for p, _ in mu.atoms):
            continue
        cw = si_convex_counterexample(mu)
        ok = cw.rho_x >= -1e-12 and abs(cw.gap) > 1e-9
        out.append(CheckReport(f"Kusuoka mixture {mu.atoms} is SI+", not ok, expect="witness", checked=1,
                               witness=cw.to_dict() if ok else None))
    small = positions[:200]
    out.append(monotone_excess_conflict_demo(avar_measure(0.1), small))
    out.append(acceptance_surplus_check(var_acceptance(0.05), trials=200, seed=_sub(seed, 4)))
    out.append(_witness(acceptance_surplus_check(mean_acceptance(), trials=200, seed=_sub(seed, 5))))
    return out


# -- eligible assets -----------------------------------------------------------


def random_risky_asset(rng: np.random.Generator, p: float, n_states: int = 4) -> EligibleAsset:
    """Risky asset whose probability of beating its price exceeds ``p``."""
    for _ in range(1000):
        probs = rng.dirichlet(np.ones(n_states)) * 0.8 + 0.2 / n_states
        s1 = np.round(rng.uniform(0.5, 2.0, size=n_states), 3)
        s0 = float(np.round(rng.uniform(0.6, 1.5), 3))
        if np.ptp(s1) == 0.0:
            continue
        S = EligibleAsset(s0, s1, probs)
        if S.prob_outperform() > p and S.prob_outperform() < 1.0:
            return S
    raise RuntimeError("could not draw a risky eligible asset")


def eligible_suite(seed: int, n_assets: int = 10) -> list[CheckReport]:
    p = 0.05
    out = []
    positions = random_positions(_sub(seed, 0), 100, scale=20.0)
    worst = 0.0
    for x in positions:
        S = EligibleAsset.risk_free(x.probs)
        worst = max(worst, abs(s_var(x.values, S, p) - var(x, p)))
    out.append(CheckReport("S-VaR with a risk-free asset equals VaR", worst <= 1e-9, tolerance=1e-9,
                           checked=len(positions), details={"max_gap": worst}))
    rng = rng_from(_sub(seed, 1))
    for k in range(n_assets):
        S = random_risky_asset(rng, p)
        rep = comonotonic_additivity_violation(S, p, "var", budget=10_000, seed=_sub(seed, 10 + k), threshold=1e-4)
        out.append(rep)
        fit = leverage_slope(S, p)
        ok = fit["slope"] > 0.0 and fit["residual"] < 1e-8
        out.append(CheckReport(f"S-VaR of leveraged short positions grows affinely (asset {k})", ok, tolerance=1e-8,
                               checked=len(fit["lambdas"]), details=fit))
        out.append(pointedness_check(var_acceptance(p), S, trials=100, seed=_sub(seed, 30 + k)))
        x = rng.integers(-5, 6, size=S.n_states).astype(float)
        out.append(CheckReport(f"S-additivity of S-VaR (asset {k})",
                               check_s_additivity(var_acceptance(p), S, x, 1.5), checked=1))
    return out


# -- elicitability -------------------------------------------------------------


def _unique_quantile_positions(seed: int, p: float, count: int) -> list[DiscretePosition]:
    rng = rng_from(seed)
    out = []
    while len(out) < count:
        x = random_position(rng, integer=True, scale=20.0)
        if np.all(np.abs(x.cumulative[:-1] - p) > 1e-6):
            out.append(x)
    return out


def _named(f: Callable, name: str) -> Callable:
    f.__name__ = name
    return f


def elicitability_suite(seed: int) -> list[CheckReport]:
    out = []
    positions = random_positions(_sub(seed, 0), 200, scale=100.0)
    out.append(consistency_check(_named(lambda x: -mean(x), "neg_mean"), ScoreFunction.squared(), positions))
    for k, p in enumerate((0.05, 0.25, 0.5, 0.9)):
        fam = _unique_quantile_positions(_sub(seed, 10 + k), p, 100)
        out.append(consistency_check(_named(lambda x, p=p: -left_quantile(x, p), f"minus_quantile({p})"),
                                     ScoreFunction.pinball(p), fam))
    for tau in (0.1, 0.25, 0.5):
        out.append(consistency_check(_named(lambda x, t=tau: expectile_measure(x, t), f"expectile({tau})"),
                                     ScoreFunction.expectile(tau), positions[:100]))
    for p in (0.25, 0.5):
        out.append(avar_levelset_search(p))
    return out


# -- dynamic -------------------------------------------------------------------


def dynamic_suite(seed: int, n_trees: int = 100) -> list[CheckReport]:
    out = []
    rng = rng_from(_sub(seed, 0))
    entropic = DynamicFamily.entropic(0.5)
    worst = 0.0
    ok = True
    for k in range(n_trees):
        branching = (2, 3) if k % 2 else (2, 2, 2)
        tree = random_tree(rng, branching)
        xs = [rng.integers(-5, 6, size=tree.n_leaves).astype(float) for _ in range(3)]
        rep = check_time_consistency(tree, entropic, xs, tol=1e-10)
        worst = max(worst, rep.details.get("max_gap", math.inf) if rep.passed else math.inf)
        if not rep.passed:
            out.append(rep)
            ok = False
            break
    if ok:
        out.append(CheckReport("entropic family satisfies the tower identity", True, tolerance=1e-10,
                               checked=n_trees, details={"max_gap": worst}))
    gap = tower_gap_search(DynamicFamily.avar(0.5))
    if gap.witness is not None and gap.witness["gap"] <= 0.05:
        gap = dataclasses.replace(gap, passed=True, witness=None)
    out.append(gap)
    tree = random_tree(rng_from(_sub(seed, 1)), (2, 2))
    expectation = DynamicFamily.expectation()
    xs = [rng.integers(-5, 6, size=tree.n_leaves).astype(float) for _ in range(20)]
    out.append(check_time_consistency(tree, expectation, xs))
    for j, fam in enumerate((expectation, DynamicFamily.avar(0.5))):
        out.append(conditional_axiom_check(tree, fam, "conditional_comonotonicity", 50, _sub(seed, 20 + j)))
    out.append(_witness(conditional_axiom_check(tree, entropic, "conditional_comonotonicity", 50, _sub(seed, 30))))
    for ax in ("cash_additivity", "monotonicity", "normalization"):
        out.append(conditional_axiom_check(tree, entropic, ax, 50, _sub(seed, 40)))
    out.append(check_relevance(tree, entropic))
    skew = FiltrationTree.from_dict({"children": [
        {"prob": 0.5, "children": [{"prob": 0.98}, {"prob": 0.02}]},
        {"prob": 0.5, "children": [{"prob": 0.5}, {"prob": 0.5}]},
    ]})
    out.append(_witness(check_relevance(skew, DynamicFamily.var(0.05))))
    return out


# -- portfolio -----------------------------------------------------------------


def mv_oracle_check(seed: int, count: int = 100, tol: float = 1e-6) -> CheckReport:
    rng = rng_from(seed)
    worst = 0.0
    for n in range(1, count + 1):
        pr = random_problem(rng, "mv_tradeoff", short_sales=bool(n % 2))
        sol = mv_tradeoff_solution(pr)
        b, g = numeric_mv_tradeoff(pr)
        gap = max(abs(sol.beta - b), abs(sol.gamma - g))
        worst = max(worst, gap)
        if gap > tol:
            return CheckReport("mean-variance closed forms match the numeric optimizer", False, tolerance=tol,
                               checked=n, witness={"problem": pr.to_dict(), "closed": sol.to_dict(),
                                                   "numeric": {"beta": b, "gamma": g}})
    return CheckReport("mean-variance closed forms match the numeric optimizer", True, tolerance=tol,
                       checked=count, details={"max_gap": worst})


def mv_round_trip_check(seed: int, count: int = 50, tol: float = 1e-6) -> CheckReport:
    rng = rng_from(seed)
    worst = 0.0
    for n in range(1, count + 1):
        pr = random_problem(rng, "mv_tradeoff")
        trade = mv_tradeoff_solution(pr)
        lim = mv_limited_solution(pr.replace(objective="mv_limited", lam=None, mu_target=implied_target(pr)))
        gap = max(abs(trade.beta - lim.beta), abs(trade.gamma - lim.gamma))
        worst = max(worst, gap)
        if gap > tol:
            return CheckReport("limited analysis at mu(lam) reproduces the trade-off optimum", False,
                               tolerance=tol, checked=n, witness={"problem": pr.to_dict(), "gap": gap})
    return CheckReport("limited analysis at mu(lam) reproduces the trade-off optimum", True, tolerance=tol,
                       checked=count, details={"max_gap": worst})


def corner_check(seed: int, count: int = 20) -> CheckReport:
    """Verdicts are corners on the correct side of ``ratio`` vs ``lam/(1-lam)``.

    For each problem, weights just below and just above the boundary weight
    ``ratio/(1+ratio)`` are tested along with a coarse sweep.
    """
    rng = rng_from(seed)
    phis = (Distortion.avar(0.5), Distortion.avar(0.1), Distortion.power(0.5), Distortion.minvar(3))
    n = 0
    for k in range(count):
        short = bool(k % 2)
        pr = random_problem(rng, "spectral_tradeoff", phi=phis[k % len(phis)], lam=0.5, short_sales=short)
        t = spectral_tangency(pr)
        boundary = t.ratio / (1.0 + t.ratio) if t.ratio > 0 else 0.0
        lams = [x for x in (boundary - 1e-6, boundary + 1e-6) if 0.0 <= x <= 1.0]
        lams += list(np.linspace(0.0, 1.0, 11))
        allowed = {Corner.ZERO, Corner.UNBOUNDED} if short else {Corner.ZERO, Corner.FULL}
        for sol, lam in zip(corner_sweep(pr, lams), lams):
            n += 1
            expected = Corner.ZERO if t.ratio <= sol.threshold else (Corner.UNBOUNDED if short else Corner.FULL)
            if sol.corner not in allowed or sol.corner is not expected:
                return CheckReport("spectral trade-off verdicts are corners on the ratio side", False, checked=n,
                                   witness={"problem": pr.to_dict(), "lam": lam, "verdict": sol.to_dict()})
            beta = 10.0 if short else 1.0
            obj = pr.replace(lam=float(lam))
            slope = obj.objective_value(beta, t.gamma) - obj.objective_value(0.0, t.gamma)
            if lam < 1.0 and (slope > 1e-9) != (sol.corner is not Corner.ZERO) and abs(slope) > 1e-9:
                return CheckReport("spectral trade-off verdicts are corners on the ratio side", False, checked=n,
                                   witness={"problem": pr.to_dict(), "lam": lam, "objective_slope": slope})
    return CheckReport("spectral trade-off verdicts are corners on the ratio side", True, checked=n)


def portfolio_suite(seed: int) -> list[CheckReport]:
    out = [
        mv_oracle_check(_sub(seed, 0)),
        mv_round_trip_check(_sub(seed, 1)),
        corner_check(_sub(seed, 2)),
    ]
    phi = Distortion.avar(0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        fixed = random_problem(rng_from(2024), "spectral_tradeoff", phi=phi, lam=0.3)
        out.append(nonequivalence_witness(fixed))
        out.append(nonequivalence_witness(fixed.replace(short_sales=False)))
        t = spectral_tangency(fixed)
        res = beta_affinity(fixed, t.gamma)
        out.append(CheckReport("spectral risk is affine along beta-scaling", res < 1e-9, tolerance=1e-9, checked=6,
                               details={"residual": res}))
        pts = efficient_frontier(fixed, np.linspace(0.0, 5.0, 21), sorted(set(np.linspace(-2, 2, 17)) | {t.gamma}))
        out.append(collinearity_check(fixed, pts))
        mv = random_problem(rng_from(2025), "mv_tradeoff", lam=1.0)
        mpts = efficient_frontier(mv, np.linspace(0.0, 5.0, 21), sorted(set(np.linspace(-2, 2, 17)) | {mv_tangency(mv)}))
        out.append(mv_frontier_check(mv, mpts))
    return out


# -- preferences ---------------------------------------------------------------


def preferences_suite(seed: int) -> list[CheckReport]:
    pairs = [
        (Distortion.avar(0.1), Distortion.avar(0.5)),
        (Distortion.exp_family(20.0), Distortion.exp_family(3.0)),
        (Distortion.minvar(5), Distortion.minvar(2)),
    ]
    out = []
    sample = random_positions(_sub(seed, 0), 200, integer=True, scale=20.0)
    for a, b in pairs:
        out.append(ap_more_risk_averse(a, b, sample))
    out.extend(ordering_mismatch_search(pairs, seed=_sub(seed, 1)))
    return out


SUITES: dict[str, Callable[[int], list[CheckReport]]] = {
    "axioms": axioms_suite,
    "surplus": surplus_suite,
    "eligible": eligible_suite,
    "elicitability": elicitability_suite,
    "dynamic": dynamic_suite,
    "portfolio": portfolio_suite,
    "preferences": preferences_suite,
}


def run_suite(name: str, seed: int = 0) -> dict:
    """Run one suite (or ``"all"``) and return the report dictionary."""
    names = list(SUITES) if name == "all" else [name]
    for n in names:
        if n not in SUITES:
            raise KeyError(n)
    suites = {}
    for n in names:
        reports = SUITES[n](int(seed))
        suites[n] = {"ok": all(r.ok for r in reports), "claims": [r.to_dict() for r in reports]}
    return {"schema": SCHEMA, "suite": name, "seed": int(seed), "ok": all(s["ok"] for s in suites.values()),
            "suites": suites}


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2)
