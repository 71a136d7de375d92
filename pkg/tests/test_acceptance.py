"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints a single ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line (also collected into the terminal summary) before asserting.
"""

import math
import subprocess
import sys

import numpy as np

from comonorisk.comonotone import comonotonic_counterpart, is_comonotonic
from comonorisk.distortions import Distortion, KusuokaMeasure, kusuoka_from_distortion, spectral_from_distortion
from comonorisk.distributions import DiscretePosition, mean
from comonorisk.dynamic import (
    DynamicFamily,
    check_time_consistency,
    conditional_axiom_check,
    random_tree,
    tower_gap_search,
)
from comonorisk.elicitability import ScoreFunction, avar_levelset_search, minimize_score
from comonorisk.eligible import EligibleAsset, comonotonic_additivity_violation, leverage_slope, s_var
from comonorisk.measures import RiskMeasure, axiom_check, choquet, kusuoka_mix, max_loss, spectral, var
from comonorisk.portfolio import (
    Corner,
    corner_sweep,
    mv_tradeoff_solution,
    nonequivalence_witness,
    numeric_mv_tradeoff,
    random_problem,
    spectral_tangency,
)
from comonorisk.sampling import (
    binary_distortions,
    distortion_zoo,
    interior_distortions,
    random_position,
    random_positions,
    rng_from,
)
from comonorisk.surplus import is_si_plus, si_convex_counterexample, si_counterexample
from comonorisk.verify import random_risky_asset

from conftest import ACCEPTANCE_LINES

SEED = 7


def verdict(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_representation_equivalence():
    rng = rng_from(SEED)
    zoo = distortion_zoo(rng, 20)
    positions = [random_position(rng, integer=bool(k % 2), scale=10.0 if k % 2 else 100.0) for k in range(500)]
    worst_k = worst_s = 0.0
    for h in zoo:
        phi = spectral_from_distortion(h)
        for x in positions:
            c = choquet(x, h)
            mu = kusuoka_from_distortion(h, grid=x.cumulative)
            worst_k = max(worst_k, abs(c - kusuoka_mix(x, mu)))
            worst_s = max(worst_s, abs(c - spectral(x, phi)))
    ok = worst_k <= 1e-10 and worst_s <= 1e-10
    verdict(1, ok, f"500 positions x 20 distortions, max |choquet-kusuoka|={worst_k:.2e}, max |choquet-spectral|={worst_s:.2e} (tol 1e-10)")


def test_criterion_2_expectation_recovery():
    positions = random_positions(SEED, 1000, scale=100.0)
    ident = Distortion.identity()
    worst = max(abs(choquet(x, ident) + mean(x)) / max(1.0, x.sup_norm) for x in positions)
    verdict(2, worst <= 1e-12, f"identity distortion on 1000 positions, max scaled |choquet+mean|={worst:.2e} (tol 1e-12)")


def test_criterion_3_comonotonic_additivity():
    rng = rng_from(SEED + 3)
    zoo = distortion_zoo(rng, 20)
    worst = 0.0
    for _ in range(200):
        t = comonotonic_counterpart([random_position(rng, scale=10.0), random_position(rng, scale=10.0)])
        assert is_comonotonic(t, 0, 1)
        s = t.law_of(t.column(0) + t.column(1))
        for h in zoo:
            worst = max(worst, abs(choquet(s, h) - choquet(t.position(0), h) - choquet(t.position(1), h)))
    ent = axiom_check(RiskMeasure.entropic(1.0), "comonotonic_additivity", trials=10_000, rng_seed=SEED)
    exp = axiom_check(RiskMeasure.expectile(0.25), "comonotonic_additivity", trials=10_000, rng_seed=SEED)
    ok = worst <= 1e-10 and not ent.passed and not exp.passed and ent.witness and exp.witness
    verdict(3, bool(ok), f"200 counterparts max gap={worst:.2e} (tol 1e-10); entropic(1) witness after {ent.checked} trials, "
                         f"expectile(0.25) witness after {exp.checked} trials")


def test_criterion_4_si_plus_dichotomy():
    interior = interior_distortions(rng_from(SEED), 20)
    min_gap = math.inf
    for h in interior:
        w = si_counterexample(h)
        assert w.rho_x >= 0.0
        min_gap = min(min_gap, abs(w.rho_x - w.rho_negative_part))
    positions = random_positions(SEED + 4, 1000)
    binary_ok = all(is_si_plus(lambda x, h=h: choquet(x, h), positions).passed for h in binary_distortions(rng_from(SEED), 20))
    w = si_counterexample(Distortion.avar(0.5), 0.25)
    triple = (w.rho_x, w.rho_positive_part, w.rho_negative_part)
    exact = max(abs(a - b) for a, b in zip(triple, (0.5, -0.5, 1.0))) <= 1e-12
    exact = exact and w.position == DiscretePosition([-2, 1], [0.25, 0.75])
    ok = min_gap >= 0.1 and binary_ok and exact
    verdict(4, ok, f"20 interior witnesses min |rho(X)-rho(-X^-)|={min_gap:.3g} (>=0.1); 20 binary distortions SI+ on 1000 "
                   f"positions={binary_ok}; avar(0.5) triple={triple}")


def test_criterion_5_coherent_si_plus():
    positions = random_positions(SEED + 5, 1000)
    ml_ok = is_si_plus(max_loss, positions).passed
    rng = rng_from(SEED)
    mixtures = [KusuokaMeasure.point(0.5), KusuokaMeasure(((0.0, 0.5), (0.5, 0.5))), KusuokaMeasure.point(1.0)]
    while len(mixtures) < 20:
        k = int(rng.integers(1, 4))
        levels = np.sort(rng.choice(np.arange(0, 21) / 20, size=k + 1, replace=False))
        if levels[-1] == 0.0:
            continue
        w = rng.dirichlet(np.ones(levels.size))
        w[-1] = 1.0 - w[:-1].sum()
        mixtures.append(KusuokaMeasure(tuple(zip(levels.tolist(), w.tolist()))))
    witnesses = 0
    for mu in mixtures:
        wit = si_convex_counterexample(mu)
        if wit.rho_x >= 0.0 and wit.rho_positive_part < 0.0 and wit.rho_x != wit.rho_negative_part:
            witnesses += 1
    ok = ml_ok and witnesses == len(mixtures)
    verdict(5, ok, f"max loss SI+ on 1000 positions={ml_ok}; witnesses for {witnesses}/{len(mixtures)} mixtures with an atom above 0")


def test_criterion_6_eligible_assets():
    p = 0.05
    positions = random_positions(SEED + 6, 100, scale=20.0)
    worst = max(abs(s_var(x.values, EligibleAsset.risk_free(x.probs), p) - var(x, p)) for x in positions)
    rng = rng_from(SEED + 60)
    found = slopes = 0
    max_resid = 0.0
    for k in range(10):
        S = random_risky_asset(rng, p)
        assert S.prob_outperform() > p
        rep = comonotonic_additivity_violation(S, p, budget=10_000, seed=SEED + k, threshold=1e-4)
        if rep.witness is not None and abs(rep.witness["gap"]) > 1e-4:
            found += 1
        fit = leverage_slope(S, p)
        max_resid = max(max_resid, fit["residual"])
        slopes += fit["slope"] > 0.0 and fit["residual"] < 1e-8
    ok = worst <= 1e-9 and found == 10 and slopes == 10
    verdict(6, ok, f"risk-free S-VaR vs VaR max gap={worst:.2e} (tol 1e-9); violations found {found}/10; "
                   f"positive affine leverage slopes {slopes}/10 (max residual {max_resid:.1e})")


def test_criterion_7_elicitability():
    positions = random_positions(SEED + 7, 200, scale=100.0)
    sq = max(abs(minimize_score(x, ScoreFunction.squared()).rho + mean(x)) for x in positions)
    pin_ok = True
    checked = 0
    for p in (0.05, 0.25, 0.5, 0.9):
        rng = rng_from(SEED + int(100 * p))
        while checked < 50 * (1 + [0.05, 0.25, 0.5, 0.9].index(p)):
            x = random_position(rng, integer=True, scale=20.0)
            if np.any(np.abs(x.cumulative[:-1] - p) <= 1e-6):
                continue
            checked += 1
            pin_ok &= minimize_score(x, ScoreFunction.pinball(p)).rho == var(x, p)
    lvl = avar_levelset_search(0.5, threshold=1e-3)
    dev = abs(lvl.witness["deviation"]) if lvl.witness else 0.0
    ok = sq <= 1e-8 and pin_ok and dev > 1e-3
    verdict(7, ok, f"squared score max |rho+mean|={sq:.2e} on 200 positions; pinball = VaR on {checked} unique-quantile "
                   f"positions: {pin_ok}; equal-AVaR mixture shift={dev:.4g} (>1e-3)")


def test_criterion_8_time_consistency():
    rng = rng_from(SEED + 8)
    fam = DynamicFamily.entropic(0.5)
    worst = 0.0
    ok_ent = True
    for k in range(100):
        tree = random_tree(rng, (2, 3) if k % 2 else (2, 2, 2))
        xs = [rng.uniform(-10, 10, tree.n_leaves) for _ in range(3)]
        rep = check_time_consistency(tree, fam, xs, tol=1e-10)
        ok_ent &= rep.passed
        worst = max(worst, rep.details.get("max_gap", math.inf))
    gap = tower_gap_search(DynamicFamily.avar(0.5))
    g = gap.witness["gap"] if gap.witness else 0.0
    expect = DynamicFamily.expectation()
    tree = random_tree(rng, (2, 2))
    xs = [rng.integers(-5, 6, tree.n_leaves).astype(float) for _ in range(20)]
    e_tower = check_time_consistency(tree, expect, xs).passed and tower_gap_search(expect).passed
    e_como = conditional_axiom_check(tree, expect, "conditional_comonotonicity", 100, SEED).passed
    ok = ok_ent and g > 0.05 and e_tower and e_como
    verdict(8, ok, f"entropic tower on 100 trees (T=2,3) max gap={worst:.2e} (tol 1e-10); avar(0.5) tower gap={g:.4g} (>0.05); "
                   f"expected loss tower={e_tower}, conditional comonotonicity={e_como}")


def test_criterion_9_portfolio():
    rng = rng_from(SEED + 9)
    worst = 0.0
    for n in range(100):
        pr = random_problem(rng, "mv_tradeoff", short_sales=bool(n % 2))
        sol = mv_tradeoff_solution(pr)
        b, g = numeric_mv_tradeoff(pr)
        worst = max(worst, abs(sol.beta - b), abs(sol.gamma - g))
    corners_ok = True
    sides = 0
    for k in range(10):
        short = bool(k % 2)
        pr = random_problem(rng, "spectral_tradeoff", phi=Distortion.avar(0.5), lam=0.5, short_sales=short)
        t = spectral_tangency(pr)
        boundary = t.ratio / (1.0 + t.ratio)
        below, above = corner_sweep(pr, [boundary - 1e-6, boundary + 1e-6])
        top = Corner.UNBOUNDED if short else Corner.FULL
        corners_ok &= below.corner is top and above.corner is Corner.ZERO
        sides += 2
        for sol in corner_sweep(pr, np.linspace(0, 1, 11)):
            corners_ok &= sol.corner in (Corner.ZERO, top)
    fixed = random_problem(rng_from(2024), "spectral_tradeoff", phi=Distortion.avar(0.5), lam=0.3)
    neq = nonequivalence_witness(fixed)
    ok = worst <= 1e-6 and corners_ok and neq.ok
    verdict(9, ok, f"100 mean-variance problems max |closed-numeric|={worst:.2e} (tol 1e-6); corner verdicts on both sides "
                   f"of the ratio boundary ({sides} checks)={corners_ok}; non-equivalence witness "
                   f"({neq.witness['direction'] if neq.witness else 'none'})")


def test_criterion_10_determinism():
    cmd = [sys.executable, "-m", "comonorisk", "verify", "all", "--seed", "3"]
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    same = first.stdout == second.stdout and len(first.stdout) > 0
    verdict(10, same and first.returncode == 0,
            f"verify all --seed 3 twice: byte-identical={same}, {len(first.stdout)} bytes, exit codes {first.returncode}/{second.returncode}")
