"""Conditional risk measures on finite filtration trees.

A tree of depth ``T <= 3`` carries transition probabilities on its edges
and payoffs on its leaves.  Level ``t`` nodes are the atoms of ``F_t``; a
conditional measure assigns one value per level-``t`` node.  Conditional
versions of static measures apply the measure to the conditional law of the
payoff on each node's descendant leaves.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .distributions import DiscretePosition
from .errors import DomainError, InvariantViolation
from .measures import avar, entropic_measure, neg_expectation, var
from .reports import CheckReport
from .sampling import random_probs, rng_from

MAX_DEPTH = 3
TOWER_TOL = 1e-9


@dataclass(frozen=True)
class Node:
    depth: int
    parent: int
    prob: float
    start: int
    stop: int


@dataclass(frozen=True)
class FiltrationTree:
    """Finite rooted tree; leaves are stored in depth-first order.

    ``nodes[0]`` is the root.  Each node covers the contiguous leaf range
    ``[start, stop)``.  ``payoffs`` maps a position name to its leaf vector.
    """

    nodes: tuple[Node, ...]
    levels: tuple[tuple[int, ...], ...]
    leaf_probs: np.ndarray
    payoffs: dict

    @property
    def horizon(self) -> int:
        return len(self.levels) - 1

    @property
    def n_leaves(self) -> int:
        return self.leaf_probs.size

    @classmethod
    def from_dict(cls, spec: dict) -> FiltrationTree:
        """Build from ``{"children": [{"prob": p, ...}], "payoffs": {...}}``."""
        nodes: list[Node] = []
        levels: list[list[int]] = []
        leaf_probs: list[float] = []
        leaf_payoffs: list[dict] = []
        leaf_depths: list[int] = []

        def visit(node: dict, depth: int, parent: int, prob: float, path_prob: float) -> None:
            if depth > MAX_DEPTH:
                raise InvariantViolation(f"tree deeper than {MAX_DEPTH}")
            idx = len(nodes)
            nodes.append(Node(depth, parent, prob, len(leaf_probs), -1))
            while len(levels) <= depth:
                levels.append([])
            levels[depth].append(idx)
            children = node.get("children") or []
            if children:
                probs = [float(c.get("prob", float("nan"))) for c in children]
                if any(not (p > 0.0) for p in probs):
                    raise InvariantViolation("transition probabilities must be strictly positive")
                if abs(math.fsum(probs) - 1.0) > 1e-9:
                    raise InvariantViolation(f"transition probabilities sum to {math.fsum(probs)!r}")
                total = math.fsum(probs)
                for c, p in zip(children, probs):
                    visit(c, depth + 1, idx, p / total, path_prob * p / total)
            else:
                leaf_probs.append(path_prob)
                leaf_depths.append(depth)
                leaf_payoffs.append(dict(node.get("payoffs", {})))
            nodes[idx] = Node(depth, parent, prob, nodes[idx].start, len(leaf_probs))

        visit(spec, 0, -1, 1.0, 1.0)
        depth = len(levels) - 1
        if depth < 1:
            raise InvariantViolation("a filtration tree needs at least one period")
        if any(d != depth for d in leaf_depths):
            raise InvariantViolation("every leaf must sit at the final level")
        names = sorted({k for d in leaf_payoffs for k in d})
        payoffs = {}
        for name in names:
            if any(name not in d for d in leaf_payoffs):
                raise InvariantViolation(f"payoff {name!r} missing on some leaf")
            payoffs[name] = np.array([float(d[name]) for d in leaf_payoffs])
        lp = np.array(leaf_probs)
        return cls(tuple(nodes), tuple(tuple(lv) for lv in levels), lp / lp.sum(), payoffs)

    @classmethod
    def uniform(cls, branching: Sequence[int], payoffs: dict | None = None) -> FiltrationTree:
        """Tree with equal transition probabilities and the given branching per level."""
        return random_tree(None, branching, payoffs=payoffs, equal=True)

    def node_law(self, node: int, x: np.ndarray) -> DiscretePosition:
        nd = self.nodes[node]
        sl = slice(nd.start, nd.stop)
        w = self.leaf_probs[sl]
        return DiscretePosition(np.asarray(x, dtype=float)[sl], w / w.sum())

    def lift(self, t: int, values: np.ndarray) -> np.ndarray:
        """Leaf vector constant on each level-``t`` node's leaves."""
        out = np.empty(self.n_leaves)
        for node, v in zip(self.levels[t], values):
            nd = self.nodes[node]
            out[nd.start:nd.stop] = v
        return out

    def position(self, name: str) -> np.ndarray:
        return self.payoffs[name]

    def to_dict(self) -> dict:
        def build(i: int) -> dict:
            kids = [j for j in range(len(self.nodes)) if self.nodes[j].parent == i]
            if not kids:
                leaf = self.nodes[i].start
                return {"payoffs": {k: float(v[leaf]) for k, v in self.payoffs.items()}}
            return {"children": [dict(prob=self.nodes[j].prob, **build(j)) for j in kids]}

        return build(0)


def random_tree(rng, branching: Sequence[int], payoffs: dict | None = None, equal: bool = False) -> FiltrationTree:
    """Tree with the given branching per level and random or equal transitions."""

    def build(depth: int) -> dict:
        if depth == len(branching):
            return {}
        k = int(branching[depth])
        probs = np.full(k, 1.0 / k) if equal else random_probs(rng, k)
        return {"children": [dict(prob=float(p), **build(depth + 1)) for p in probs]}

    tree = FiltrationTree.from_dict(build(0))
    if payoffs:
        tree = FiltrationTree(tree.nodes, tree.levels, tree.leaf_probs, {k: np.asarray(v, float) for k, v in payoffs.items()})
    return tree


@dataclass(frozen=True)
class ConditionalAssessment:
    """One value per level-``t`` node: an ``F_t``-measurable variable."""

    t: int
    values: np.ndarray

    def to_dict(self) -> dict:
        return {"t": self.t, "values": self.values.tolist()}


@dataclass(frozen=True)
class DynamicFamily:
    """Conditional measures ``rho_t`` obtained by applying ``static`` nodewise."""

    name: str
    static: Callable[[DiscretePosition], float]
    comonotonic_additive: bool = False

    @classmethod
    def entropic(cls, beta: float) -> DynamicFamily:
        return cls(f"entropic({beta})", lambda x: entropic_measure(x, beta))

    @classmethod
    def avar(cls, p: float) -> DynamicFamily:
        return cls(f"avar({p})", lambda x: avar(x, p), True)

    @classmethod
    def var(cls, p: float) -> DynamicFamily:
        return cls(f"var({p})", lambda x: var(x, p), True)

    @classmethod
    def expectation(cls) -> DynamicFamily:
        return cls("expected_loss", neg_expectation, True)

    def at(self, tree: FiltrationTree, t: int, x: np.ndarray) -> ConditionalAssessment:
        if not (0 <= t <= tree.horizon):
            raise DomainError(f"level {t} outside 0..{tree.horizon}")
        x = np.asarray(x, dtype=float)
        if t == tree.horizon:
            return ConditionalAssessment(t, -x.copy())
        vals = np.array([self.static(tree.node_law(n, x)) for n in tree.levels[t]])
        return ConditionalAssessment(t, vals)

    def to_spec(self) -> dict:
        return {"family": self.name}


def conditional_entropic(tree: FiltrationTree, beta: float, t: int, x: np.ndarray) -> ConditionalAssessment:
    """``(1/beta) ln E[exp(-beta X) | F_t]`` on each level-``t`` node."""
    if not beta > 0.0:
        raise DomainError("entropic rate must be positive")
    return DynamicFamily.entropic(beta).at(tree, t, x)


def conditional_avar(tree: FiltrationTree, p: float, t: int, x: np.ndarray) -> ConditionalAssessment:
    """AVaR of the conditional law on each level-``t`` node."""
    if not (0.0 < p <= 1.0):
        raise DomainError("conditional AVaR level must lie in (0, 1]")
    return DynamicFamily.avar(p).at(tree, t, x)


def tower_gap(tree: FiltrationTree, family: DynamicFamily, t: int, x: np.ndarray) -> np.ndarray:
    """Nodewise ``rho_t(X) - rho_t(-rho_{t+1}(X))``."""
    nxt = family.at(tree, t + 1, x)
    lifted = -tree.lift(t + 1, nxt.values)
    return family.at(tree, t, x).values - family.at(tree, t, lifted).values


def check_time_consistency(
    tree: FiltrationTree,
    family: DynamicFamily,
    positions: Sequence[np.ndarray],
    tol: float = TOWER_TOL,
    pairs: Sequence[tuple[np.ndarray, np.ndarray]] = (),
) -> CheckReport:
    """Tower identity at every level and the ordering form on ``pairs``."""
    claim = f"{family.name} is time consistent"
    worst = 0.0
    n = 0
    for x in positions:
        for t in range(tree.horizon):
            n += 1
            gap = tower_gap(tree, family, t, x)
            g = float(np.max(np.abs(gap)))
            worst = max(worst, g)
            if g > tol:
                return CheckReport(claim, False, tolerance=tol, checked=n,
                                   witness={"t": t, "x": x, "gap": gap, "tree": tree.to_dict()})
    for x, y in pairs:
        for t in range(tree.horizon):
            n += 1
            nx, ny = family.at(tree, t + 1, x).values, family.at(tree, t + 1, y).values
            if np.all(nx >= ny - tol):
                cx, cy = family.at(tree, t, x).values, family.at(tree, t, y).values
                if np.any(cx < cy - tol):
                    return CheckReport(claim, False, tolerance=tol, checked=n,
                                       witness={"t": t, "x": x, "y": y, "rho_x": cx, "rho_y": cy})
    return CheckReport(claim, True, tolerance=tol, checked=n, details={"max_gap": worst})


def _comonotone_partner(rng: np.random.Generator, x: np.ndarray) -> np.ndarray:
    levels = np.unique(x)
    mapped = np.sort(rng.integers(-5, 6, size=levels.size)).astype(float)
    return mapped[np.searchsorted(levels, x)]


COND_AXIOMS = ("cash_additivity", "monotonicity", "normalization", "conditional_comonotonicity")


def conditional_axiom_check(
    tree: FiltrationTree,
    family: DynamicFamily,
    axiom: str,
    trials: int = 100,
    seed: int = 0,
    tol: float = TOWER_TOL,
) -> CheckReport:
    """Nodewise check of one conditional axiom at every level ``t < T``."""
    if axiom not in COND_AXIOMS:
        raise DomainError(f"unknown conditional axiom {axiom!r}")
    rng = rng_from(seed)
    claim = f"{family.name} satisfies conditional {axiom}"
    n_leaves = tree.n_leaves
    for n in range(1, trials + 1):
        x = rng.integers(-5, 6, size=n_leaves).astype(float)
        for t in range(tree.horizon):
            rx = family.at(tree, t, x).values
            if axiom == "normalization":
                r0 = family.at(tree, t, np.zeros(n_leaves)).values
                if np.any(np.abs(r0) > tol):
                    return CheckReport(claim, False, tolerance=tol, checked=n, witness={"t": t, "rho_zero": r0})
            elif axiom == "cash_additivity":
                z = rng.uniform(-10, 10, size=len(tree.levels[t]))
                shifted = family.at(tree, t, x + tree.lift(t, z)).values
                if np.any(np.abs(shifted - (rx - z)) > tol):
                    return CheckReport(claim, False, tolerance=tol, checked=n,
                                       witness={"t": t, "x": x, "z": z, "rho_x": rx, "rho_shifted": shifted})
            elif axiom == "monotonicity":
                y = x + rng.integers(0, 4, size=n_leaves)
                ry = family.at(tree, t, y).values
                if np.any(ry > rx + tol):
                    return CheckReport(claim, False, tolerance=tol, checked=n,
                                       witness={"t": t, "x": x, "y": y, "rho_x": rx, "rho_y": ry})
            else:
                y = _comonotone_partner(rng, x)
                ry = family.at(tree, t, y).values
                rs = family.at(tree, t, x + y).values
                if np.any(np.abs(rs - rx - ry) > tol):
                    return CheckReport(claim, False, tolerance=tol, checked=n,
                                       witness={"t": t, "x": x, "y": y, "rho_x": rx, "rho_y": ry, "rho_sum": rs})
    return CheckReport(claim, True, tolerance=tol, checked=trials)


def check_relevance(tree: FiltrationTree, family: DynamicFamily, epsilons=(1e-3, 1.0, 10.0)) -> CheckReport:
    """``rho_0(-eps 1_A) > 0`` for every single-leaf event ``A``."""
    claim = f"{family.name} is relevant"
    n = 0
    for leaf in range(tree.n_leaves):
        for eps in epsilons:
            n += 1
            x = np.zeros(tree.n_leaves)
            x[leaf] = -eps
            r = float(family.at(tree, 0, x).values[0])
            if not r > 0.0:
                return CheckReport(claim, False, checked=n,
                                   witness={"leaf": leaf, "leaf_prob": float(tree.leaf_probs[leaf]), "epsilon": eps, "rho_0": r})
    return CheckReport(claim, True, checked=n)


def tower_gap_search(family: DynamicFamily, values: Sequence[float] = tuple(range(-3, 4))) -> CheckReport:
    """Exhaustive search over leaf payoffs of the symmetric two-by-two tree.

    Returns the payoff vector with the largest root tower gap (first one in
    lexicographic order on ties).
    """
    tree = FiltrationTree.uniform((2, 2))
    best_gap, best_x = 0.0, None
    n = 0
    for combo in itertools.product(values, repeat=tree.n_leaves):
        n += 1
        x = np.array(combo, dtype=float)
        g = abs(float(tower_gap(tree, family, 0, x)[0]))
        if g > best_gap + 1e-12:
            best_gap, best_x = g, x
    claim = f"{family.name} is time consistent on the two-by-two tree"
    if best_x is None:
        return CheckReport(claim, True, expect="witness", tolerance=TOWER_TOL, checked=n)
    rho0 = float(family.at(tree, 0, best_x).values[0])
    rho1 = family.at(tree, 1, best_x).values
    nested = float(family.at(tree, 0, -tree.lift(1, rho1)).values[0])
    return CheckReport(
        claim,
        best_gap <= TOWER_TOL,
        expect="witness",
        tolerance=TOWER_TOL,
        checked=n,
        witness={"tree": tree.to_dict(), "x": best_x, "rho_0": rho0, "rho_1": rho1, "rho_0_nested": nested, "gap": best_gap},
    )
