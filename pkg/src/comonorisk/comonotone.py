"""Joint scenario tables, comonotonicity tests and comonotonic counterparts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import PROB_TOL, TIE_TOL, DiscretePosition, cdf, left_quantile
from .errors import DomainError, InvariantViolation


@dataclass(frozen=True)
class ScenarioTable:
    """Finite sample space with one payoff per (state, asset).

    ``payoffs`` has shape ``(n_states, n_assets)``.  Probabilities are
    validated to sum to one within ``1e-9`` and renormalized.
    """

    probs: np.ndarray
    payoffs: np.ndarray
    asset_labels: tuple[str, ...] = ()

    def __post_init__(self):
        p = np.array(self.probs, dtype=float).ravel()
        x = np.array(self.payoffs, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if p.size == 0 or x.ndim != 2 or x.shape[1] == 0:
            raise InvariantViolation("a scenario table needs at least one state and one asset")
        if x.shape[0] != p.size:
            raise InvariantViolation(f"{p.size} probabilities for {x.shape[0]} states")
        if not np.all(np.isfinite(x)):
            raise InvariantViolation("payoffs must be finite")
        if not np.all(np.isfinite(p)) or np.any(p <= 0.0):
            raise InvariantViolation("state probabilities must be strictly positive")
        total = math.fsum(p)
        if abs(total - 1.0) > PROB_TOL:
            raise InvariantViolation(f"state probabilities sum to {total!r}, not 1")
        p = p / total
        labels = tuple(self.asset_labels) or tuple(f"X{j + 1}" for j in range(x.shape[1]))
        if len(labels) != x.shape[1]:
            raise InvariantViolation("one label per asset column required")
        p.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "payoffs", x)
        object.__setattr__(self, "asset_labels", labels)

    @property
    def n_states(self) -> int:
        return self.payoffs.shape[0]

    @property
    def n_assets(self) -> int:
        return self.payoffs.shape[1]

    def _index(self, j) -> int:
        if isinstance(j, str):
            if j not in self.asset_labels:
                raise DomainError(f"no asset named {j!r}")
            return self.asset_labels.index(j)
        if not (0 <= int(j) < self.n_assets):
            raise DomainError(f"asset index {j} out of range for {self.n_assets} assets")
        return int(j)

    def column(self, j) -> np.ndarray:
        return self.payoffs[:, self._index(j)]

    def position(self, j) -> DiscretePosition:
        """Law of asset ``j``."""
        k = self._index(j)
        return DiscretePosition(self.payoffs[:, k], self.probs, label=self.asset_labels[k])

    def law_of(self, values: np.ndarray) -> DiscretePosition:
        """Law of an arbitrary statewise payoff vector on this table."""
        return DiscretePosition(np.asarray(values, dtype=float), self.probs)

    def with_columns(self, columns: Sequence[np.ndarray], labels: Sequence[str] | None = None) -> ScenarioTable:
        return ScenarioTable(self.probs, np.column_stack(columns), tuple(labels) if labels else ())

    def to_dict(self) -> dict:
        return {
            "probs": self.probs.tolist(),
            "payoffs": self.payoffs.tolist(),
            "asset_labels": list(self.asset_labels),
        }


def _comonotone_columns(a: np.ndarray, b: np.ndarray) -> bool:
    # Sort by a, breaking ties by b; then b must be nondecreasing and no
    # strict rise in a may pair with a strict fall in b.
    order = np.lexsort((b, a))
    return bool(np.all(np.diff(b[order]) >= 0.0))


def is_comonotonic(table: ScenarioTable, i, j) -> bool:
    """Whether assets ``i`` and ``j`` never move in opposite directions."""
    return _comonotone_columns(table.column(i), table.column(j))


def is_counter_comonotonic(table: ScenarioTable, i, j) -> bool:
    return _comonotone_columns(table.column(i), -table.column(j))


def is_comonotonic_pairwise(a: np.ndarray, b: np.ndarray) -> bool:
    """Quadratic reference test over all state pairs."""
    da = np.subtract.outer(a, a)
    db = np.subtract.outer(b, b)
    return bool(np.all(da * db >= 0.0))


def comonotonic_counterpart(
    marginals: Sequence[DiscretePosition],
    n_grid: int | None = None,
    labels: Sequence[str] | None = None,
) -> ScenarioTable:
    """Couple the marginals through a common uniform ``U``.

    With ``n_grid=None`` (exact mode) the states are the cells of the merged
    breakpoint partition of all marginal CDFs, so each column has exactly its
    marginal law.  With ``n_grid=N`` the states are ``u_k = (k - 1/2)/N``.
    """
    if not marginals:
        raise DomainError("at least one marginal is required")
    if n_grid is not None:
        if int(n_grid) < 1:
            raise DomainError("grid size must be at least 1")
        n = int(n_grid)
        u = (np.arange(1, n + 1) - 0.5) / n
        probs = np.full(n, 1.0 / n)
    else:
        cuts = np.unique(np.concatenate([m.cumulative for m in marginals]))
        merged = [0.0]
        for c in cuts:
            if c - merged[-1] > TIE_TOL:
                merged.append(float(c))
        merged[-1] = 1.0
        edges = np.array(merged)
        probs = np.diff(edges)
        u = edges[1:]
    payoffs = np.column_stack([[left_quantile(m, float(uk)) for uk in u] for m in marginals])
    return ScenarioTable(probs, payoffs, tuple(labels) if labels else ())


def upper_frechet_check(table: ScenarioTable, tol: float = 1e-12) -> bool:
    """Joint CDF equals the minimum of the marginal CDFs on the atom grid."""
    x = table.payoffs
    p = table.probs
    margins = [table.position(j) for j in range(table.n_assets)]
    grids = [m.values for m in margins]
    mesh = np.meshgrid(*grids, indexing="ij")
    points = np.stack([g.ravel() for g in mesh], axis=1)
    for pt in points:
        joint = math.fsum(p[np.all(x <= pt, axis=1)])
        bound = min(cdf(m, v) for m, v in zip(margins, pt))
        if abs(joint - bound) > tol:
            return False
    return True


def layer(x, a: float, h: float):
    """Loss layer ``clamp(x - a, 0, h - a)`` applied statewise or atomwise."""
    if not (a < h):
        raise DomainError(f"layer needs a < h, got a={a}, h={h}")
    if isinstance(x, DiscretePosition):
        return x.map(lambda v: np.clip(v - a, 0.0, h - a))
    return np.clip(np.asarray(x, dtype=float) - a, 0.0, h - a)


def positive_negative_split(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Statewise ``(X^+, -X^-)``; the two parts are comonotonic and sum to ``X``."""
    v = np.asarray(values, dtype=float)
    return np.maximum(v, 0.0), np.minimum(v, 0.0)
