"""Distortion functions, spectral densities and Kusuoka measures.

A distortion ``h`` is an increasing map of ``[0, 1]`` onto itself with
``h(0) = 0`` and ``h(1) = 1``.  Concave distortions correspond one to one
with probability measures ``mu`` on ``[0, 1]`` (mixtures of AVaR levels) and
with spectral data ``(h(0+), phi)``.  The conversions here are exact for
finitely supported ``mu`` and piecewise linear ``h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InvariantViolation

KINDS = ("identity", "avar", "var_indicator", "minvar", "power", "exp_family", "piecewise_linear")
LEVEL_TOL = 1e-12
KNOT_MERGE = 1e-12


def _as_levels(t) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < -LEVEL_TOL) or np.any(arr > 1.0 + LEVEL_TOL):
        raise DomainError("distortion argument must lie in [0, 1]")
    return np.clip(arr, 0.0, 1.0), arr.ndim == 0


def _out(arr: np.ndarray, scalar: bool):
    return float(arr) if scalar else arr


@dataclass(frozen=True)
class Distortion:
    """Distortion function of a named family.

    ``param`` carries the single family parameter: the level ``p`` for
    ``avar`` and ``var_indicator``, the order ``n`` for ``minvar``, the
    exponent ``gamma`` for ``power`` and the rate ``beta`` for
    ``exp_family``.  ``knots`` holds ``(t, h(t))`` pairs for
    ``piecewise_linear``; the first knot sits at ``t = 0`` and carries the
    right limit ``h(0+)``, so a positive first value encodes a jump at zero.
    ``closed`` selects ``1(t >= p)`` instead of ``1(t > p)`` for the
    indicator family.
    """

    kind: str
    param: float = float("nan")
    closed: bool = False
    knots: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown distortion kind {self.kind!r}")
        k, a = self.kind, self.param
        if k == "avar" and not (0.0 < a <= 1.0):
            raise DomainError(f"avar level must lie in (0, 1], got {a!r}")
        if k == "var_indicator":
            if not (0.0 <= a <= 1.0):
                raise DomainError(f"indicator level must lie in [0, 1], got {a!r}")
            if self.closed and a <= LEVEL_TOL:
                raise DomainError("closed indicator at 0 violates h(0) = 0")
            if not self.closed and a >= 1.0 - LEVEL_TOL:
                raise DomainError("open indicator at 1 violates h(1) = 1")
        if k == "minvar" and not (a >= 1.0 and float(a).is_integer()):
            raise DomainError(f"minvar order must be a positive integer, got {a!r}")
        if k == "power" and not (a > 0.0 and math.isfinite(a)):
            raise DomainError(f"power exponent must be positive, got {a!r}")
        if k == "exp_family" and not (a != 0.0 and math.isfinite(a)):
            raise DomainError(f"exp_family rate must be finite and nonzero, got {a!r}")
        if k == "piecewise_linear":
            object.__setattr__(self, "knots", _validate_knots(self.knots))

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls) -> Distortion:
        return cls("identity")

    @classmethod
    def avar(cls, p: float) -> Distortion:
        """``h(t) = min(t, p) / p``; ``p = 0`` gives the maximum-loss distortion."""
        if p == 0.0:
            return cls("var_indicator", 0.0)
        return cls("avar", float(p))

    @classmethod
    def var(cls, p: float) -> Distortion:
        return cls("var_indicator", float(p))

    @classmethod
    def indicator(cls, p: float, closed: bool = False) -> Distortion:
        return cls("var_indicator", float(p), closed=closed)

    @classmethod
    def minvar(cls, n: int) -> Distortion:
        return cls("minvar", float(n))

    @classmethod
    def power(cls, gamma: float) -> Distortion:
        return cls("power", float(gamma))

    @classmethod
    def exp_family(cls, beta: float) -> Distortion:
        return cls("exp_family", float(beta))

    @classmethod
    def piecewise(cls, knots: Sequence[tuple[float, float]]) -> Distortion:
        return cls("piecewise_linear", knots=tuple((float(t), float(v)) for t, v in knots))

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t):
        t, scalar = _as_levels(t)
        k, a = self.kind, self.param
        if k == "identity":
            out = t.copy()
        elif k == "avar":
            out = np.minimum(t, a) / a
        elif k == "var_indicator":
            if self.closed:
                out = ((t >= a - LEVEL_TOL) & (t > 0.0)).astype(float)
            else:
                out = ((t > a + LEVEL_TOL) | (t >= 1.0)).astype(float)
        elif k == "minvar":
            out = 1.0 - (1.0 - t) ** int(a)
        elif k == "power":
            out = t**a
        elif k == "exp_family":
            out = np.expm1(-a * t) / np.expm1(-a)
        else:
            ts, vs = self._knot_arrays()
            out = np.where(t > 0.0, np.interp(t, ts, vs), 0.0)
        return _out(np.asarray(out, dtype=float), scalar)

    def density(self, t):
        """Left derivative ``h'(t-)`` for ``t`` in ``(0, 1]``; the spectral density."""
        t, scalar = _as_levels(t)
        k, a = self.kind, self.param
        if k == "identity":
            out = np.ones_like(t)
        elif k == "avar":
            out = np.where(t <= a, 1.0 / a, 0.0)
        elif k == "var_indicator":
            out = np.zeros_like(t)
        elif k == "minvar":
            n = int(a)
            out = n * (1.0 - t) ** (n - 1)
        elif k == "power":
            with np.errstate(divide="ignore"):
                out = a * np.power(t, a - 1.0)
        elif k == "exp_family":
            out = a * np.exp(-a * t) / -np.expm1(-a)
        else:
            ts, _ = self._knot_arrays()
            slopes = self._slopes()
            idx = np.clip(np.searchsorted(ts, t, side="left"), 1, ts.size - 1)
            out = slopes[idx - 1]
        return _out(np.asarray(out, dtype=float), scalar)

    def density_slope(self, t):
        """``phi'(t)`` for the smooth families; raises for kinked ones."""
        t, scalar = _as_levels(t)
        k, a = self.kind, self.param
        if k == "identity":
            out = np.zeros_like(t)
        elif k == "minvar":
            n = int(a)
            out = -n * (n - 1) * (1.0 - t) ** max(n - 2, 0) if n >= 2 else np.zeros_like(t)
        elif k == "power":
            with np.errstate(divide="ignore"):
                out = a * (a - 1.0) * np.power(t, a - 2.0)
        elif k == "exp_family":
            out = -a * a * np.exp(-a * t) / -np.expm1(-a)
        else:
            raise DomainError(f"{k} distortion has no differentiable density")
        return _out(np.asarray(out, dtype=float), scalar)

    @property
    def right_limit_at_zero(self) -> float:
        """``h(0+)``, the weight on maximum loss."""
        if self.kind == "var_indicator":
            return 1.0 if (not self.closed and self.param == 0.0) else 0.0
        if self.kind == "piecewise_linear":
            return self.knots[0][1]
        return 0.0

    @property
    def is_concave(self) -> bool:
        return check_concave(self)

    @property
    def is_binary(self) -> bool:
        """True when ``h`` only takes the values 0 and 1."""
        if self.kind == "var_indicator":
            return True
        if self.kind == "piecewise_linear":
            return self.knots[0][1] == 1.0
        return False

    def zero_one_levels(self) -> tuple[float, float]:
        """``(t_s, t_i)``: last level where ``h`` vanishes and first where it hits 1."""
        k, a = self.kind, self.param
        if k == "avar":
            return 0.0, a
        if k == "var_indicator":
            return a, a
        if k == "piecewise_linear":
            ts, vs = self._knot_arrays()
            if vs[0] > 0.0:
                t_s = 0.0
            else:
                pos = np.nonzero(vs > 0.0)[0]
                t_s = float(ts[pos[0] - 1])
            t_i = float(ts[np.nonzero(vs >= 1.0)[0][0]])
            if vs[0] >= 1.0:
                t_i = 0.0
            return t_s, t_i
        return 0.0, 1.0

    # -- serialization ------------------------------------------------------

    def to_spec(self) -> dict:
        k = self.kind
        if k == "identity":
            return {"kind": k}
        if k == "avar" or k == "var_indicator":
            d = {"kind": "avar" if k == "avar" else "var", "p": self.param}
            if self.closed:
                d["closed"] = True
            return d
        if k == "minvar":
            return {"kind": k, "n": int(self.param)}
        if k == "power":
            return {"kind": k, "gamma": self.param}
        if k == "exp_family":
            return {"kind": k, "beta": self.param}
        return {"kind": k, "knots": [list(kv) for kv in self.knots]}

    def __repr__(self) -> str:
        spec = self.to_spec()
        body = ", ".join(f"{k}={v}" for k, v in spec.items() if k != "kind")
        return f"Distortion.{spec['kind']}({body})"

    # -- internals ----------------------------------------------------------

    def _knot_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        ts = np.array([kv[0] for kv in self.knots])
        vs = np.array([kv[1] for kv in self.knots])
        return ts, vs

    def _slopes(self) -> np.ndarray:
        ts, vs = self._knot_arrays()
        return np.diff(vs) / np.diff(ts)


def _validate_knots(knots) -> tuple[tuple[float, float], ...]:
    kv = sorted((float(t), float(v)) for t, v in knots)
    if len(kv) < 2:
        raise DomainError("a piecewise-linear distortion needs at least two knots")
    ts = np.array([a for a, _ in kv])
    vs = np.array([b for _, b in kv])
    if ts[0] != 0.0 or ts[-1] != 1.0:
        raise DomainError("knots must start at t=0 and end at t=1")
    if np.any(np.diff(ts) <= 0.0):
        raise DomainError("knot levels must be distinct")
    if abs(vs[-1] - 1.0) > LEVEL_TOL or vs[0] < 0.0:
        raise DomainError("knot values must start at h(0+) >= 0 and end at 1")
    if np.any(np.diff(vs) < -LEVEL_TOL) or np.any(vs > 1.0 + LEVEL_TOL):
        raise DomainError("distortion must be increasing with values in [0, 1]")
    vs = np.clip(np.maximum.accumulate(vs), 0.0, 1.0)
    vs[-1] = 1.0
    return tuple((float(t), float(v)) for t, v in zip(ts, vs))


def check_concave(h: Distortion, tol: float = 1e-12) -> bool:
    """Concavity on ``[0, 1]``; analytic for closed forms, slope test for knots."""
    k, a = h.kind, h.param
    if k in ("identity", "avar", "minvar"):
        return True
    if k == "var_indicator":
        return (not h.closed) and a == 0.0
    if k == "power":
        return a <= 1.0
    if k == "exp_family":
        return a > 0.0
    slopes = h._slopes()
    return bool(np.all(np.diff(slopes) <= tol * max(1.0, float(np.max(np.abs(slopes))))))


@dataclass(frozen=True)
class KusuokaMeasure:
    """Finitely supported probability measure on AVaR levels in ``[0, 1]``."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        items = sorted((float(p), float(w)) for p, w in self.atoms)
        if not items:
            raise InvariantViolation("a Kusuoka measure needs at least one atom")
        levels = [p for p, _ in items]
        weights = [w for _, w in items]
        if any(not (0.0 <= p <= 1.0) for p in levels):
            raise InvariantViolation("Kusuoka levels must lie in [0, 1]")
        if len(set(levels)) != len(levels):
            raise InvariantViolation("Kusuoka levels must be distinct")
        if any(not (w > 0.0) for w in weights):
            raise InvariantViolation("Kusuoka weights must be positive")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise InvariantViolation(f"Kusuoka weights sum to {math.fsum(weights)!r}, not 1")
        object.__setattr__(self, "atoms", tuple(items))

    @classmethod
    def point(cls, p: float) -> KusuokaMeasure:
        return cls(((p, 1.0),))

    @property
    def levels(self) -> np.ndarray:
        return np.array([p for p, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])

    @property
    def mass_at_zero(self) -> float:
        return self.atoms[0][1] if self.atoms[0][0] == 0.0 else 0.0

    def to_spec(self) -> dict:
        return {"atoms": [list(a) for a in self.atoms]}


def from_kusuoka(mu: KusuokaMeasure) -> Distortion:
    """Distortion ``h(t) = mu({0}) 1(t>0) + sum_i w_i min(t/p_i, 1)``."""
    if len(mu.atoms) == 1:
        p = mu.atoms[0][0]
        return Distortion.identity() if p == 1.0 else Distortion.avar(p)
    m0 = mu.mass_at_zero
    pos = [(p, w) for p, w in mu.atoms if p > 0.0]
    ts = sorted({0.0, 1.0, *(p for p, _ in pos)})

    def h_plus(t: float) -> float:
        return m0 + math.fsum(w * min(t / p, 1.0) for p, w in pos) if t > 0.0 else m0

    knots = [(t, h_plus(t)) for t in ts]
    knots[-1] = (1.0, 1.0)
    return Distortion.piecewise(knots)


def _interpolant(h: Distortion, grid) -> Distortion:
    pts = np.unique(np.clip(np.concatenate(([0.0, 1.0], np.asarray(grid, dtype=float))), 0.0, 1.0))
    keep = [0.0]
    for t in pts[1:]:
        if t - keep[-1] > KNOT_MERGE:
            keep.append(float(t))
    keep[-1] = 1.0
    vals = [h.right_limit_at_zero] + [float(h(t)) for t in keep[1:]]
    return Distortion.piecewise(list(zip(keep, vals)))


def kusuoka_from_distortion(h: Distortion, grid=None) -> KusuokaMeasure:
    """Mixing measure of a concave distortion.

    Exact for ``avar``, ``identity``, maximum loss and piecewise-linear
    ``h``.  Smooth families have no finite mixing measure; pass ``grid`` to
    use the concave piecewise-linear interpolant of ``h`` on those levels,
    which reproduces the Choquet integral of every position whose
    cumulative probabilities lie on the grid.
    """
    if not check_concave(h):
        raise DomainError(f"{h!r} is not concave; no Kusuoka representation")
    if h.kind == "avar":
        return KusuokaMeasure.point(h.param)
    if h.kind == "identity":
        return KusuokaMeasure.point(1.0)
    if h.kind == "var_indicator":
        return KusuokaMeasure.point(0.0)
    if h.kind != "piecewise_linear":
        if grid is None:
            raise DomainError(f"{h!r} has a continuous mixing measure; supply a grid")
        h = _interpolant(h, grid)
    ts, vs = h._knot_arrays()
    slopes = np.append(h._slopes(), 0.0)
    raw = [(0.0, float(vs[0]))]
    for j in range(1, ts.size):
        raw.append((float(ts[j]), float((slopes[j - 1] - slopes[j]) * ts[j])))
    atoms = [(p, w) for p, w in raw if w > 1e-15]
    total = math.fsum(w for _, w in atoms)
    if abs(total - 1.0) > 1e-12:
        raise InvariantViolation(f"recovered mixing weights sum to {total!r}")
    return KusuokaMeasure(tuple((p, w / total) for p, w in atoms))


@dataclass(frozen=True)
class SpectralDensity:
    """Spectral data: an atom on maximum loss plus a decreasing density.

    Either ``breaks``/``heights`` describe a step density equal to
    ``heights[i]`` on ``(breaks[i], breaks[i+1]]``, or ``family`` names a
    smooth concave distortion whose derivative is the density.
    """

    atom_at_zero: float
    breaks: tuple[float, ...] = ()
    heights: tuple[float, ...] = ()
    family: Distortion | None = None

    def __post_init__(self):
        if self.family is not None:
            return
        b = np.asarray(self.breaks, dtype=float)
        ht = np.asarray(self.heights, dtype=float)
        if b.size != ht.size + 1 or b[0] != 0.0 or b[-1] != 1.0 or np.any(np.diff(b) <= 0.0):
            raise InvariantViolation("breaks must run from 0 to 1, one more than heights")
        if np.any(ht < 0.0) or np.any(np.diff(ht) > 1e-12 * max(1.0, float(ht.max(initial=0.0)))):
            raise InvariantViolation("spectral density must be nonnegative and decreasing")
        if self.atom_at_zero < 0.0:
            raise InvariantViolation("atom at zero must be nonnegative")
        mass = self.atom_at_zero + math.fsum(ht * np.diff(b))
        if abs(mass - 1.0) > 1e-12:
            raise InvariantViolation(f"spectral mass is {mass!r}, not 1")

    @classmethod
    def from_steps(cls, breaks: Sequence[float], heights: Sequence[float], atom_at_zero: float = 0.0) -> SpectralDensity:
        return cls(float(atom_at_zero), tuple(map(float, breaks)), tuple(map(float, heights)))

    def cumulative(self, t):
        """``Phi(t) = int_0^t phi``, excluding the atom."""
        t, scalar = _as_levels(t)
        if self.family is not None:
            out = np.where(t > 0.0, self.family(t) - self.atom_at_zero, 0.0)
        else:
            b = np.asarray(self.breaks)
            ht = np.asarray(self.heights)
            seg = np.clip(np.minimum(b[1:], t[..., None]) - b[:-1], 0.0, None)
            out = seg @ ht
        return _out(np.asarray(out, dtype=float), scalar)

    def density(self, t):
        if self.family is not None:
            return self.family.density(t)
        t, scalar = _as_levels(t)
        b = np.asarray(self.breaks)
        idx = np.clip(np.searchsorted(b, t, side="left"), 1, b.size - 1)
        return _out(np.asarray(self.heights)[idx - 1], scalar)

    def density_slope(self, t):
        if self.family is None:
            raise DomainError("step densities are not differentiable")
        return self.family.density_slope(t)

    def to_distortion(self) -> Distortion:
        if self.family is not None:
            return self.family
        b = np.asarray(self.breaks)
        vals = self.atom_at_zero + np.concatenate(([0.0], np.cumsum(np.asarray(self.heights) * np.diff(b))))
        return Distortion.piecewise(list(zip(b, vals)))


def spectral_from_distortion(h: Distortion) -> SpectralDensity:
    """Spectral data ``(h(0+), h')`` of a concave distortion."""
    if not check_concave(h):
        raise DomainError(f"{h!r} is not concave; no spectral density")
    atom = h.right_limit_at_zero
    if h.kind == "avar":
        return SpectralDensity.from_steps((0.0, h.param, 1.0) if h.param < 1.0 else (0.0, 1.0),
                                          (1.0 / h.param, 0.0) if h.param < 1.0 else (1.0,))
    if h.kind == "identity":
        return SpectralDensity.from_steps((0.0, 1.0), (1.0,))
    if h.kind == "var_indicator":
        return SpectralDensity.from_steps((0.0, 1.0), (0.0,), atom_at_zero=1.0)
    if h.kind == "piecewise_linear":
        ts, _ = h._knot_arrays()
        slopes = np.maximum(h._slopes(), 0.0)
        # Renormalize away rounding so the mass check holds to 1e-12.
        mass = math.fsum(slopes * np.diff(ts))
        if mass > 0.0:
            slopes = slopes * (1.0 - atom) / mass
        return SpectralDensity.from_steps(ts, slopes, atom_at_zero=atom)
    return SpectralDensity(atom, family=h)


def parse_distortion(text: str) -> Distortion:
    """Parse the compact form ``kind:param`` used on the command line."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "identity":
            return Distortion.identity()
        val = float(arg)
    except ValueError as exc:
        raise DomainError(f"cannot parse distortion {text!r}") from exc
    table = {
        "avar": Distortion.avar,
        "var": Distortion.var,
        "var_closed": lambda p: Distortion.indicator(p, closed=True),
        "minvar": lambda n: Distortion.minvar(int(n)),
        "power": Distortion.power,
        "exp": Distortion.exp_family,
        "exp_family": Distortion.exp_family,
    }
    if kind not in table:
        raise DomainError(f"unknown distortion kind {kind!r}")
    return table[kind](val)


def distortion_from_spec(spec: dict) -> Distortion:
    kind = spec.get("kind")
    if kind == "identity":
        return Distortion.identity()
    if kind == "avar":
        return Distortion.avar(float(spec["p"]))
    if kind in ("var", "var_indicator"):
        return Distortion.indicator(float(spec["p"]), closed=bool(spec.get("closed", False)))
    if kind == "minvar":
        return Distortion.minvar(int(spec["n"]))
    if kind == "power":
        return Distortion.power(float(spec["gamma"]))
    if kind in ("exp", "exp_family"):
        return Distortion.exp_family(float(spec["beta"]))
    if kind == "piecewise_linear":
        return Distortion.piecewise([tuple(k) for k in spec["knots"]])
    raise DomainError(f"unknown distortion kind {kind!r}")
