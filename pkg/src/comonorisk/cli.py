"""Command-line interface.

Subcommands: ``risk``, ``verify``, ``frontier`` and ``counterexample``.
Exit codes: 0 success, 1 a verification claim failed, 2 malformed input,
3 invariant violation or degenerate data, 4 unsatisfiable request.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .comonotone import ScenarioTable
from .distortions import parse_distortion
from .dynamic import DynamicFamily
from .elicitability import avar_levelset_search
from .eligible import EligibleAsset, comonotonic_additivity_violation
from .errors import DegenerateProblem, DomainError, InvariantViolation, UnsatisfiableError
from .measures import measure_from_spec
from .portfolio import (
    FRONTIER_COLUMNS,
    PortfolioProblem,
    corner_sweep,
    efficient_frontier,
    mv_tangency,
    spectral_tangency,
)
from .preferences import ordering_mismatch_search
from .reports import jsonable
from .surplus import si_counterexample
from .verify import SCHEMA, SUITES, dumps, run_suite

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_INVARIANT, EXIT_UNSAT = 0, 1, 2, 3, 4
COUNTEREXAMPLES = ("si_plus", "s_var_comonotone", "avar_levelset", "avar_tower", "ap_ross")


class InputError(Exception):
    """Malformed command-line input; maps to exit code 2."""


# -- input parsing ---------------------------------------------------------------


def read_scenarios(text: str, source: str = "<csv>") -> ScenarioTable:
    """Parse ``prob,<asset1>,<asset2>,...`` into a scenario table.

    Probabilities are not renormalized here beyond the table's ``1e-9``
    tolerance; a bad total raises :class:`InvariantViolation`.
    """
    rows = [(n, r) for n, r in enumerate(csv.reader(io.StringIO(text)), start=1) if any(c.strip() for c in r)]
    if not rows:
        raise InputError(f"{source}: empty scenario file")
    line, header = rows[0]
    header = [h.strip() for h in header]
    if len(header) < 2 or header[0].lower() != "prob":
        raise InputError(f"{source}:{line}: header must be 'prob,<asset1>,...'")
    if len(rows) < 2:
        raise InputError(f"{source}: no scenario rows")
    probs, payoffs = [], []
    for n, row in rows[1:]:
        if len(row) != len(header):
            raise InputError(f"{source}:{n}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise InputError(f"{source}:{n}: {exc}") from exc
        if not all(math.isfinite(v) for v in vals):
            raise InputError(f"{source}:{n}: non-finite number")
        probs.append(vals[0])
        payoffs.append(vals[1:])
    p = np.array(probs)
    if np.any(p <= 0.0):
        raise InvariantViolation(f"{source}: probabilities must be strictly positive")
    return ScenarioTable(p, np.array(payoffs), tuple(header[1:]))


def _load_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _json_arg(value: str | None, what: str) -> dict | None:
    """Inline JSON or a path to a JSON file."""
    if value is None:
        return None
    text = value if value.lstrip().startswith("{") else _load_text(value)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise InputError(f"{what}: expected a JSON object")
    return obj


def _emit(obj, stream) -> None:
    stream.write(json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n")


# -- subcommands -------------------------------------------------------------------


def cmd_risk(args, out) -> int:
    table = read_scenarios(_load_text(args.scenarios), args.scenarios)
    spec = _json_arg(args.measure, "--measure")
    if spec is None:
        raise InputError("--measure is required")
    rho = measure_from_spec(spec)
    values = {label: rho(table.position(label)) for label in table.asset_labels}
    if args.json:
        _emit({"schema": SCHEMA, "measure": rho.to_spec(), "risk": values}, out)
    else:
        for label, v in values.items():
            out.write(f"{label}\t{v!r}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        raise InputError(f"unknown suite {args.suite!r}; choose from {', '.join(['all', *SUITES])}")
    report = run_suite(args.suite, args.seed)
    out.write(dumps(report) + "\n")
    return EXIT_OK if report["ok"] else EXIT_FAILED


def _problem_from_config(table: ScenarioTable, x0: float, cfg: dict) -> PortfolioProblem:
    objective = cfg.get("objective", "mv_tradeoff")
    phi = cfg.get("distortion")
    if isinstance(phi, str):
        phi = parse_distortion(phi)
    elif isinstance(phi, dict):
        phi = measure_from_spec({"measure": "spectral", "distortion": phi}).density
    lam = cfg.get("lam")
    if lam is None and objective.endswith("tradeoff"):
        lam = 1.0 if objective.startswith("mv") else 0.5
    return PortfolioProblem(
        table, x0, objective,
        lam=lam,
        mu_target=cfg.get("mu_target"),
        phi=phi,
        short_sales=bool(cfg.get("short_sales", True)),
    )


def cmd_frontier(args, out) -> int:
    table = read_scenarios(_load_text(args.scenarios), args.scenarios)
    if table.n_assets != 2:
        raise InputError(f"{args.scenarios}: frontier needs exactly two risky asset columns, got {table.n_assets}")
    if args.x0 is None:
        raise InputError("--x0 is required")
    cfg = _json_arg(args.config, "--config") or {}
    problem = _problem_from_config(table, args.x0, cfg)
    writer = csv.writer(out, lineterminator="\n")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RuntimeWarning)
        if args.verdicts:
            if not problem.objective.startswith("spectral"):
                raise InputError("--verdicts needs a spectral objective")
            lams = cfg.get("lambdas", list(np.linspace(0.0, 1.0, 21)))
            sweep = corner_sweep(problem, lams)
            writer.writerow(("lam", "threshold", "ratio", "gamma_tangency", "beta"))
            for lam, sol in zip(lams, sweep):
                writer.writerow((repr(float(lam)), repr(sol.threshold), repr(sol.ratio), repr(sol.gamma_tangency),
                                 sol.corner.value))
        else:
            cap = 5.0 if problem.short_sales else 1.0
            betas = cfg.get("betas", list(np.linspace(0.0, cap, 21)))
            gammas = list(cfg.get("gammas", list(np.linspace(-2.0, 2.0, 17))))
            tangent = mv_tangency(problem) if problem.objective.startswith("mv") else spectral_tangency(problem).gamma
            gammas = sorted(set(map(float, gammas)) | {tangent})
            points = efficient_frontier(problem, betas, gammas)
            writer.writerow(FRONTIER_COLUMNS)
            for pt in points:
                writer.writerow((repr(pt.beta), repr(pt.gamma), repr(pt.expected_return), repr(pt.risk),
                                 str(pt.efficient).lower()))
    for w in caught:
        sys.stderr.write(f"warning: {w.message}\n")
    return EXIT_OK


def _eligible_from(cfg: dict | None, s0: float | None) -> EligibleAsset:
    cfg = cfg or {}
    s1 = cfg.get("s1", [0.8, 1.0, 1.2, 1.5])
    probs = cfg.get("probs", [1.0 / len(s1)] * len(s1))
    price = s0 if s0 is not None else cfg.get("s0", 1.0)
    return EligibleAsset(float(price), s1, probs)


def _level(spec: dict | None, kind: str, default: float) -> float:
    if spec is None:
        return default
    rho = measure_from_spec(spec)
    if rho.kind != kind:
        raise InputError(f"--measure must be a {kind} spec for this counterexample")
    return float(rho.level)


def cmd_counterexample(args, out) -> int:
    kind = args.kind
    spec = _json_arg(args.measure, "--measure")
    inputs: dict = {}
    if kind == "si_plus":
        h = parse_distortion(args.distortion or "avar:0.5")
        inputs["distortion"] = h
        w = si_counterexample(h)
        body = w.to_dict()
    elif kind == "s_var_comonotone":
        S = _eligible_from(_json_arg(args.config, "--config"), args.s0)
        p = _level(spec, "var", 0.05)
        if S.is_risk_free:
            raise UnsatisfiableError("S-VaR with a risk-free asset is comonotonic additive; no witness exists")
        inputs.update(asset=S, p=p)
        rep = comonotonic_additivity_violation(S, p, "var", seed=args.seed, threshold=args.tol or 1e-6)
        if rep.witness is None:
            raise UnsatisfiableError(f"no violation found in {rep.checked} trials (P(S1 > S0) = {S.prob_outperform()})")
        body = rep.witness
    elif kind == "avar_levelset":
        p = _level(spec, "avar", 0.5)
        inputs["p"] = p
        rep = avar_levelset_search(p, threshold=args.tol or 1e-3)
        if rep.witness is None:
            raise UnsatisfiableError(f"no non-convex level set found for avar({p}) on the search grid")
        body = rep.witness
    elif kind == "avar_tower":
        from .dynamic import tower_gap_search

        p = _level(spec, "avar", 0.5)
        inputs["p"] = p
        rep = tower_gap_search(DynamicFamily.avar(p))
        if rep.witness is None:
            raise UnsatisfiableError(f"avar({p}) shows no tower gap on the two-by-two tree")
        body = rep.witness
    else:
        names = (args.pair or "avar:0.1,avar:0.5").split(",")
        if len(names) != 2:
            raise InputError("--pair needs two distortions separated by a comma")
        phi1, phi2 = (parse_distortion(n) for n in names)
        inputs["pair"] = [phi1, phi2]
        rep = ordering_mismatch_search([(phi1, phi2)], seed=args.seed)[0]
        if rep.witness is None:
            raise UnsatisfiableError(
                f"no ordering reversal found (AP dominance: {rep.details.get('ap_dominance')}, {rep.checked} pairs)"
            )
        body = rep.witness
    _emit({"schema": SCHEMA, "kind": kind, "inputs": inputs, "witness": body}, out)
    return EXIT_OK


# -- entry point ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="seed for every randomized search")
    common.add_argument("--tol", type=float, default=None, help="detection threshold for witness searches")
    common.add_argument("--measure", help="measure spec as inline JSON or a JSON file")
    common.add_argument("--config", help="JSON configuration file or inline JSON")

    parser = argparse.ArgumentParser(prog="comonorisk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("risk", parents=[common], help="risk of every asset in a scenario CSV")
    p.add_argument("scenarios")

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", help=f"one of: all, {', '.join(SUITES)}")

    p = sub.add_parser("frontier", parents=[common], help="portfolio grid with efficiency flags as CSV")
    p.add_argument("scenarios")
    p.add_argument("--x0", type=float, help="risk-free payoff")
    p.add_argument("--verdicts", action="store_true", help="emit trade-off corner verdicts over the lambdas sweep")

    p = sub.add_parser("counterexample", parents=[common], help="emit one constructive witness as JSON")
    p.add_argument("kind", choices=COUNTEREXAMPLES)
    p.add_argument("--distortion", help="distortion as kind:param, e.g. avar:0.5")
    p.add_argument("--s0", type=float, help="price of the eligible asset")
    p.add_argument("--pair", help="two distortions for ap_ross, e.g. avar:0.1,avar:0.5")
    return parser


COMMANDS = {"risk": cmd_risk, "verify": cmd_verify, "frontier": cmd_frontier, "counterexample": cmd_counterexample}


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (InvariantViolation, DegenerateProblem) as exc:
        err.write(f"invariant violation: {exc}\n")
        return EXIT_INVARIANT
    except UnsatisfiableError as exc:
        err.write(f"unsatisfiable: {exc}\n")
        return EXIT_UNSAT
    except DomainError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
