"""Batch front end: ``conewise {solve,bracket,certify,family,oracle,growth}``.

Exit codes: 0 pass/converged, 2 verified failure, 3 non-convergence,
4 input error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import certificates as certs
from .operators import InfFamily, Linear, MaxPlusConjugate, Operator, SupFamily, WholeSpace, operator_from_json
from .oracles import karp_cycle_mean, perron_2x2, policy_enumeration, power_bracket
from .solver import ConvergenceError, SolverConfig, eigen_solve, growth_rate, trace_rows_csv

EXIT_OK, EXIT_FAIL, EXIT_NOCONV, EXIT_INPUT = 0, 2, 3, 4
DEFAULT_MAX_DIM = 512


class InputError(Exception):
    pass


def _jsonable(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else ("inf" if obj > 0 else "-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _jsonable(obj.item())
    return obj


def _read_json(path: str, what: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {what} {path!r}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON in {what} at line {e.lineno} column {e.colno} (char {e.pos}): {e.msg}") from None


def load_operator(path: str) -> Operator:
    obj = _read_json(path, "operator")
    try:
        op = operator_from_json(obj)
    except (ValueError, TypeError) as e:
        raise InputError(f"invalid operator: {e}") from None
    cap = int(os.environ.get("CONEWISE_MAX_DIM", DEFAULT_MAX_DIM))
    if op.dim > cap:
        raise InputError(f"operator dimension {op.dim} exceeds CONEWISE_MAX_DIM={cap}")
    return op


def load_config(path: str | None) -> SolverConfig:
    if path is None:
        return SolverConfig()
    try:
        return SolverConfig.from_dict(_read_json(path, "config"))
    except (ValueError, TypeError) as e:
        raise InputError(f"invalid config: {e}") from None


def _vector(text: str | None, n: int, name: str) -> np.ndarray:
    if text is None:
        return np.ones(n)
    try:
        v = np.array(json.loads(text), dtype=float).reshape(-1)
    except (json.JSONDecodeError, ValueError, TypeError):
        raise InputError(f"{name} must be a JSON list of numbers") from None
    if v.size != n:
        raise InputError(f"{name} has {v.size} entries but the operator has dimension {n}")
    return v


# -- commands --------------------------------------------------------------------


def cmd_solve(args, op, cfg):
    target = op.base if isinstance(op, WholeSpace) else op
    try:
        res = eigen_solve(target, cfg)
    except ConvergenceError as e:
        return EXIT_NOCONV, {"error": str(e)}
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "lambda", "inner_iters", "bracket_lo", "bracket_hi", "residual"])
            for row in trace_rows_csv(res):
                w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return (EXIT_OK if res.converged else EXIT_NOCONV), res.to_json()


def cmd_bracket(args, op, cfg):
    if not isinstance(op, Linear):
        raise InputError("bracket needs a linear operator")
    x0 = _vector(args.x0, op.dim, "--x0")
    br = power_bracket(op.matrix, x0, args.max_iter, args.tol)
    out = {"lo": br.lo, "hi": br.hi, "iterations": br.iterations, "stalled": br.stalled}
    return (EXIT_NOCONV if br.stalled else EXIT_OK), out


def cmd_certify(args, op, cfg):
    if not args.cert:
        raise InputError("certify needs --cert FILE")
    raw = _read_json(args.cert, "certificate")
    try:
        items = [certs.cert_from_json(o) for o in (raw if isinstance(raw, list) else [raw])]
        for c in items:
            vec = getattr(c, "u", getattr(c, "v", getattr(c, "x", None)))
            if np.asarray(vec).size != op.dim:
                raise ValueError("certificate dimension does not match the operator")
        verdicts = [certs.check(op, c) for c in items]
    except (ValueError, KeyError, TypeError) as e:
        raise InputError(f"invalid certificate: {e}") from None
    for v in verdicts:
        print(v.line())
    ok = all(v.accepted for v in verdicts)
    out = {
        "verdicts": [
            {"kind": v.kind, "accepted": v.accepted, "worst_index": v.worst_index, "violation": v.violation, "message": v.message}
            for v in verdicts
        ]
    }
    return (EXIT_OK if ok else EXIT_FAIL), out


def cmd_family(args, op, cfg):
    if isinstance(op, WholeSpace):
        op = op.base
    if isinstance(op, InfFamily):
        rep = certs.family_cw_inf(op, None, cfg)
        out = {
            "kind": "inf",
            "family_cw": rep.family_cw,
            "policy_min": rep.policy_min,
            "optimal_policy": list(rep.optimal_policy),
            "bracket": list(rep.bracket),
            "attained": rep.attained,
            "ok": rep.ok,
            "messages": rep.messages,
        }
    elif isinstance(op, SupFamily):
        rep = certs.family_attainment(op, None, cfg)
        out = {
            "kind": "sup",
            "family_radius": rep.family_radius,
            "policy_max": rep.policy_max,
            "optimal_policy": list(rep.optimal_policy),
            "witness_policy": list(rep.witness_policy),
            "witness_radius": rep.witness_radius,
            "member_max": rep.member_max,
            "ok": rep.ok,
            "messages": rep.messages,
        }
    else:
        raise InputError("family needs a sup or inf family operator")
    print(("PASS" if rep.ok else "FAIL") + " family")
    return (EXIT_OK if rep.ok else EXIT_FAIL), out


def cmd_oracle(args, op, cfg):
    kind = args.kind or _default_oracle(op)
    if kind == "karp":
        if not isinstance(op, MaxPlusConjugate):
            raise InputError("karp oracle needs a maxplus operator")
        mean = karp_cycle_mean(op.weights)
        return EXIT_OK, {"oracle": "karp", "cycle_mean": mean, "radius": math.exp(mean) if mean > -math.inf else 0.0}
    if kind == "perron2x2":
        if not isinstance(op, Linear) or op.dim != 2:
            raise InputError("perron2x2 oracle needs a 2x2 linear operator")
        return EXIT_OK, {"oracle": "perron2x2", "radius": perron_2x2(*op.matrix.ravel())}
    if kind == "policy":
        fam = op.base if isinstance(op, WholeSpace) else op
        if not isinstance(fam, SupFamily):
            raise InputError("policy oracle needs a sup or inf family")
        try:
            res = policy_enumeration(fam)
        except ValueError as e:
            raise InputError(str(e)) from None
        return EXIT_OK, {"oracle": "policy", "radius": res.value, "policy": list(res.policy)}
    if kind == "bracket":
        return cmd_bracket(args, op, cfg)
    raise InputError(f"unknown oracle {kind!r}")


def _default_oracle(op) -> str:
    if isinstance(op, MaxPlusConjugate):
        return "karp"
    if isinstance(op, Linear):
        return "perron2x2" if op.dim == 2 else "bracket"
    return "policy"


def cmd_growth(args, op, cfg):
    x0 = _vector(args.x0, op.dim, "--x0")
    try:
        rep = growth_rate(op, x0, args.horizon)
    except ValueError as e:
        raise InputError(str(e)) from None
    return EXIT_OK, {"rate": rep.rate, "window": rep.window, "hit_zero": rep.hit_zero, "horizon": args.horizon}


COMMANDS = {
    "solve": cmd_solve,
    "bracket": cmd_bracket,
    "certify": cmd_certify,
    "family": cmd_family,
    "oracle": cmd_oracle,
    "growth": cmd_growth,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conewise", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("kind", nargs="?", help="oracle name for 'oracle': karp, perron2x2, policy, bracket")
    p.add_argument("--input", "-i", required=True, help="operator JSON file ('-' for stdin)")
    p.add_argument("--config", help="solver config JSON file")
    p.add_argument("--trace", help="write the regularization trace as CSV (solve)")
    p.add_argument("--out", "-o", help="write the JSON result here instead of stdout")
    p.add_argument("--cert", help="certificate JSON file (certify)")
    p.add_argument("--x0", help="start vector as a JSON list (growth, bracket)")
    p.add_argument("--horizon", type=int, default=1200)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is not None:
        np.random.seed(args.seed)
    try:
        op = load_operator(args.input)
        cfg = load_config(args.config)
        code, payload = COMMANDS[args.command](args, op, cfg)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    payload = {"command": args.command, "exit_code": code, **payload}
    if not args.no_timestamp:
        payload["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
