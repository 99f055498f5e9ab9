"""Command-line front end.

Every subcommand reads JSON inputs (a file path, or the JSON text itself),
writes one JSON report, and echoes the seed and budget it ran with.  Exit
status: 0 success, 2 soft failure (a search ran out of budget), 1 any
precondition or validation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import euler, paths, rows, wms
from .errors import LabError, ParseError, SoftFailure
from .matrices import ElementaryOp, RootSchedule, SqMatrix, matrix_to_params, params_to_matrix, reduce_generic
from .rings import ring_from_json, ring_to_json

DEFAULT_BUDGET = 1000


def _load(source):
    if source is None:
        return None
    text = source.strip()
    if not text.startswith(("{", "[")):
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {source!r}: {exc}") from None


def _ring(args, *inputs):
    data = _load(args.ring) if args.ring else None
    if data is None:
        for obj in inputs:
            if isinstance(obj, dict) and "ring" in obj:
                data = obj["ring"]
                break
    if data is None:
        raise ParseError("no ring given: pass --ring or embed a 'ring' object in the input")
    return ring_from_json(data)


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise ParseError(f"--{name.replace('_', '-')} is required")
    return _load(value)


def _unwrap(data, key):
    """Accept either the bare object or a full CLI report containing it."""
    if isinstance(data, dict) and "result" in data and isinstance(data["result"], dict):
        data = data["result"]
    if isinstance(data, dict) and key in data and isinstance(data[key], dict):
        data = data[key]
    return data


def _row(ring, data):
    return rows.UmRow.from_json(ring, data)


def _row_list(ring, data):
    entries = data["entries"] if isinstance(data, dict) else data
    return [ring(x) for x in entries]


# -- subcommands ------------------------------------------------------------------

def cmd_factorize(args):
    m = _need(args, "matrix")
    ring = _ring(args, m)
    g = SqMatrix.from_json(ring, m)
    ops = reduce_generic(g)
    return {"ring": ring_to_json(ring), "size": g.size, "N": len(ops), "ops": [op.to_json() for op in ops]}


def cmd_params(args):
    if args.matrix:
        m = _load(args.matrix)
        ring = _ring(args, m)
        g = SqMatrix.from_json(ring, m)
        t = matrix_to_params(g)
        sched = RootSchedule.for_size(g.size)
        return {"ring": ring_to_json(ring), "size": g.size, "schedule": [list(p) for p in sched.positions],
                "params": [str(x) for x in t]}
    data = _need(args, "params")
    ring = _ring(args, data)
    t = [ring(x) for x in (data["params"] if isinstance(data, dict) else data)]
    size = args.size or (data.get("size") if isinstance(data, dict) else None)
    if size is None:
        size = round((len(t) + 1) ** 0.5)
    sched = RootSchedule.for_size(int(size))
    g = params_to_matrix(sched, t)
    return {"ring": ring_to_json(ring), "size": g.size, "schedule": [list(p) for p in sched.positions],
            "matrix": g.to_json()}


def _open_set(ring, size, data):
    if data is None:
        return paths.OpenSet(ring, size)
    return paths.OpenSet(ring, int(data.get("size", size)), data.get("constraints", []))


def cmd_connect(args):
    pd, qd = _need(args, "p"), _need(args, "q")
    ring = _ring(args, pd, qd)
    p, q = SqMatrix.from_json(ring, pd), SqMatrix.from_json(ring, qd)
    U = _open_set(ring, p.size, _load(args.open))
    path = paths.connect(p, q, U, args.budget, args.seed)
    if not paths.verify_path(path, U):
        raise LabError("internal error: constructed path does not verify")
    return {"ring": ring_to_json(ring), "open": U.to_json(), "path": path.to_json(), "length": len(path.steps)}


def cmd_verify_path(args):
    pd = _unwrap(_need(args, "path"), "path")
    ring = _ring(args, pd)
    path = paths.ElemPath.from_json(ring, pd)
    U = _open_set(ring, path.start.size, _load(args.open)) if args.open else None
    defect = paths.path_defect(path, U)
    out = {"valid": defect is None}
    if defect is not None:
        out["index"], out["reason"] = defect
    return out


def cmd_is_generic(args):
    rd = _need(args, "row")
    ring = _ring(args, rd)
    a = _row(ring, rd)
    return {"row": a.to_json(), "generic": rows.is_generic(a)}


def cmd_make_generic(args):
    rd = _need(args, "row")
    ring = _ring(args, rd)
    a = _row(ring, rd)
    path = rows.make_generic(a, seed=args.seed, budget=args.budget)
    return {"path": path.to_json(), "endpoint": path.end.to_json(), "length": len(path.steps)}


def cmd_prime_avoid(args):
    rd = _need(args, "row")
    ring = _ring(args, rd)
    entries = _row_list(ring, rd)
    lam = rows.prime_avoidance(entries, seed=args.seed, budget=args.budget)
    return {"row": [str(x) for x in entries], "lambda": [str(x) for x in lam]}


def cmd_orbits(args):
    ring = _ring(args)
    part = wms.enumerate_orbits(ring, args.m)
    return {"ring": ring_to_json(ring), **part.to_json()}


def cmd_group_table(args):
    ring = _ring(args)
    part = wms.enumerate_orbits(ring, args.m)
    report = wms.verify_group_axioms(ring, args.m, part)
    report["generic_locus"] = wms.generic_locus_report(ring, args.m, part)
    return report


def _pair_rows(args):
    ad, bd = _need(args, "a"), _need(args, "b")
    ring = _ring(args, ad, bd)
    return ring, _row(ring, ad), _row(ring, bd)


def cmd_normalize_pair(args):
    _, a, b = _pair_rows(args)
    pair = wms.normalize_pair(a, b, budget=args.budget, seed=args.seed)
    return pair.to_json()


def cmd_group_law(args):
    _, a, b = _pair_rows(args)
    pair = wms.NormalizedPair(a, b)
    return {"product": wms.group_law(pair).to_json()}


def cmd_phi0(args):
    rd = _need(args, "row")
    ring = _ring(args, rd)
    return {"value": euler.phi0(_row(ring, rd)).to_json()}


def cmd_phi(args):
    rd = _need(args, "row")
    ring = _ring(args, rd)
    return euler.phi(_row(ring, rd), seed=args.seed, budget=args.budget).to_json()


def cmd_lemma_witness(args):
    rd = _need(args, "row")
    ring = _ring(args, rd)
    a = _row(ring, rd)
    lam = [ring(x) for x in _load(args.lam)] if args.lam else euler.choose_lambda(a, args.seed, args.budget)
    mu = [ring(x) for x in _load(args.mu)] if args.mu else euler.choose_mu(a, args.seed, args.budget)
    return {"witness": euler.lemma_vanishing_witness(a, lam, mu).to_json()}


def cmd_phi_step(args):
    rd, od = _need(args, "row"), _need(args, "op")
    ring = _ring(args, rd)
    a = _row(ring, rd)
    op = ElementaryOp.from_json(ring, od)
    return {"witness": euler.check_phi_step(a, op, seed=args.seed, budget=args.budget).to_json()}


def cmd_hom_check(args):
    _, a, b = _pair_rows(args)
    return {"witness": euler.hom_check(a, b, seed=args.seed, budget=args.budget).to_json()}


def cmd_verify_witness(args):
    wd = _need(args, "witness")
    ring = _ring(args, wd, wd.get("result", {}) if isinstance(wd, dict) else None)
    body = _unwrap(wd, "witness")
    missing = [k for k in ("lhs", "rhs", "chain") if k not in body]
    if missing:
        raise ParseError(f"witness object lacks {', '.join(missing)}")
    w = euler.RelationWitness.from_json(ring, body)
    ok, idx, why = euler.replay(w.chain, w.lhs, w.rhs)
    out = {"valid": ok}
    if not ok:
        out["index"], out["reason"] = idx, why
    return out


COMMANDS = {
    "factorize": (cmd_factorize, ["matrix"]),
    "params": (cmd_params, ["matrix", "params", "size"]),
    "connect": (cmd_connect, ["p", "q", "open"]),
    "verify-path": (cmd_verify_path, ["path", "open"]),
    "is-generic": (cmd_is_generic, ["row"]),
    "make-generic": (cmd_make_generic, ["row"]),
    "prime-avoid": (cmd_prime_avoid, ["row"]),
    "orbits": (cmd_orbits, ["m"]),
    "group-table": (cmd_group_table, ["m"]),
    "normalize-pair": (cmd_normalize_pair, ["a", "b"]),
    "group-law": (cmd_group_law, ["a", "b"]),
    "phi0": (cmd_phi0, ["row"]),
    "phi": (cmd_phi, ["row"]),
    "lemma-witness": (cmd_lemma_witness, ["row", "lam", "mu"]),
    "phi-step": (cmd_phi_step, ["row", "op"]),
    "hom-check": (cmd_hom_check, ["a", "b"]),
    "verify-witness": (cmd_verify_witness, ["witness"]),
}

_VALIDITY_COMMANDS = {"verify-path", "verify-witness"}


def _default_budget():
    raw = os.environ.get("UNIMODULAR_LAB_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"UNIMODULAR_LAB_BUDGET must be an integer, got {raw!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="unimodular-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, extra) in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--ring", help="ring descriptor JSON (file or inline)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("-v", "--verbose", action="store_true")
        for arg in extra:
            if arg in ("m", "size"):
                p.add_argument(f"--{arg}", type=int, required=(arg == "m"))
            else:
                p.add_argument(f"--{arg}")
    return parser


def run(argv=None):
    """Return ``(exit_status, report)``."""
    args = build_parser().parse_args(argv)
    if args.budget is None:
        args.budget = _default_budget()
    func = COMMANDS[args.command][0]
    report = {"command": args.command, "seed": args.seed, "budget": args.budget}
    try:
        result = func(args)
        report["status"] = "ok"
        report["result"] = result
        status = 0
        if args.command in _VALIDITY_COMMANDS and not result["valid"]:
            report["status"] = "invalid"
            status = 1
    except SoftFailure as exc:
        report["status"] = "soft-failure"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        status = 2
    except (LabError, KeyError, TypeError, ValueError) as exc:
        report["status"] = "error"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        status = 1
    return status, report, args


def main(argv=None):
    status, report, args = run(argv)
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.verbose and "error" in report:
        print(f"{report['error']['type']}: {report['error']['message']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
