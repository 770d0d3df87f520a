"""Command-line interface: ``secantsv <verb> [options]``.

Exit status: 0 when a result was computed (a PROBABLY_DEFECTIVE scan
counts), 1 when it is inconclusive or does not reproduce, 2 on usage
errors or malformed input, 3 on I/O failures with cache or certificate
files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import claims as cl
from .cache import RankStore
from .engine import (DEFAULT_BUDGET, CertificateError, Verdict, derive, scan_summary,
                     validate_certificate)
from .linalg import DEFAULT_PRIMES, DEFAULT_SEED
from .scheme import double_points, parse_descriptor
from .space import SegreVeronesePair, critical_z, expected_secant_dim, h0
from .terracini import LEMMAS, Policy, Status, cohomology, verify_lemma_instance

VERBS = ("h0", "rank", "defect", "claims", "thresholds", "lemma", "derive", "validate")
CHECKS = ("claim1", "claim2", "claim3", "claim7", "claim11", "gap", "tail", "all")

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

# options each verb cannot run without
_REQUIRED = {
    "h0": ("factors", "degrees"),
    "rank": ("factors", "degrees"),
    "defect": ("factors", "degrees"),
    "lemma": ("id", "factors", "degrees"),
    "derive": ("factors", "degrees"),
    "validate": ("cert",),
    "claims": ("check",),
    "thresholds": (),
}
_CHECK_REQUIRED = {
    "claim1": ("r", "alpha", "z"),
    "claim2": ("r", "alpha", "z", "x1", "y1"),
    "claim3": ("r", "alpha"),
    "claim7": ("a",),
    "claim11": ("r", "alpha", "t"),
    "gap": ("r",),
    "tail": (),
    "all": ("r", "alpha"),
}


class UsageError(Exception):
    pass


@dataclass
class Command:
    verb: str
    options: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D401 - argparse hook
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="secantsv", description="Secant defectivity of Segre-Veronese pairs.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--factors", type=_int_list, help="factor dimensions, e.g. 2,2,1")
    p.add_argument("--degrees", type=_int_list, help="multidegree, e.g. 2,2,3")
    p.add_argument("-z", "--z", dest="z", type=int, help="number of double points")
    p.add_argument("--scheme", help='scheme descriptor, e.g. "3*2pt + 2*2pt@H2"')
    p.add_argument("--prime", type=int, help="single prime to compute over")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--r", type=int)
    p.add_argument("--alpha", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--x1", type=int)
    p.add_argument("--y1", type=int)
    p.add_argument("--u", type=int)
    p.add_argument("--check", choices=CHECKS)
    p.add_argument("--name", help="inequality name for --check tail (default: all)")
    p.add_argument("--id", choices=LEMMAS, help="lemma identifier")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--emit-cert", dest="emit_cert")
    p.add_argument("--cert")
    p.add_argument("--cache")
    p.add_argument("--json", action="store_true")
    return p


def parse(argv: Sequence[str]) -> Command:
    ns = _build_parser().parse_args(list(argv))
    opts = vars(ns)
    verb = opts.pop("verb")
    missing = [k for k in _REQUIRED[verb] if opts.get(k) is None]
    if verb == "claims" and opts.get("check"):
        missing += [k for k in _CHECK_REQUIRED[opts["check"]] if opts.get(k) is None]
    if missing:
        raise UsageError(f"{verb}: missing " + ", ".join("--" + m.replace("_", "-") for m in missing))
    if opts.get("factors") is not None and opts.get("degrees") is not None:
        try:
            opts["pair"] = SegreVeronesePair(opts["factors"], opts["degrees"])
        except ValueError as exc:
            raise UsageError(str(exc))
    if opts.get("trials", 1) < 1:
        raise UsageError("--trials must be positive")
    return Command(verb, opts)


# -- execution ------------------------------------------------------------

def _policy(opts: dict) -> Policy:
    primes = (opts["prime"],) if opts.get("prime") else DEFAULT_PRIMES[:2]
    return Policy(opts["trials"], primes, opts["seed"])


def _store(opts: dict) -> Optional[RankStore]:
    return RankStore(opts["cache"]) if opts.get("cache") else None


def _table(rows: list[dict], out: TextIO) -> None:
    if not rows:
        return
    cols = list(rows[0])
    widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) for c in cols}
    out.write("  ".join(c.ljust(widths[c]) for c in cols) + "\n")
    for r in rows:
        out.write("  ".join(str(r.get(c, "")).ljust(widths[c]) for c in cols) + "\n")


def _pairs(doc: dict, out: TextIO) -> None:
    for k, v in doc.items():
        if isinstance(v, (dict, list)):
            v = json.dumps(v)
        out.write(f"{k}: {v}\n")


def _run_h0(opts: dict) -> tuple[int, dict]:
    pair = opts["pair"]
    crit = critical_z(pair)
    doc = {"pair": pair.text(), "N": h0(pair), "dim": pair.dim,
           "z_lo": crit.z_lo, "z_hi": crit.z_hi}
    if opts.get("z"):
        doc["z"] = opts["z"]
        doc["expected_secant_dim"] = expected_secant_dim(pair, opts["z"])
    return EXIT_OK, doc


def _run_rank(opts: dict) -> tuple[int, dict]:
    pair = opts["pair"]
    if opts.get("scheme"):
        try:
            scheme = parse_descriptor(pair, opts["scheme"])
        except ValueError as exc:
            raise UsageError(str(exc))
    elif opts.get("z"):
        scheme = double_points(pair, opts["z"])
    else:
        raise UsageError("rank: give -z or --scheme")
    rep = cohomology(pair, scheme, _policy(opts), _store(opts))
    return EXIT_OK, rep.as_dict()


def _run_defect(opts: dict) -> tuple[int, dict]:
    pair = opts["pair"]
    doc = scan_summary(pair, _policy(opts), _store(opts))
    if opts.get("z"):
        doc["scan"] = [v for v in doc["scan"] if v["z"] == opts["z"]]
    inconclusive = any(v["status"] == Status.INCONCLUSIVE.value for v in doc["scan"])
    return (EXIT_INCONCLUSIVE if inconclusive else EXIT_OK), doc


def _run_claims(opts: dict) -> tuple[int, dict]:
    check, r, alpha = opts["check"], opts.get("r"), opts.get("alpha")
    if check == "claim1":
        res = cl.claim1_construct(r, alpha, opts["z"])
    elif check == "claim2":
        res = cl.check_claim2(r, alpha, opts["z"], opts["x1"], opts["y1"])
    elif check == "claim3":
        res = cl.check_claim3(r, alpha)
    elif check == "claim7":
        res = cl.check_claim7(opts["a"])
    elif check == "claim11":
        res = cl.check_claim11(r, alpha, opts["t"])
    elif check == "gap":
        res = cl.verify_threshold_gap(r)
    elif check == "tail":
        names = [opts["name"]] if opts.get("name") else list(cl.INEQUALITIES)
        unknown = [n for n in names if n not in cl.INEQUALITIES]
        if unknown:
            raise UsageError(f"unknown inequality {unknown[0]!r}")
        checks = {}
        for n in names:
            checks[f"{n} r>=8"] = cl.certify_tail(n).holds
            checks[f"{n} r=2..7"] = cl.direct_table_check(n).holds
        res = cl.ClaimResult(all(checks.values()), None, checks)
    else:
        res = cl.check_alpha(r, alpha)
    doc = {"check": check, **res.as_dict()}
    return EXIT_OK, doc


def _run_thresholds(opts: dict) -> tuple[int, dict]:
    return EXIT_OK, {"rows": cl.threshold_table()}


def _run_lemma(opts: dict) -> tuple[int, dict]:
    params = {k: opts[k] for k in ("z", "u") if opts.get(k) is not None}
    try:
        rep = verify_lemma_instance(opts["id"], opts["pair"], params, _policy(opts))
    except ValueError as exc:
        raise UsageError(str(exc))
    return (EXIT_OK if rep.conclusion_holds else EXIT_INCONCLUSIVE), rep.as_dict()


def _run_derive(opts: dict) -> tuple[int, dict]:
    cert = derive(opts["pair"], opts["budget"], _policy(opts), _store(opts))
    doc = cert.to_dict()
    if opts.get("emit_cert"):
        Path(opts["emit_cert"]).write_text(cert.to_json() + "\n", encoding="utf-8")
    return (EXIT_INCONCLUSIVE if cert.verdict is Verdict.INCONCLUSIVE else EXIT_OK), doc


def _run_validate(opts: dict) -> tuple[int, dict]:
    text = Path(opts["cert"]).read_text(encoding="utf-8")
    try:
        ok = validate_certificate(text)
    except CertificateError as exc:
        raise UsageError(f"malformed certificate: {exc}")
    return (EXIT_OK if ok else EXIT_INCONCLUSIVE), {"cert": opts["cert"], "valid": ok}


_RUNNERS = {
    "h0": _run_h0, "rank": _run_rank, "defect": _run_defect, "claims": _run_claims,
    "thresholds": _run_thresholds, "lemma": _run_lemma, "derive": _run_derive,
    "validate": _run_validate,
}


def _render(verb: str, doc: dict, out: TextIO) -> None:
    if verb == "defect":
        out.write(f"pair: {doc['pair']}\n")
        db = doc["database"]
        out.write("database: " + ("none" if db is None else f"{db['verdict']} ({db['source']})") + "\n")
        rows = [{"z": v["z"], "status": v["status"], "defect": v["defect"],
                 "rank": v.get("rank", ""), "expected": v.get("expected_rank", ""),
                 "from": "" if v["inferred_from"] is None else f"z={v['inferred_from']}"}
                for v in doc["scan"]]
        _table(rows, out)
    elif verb == "thresholds":
        _table([{**r, "gap_alphas": f"{len(r['gap_alphas'])} values"} for r in doc["rows"]], out)
    elif verb == "derive":
        _render_cert(doc, out, 0)
    else:
        _pairs(doc, out)


def _render_cert(node: dict, out: TextIO, depth: int) -> None:
    nums = {k: v for k, v in node["hypotheses"].items() if not isinstance(v, (list, dict))}
    out.write("  " * depth + f"{node['pair']['text']}: {node['verdict']} by {node['rule']}"
              + (f" {json.dumps(nums)}" if nums else "") + "\n")
    for c in node["children"]:
        _render_cert(c, out, depth + 1)


def execute(cmd: Command, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        status, doc = _RUNNERS[cmd.verb](cmd.options)
    except (UsageError, ValueError) as exc:
        # ValueError: arguments outside a check's domain, e.g. claim7 with a < 6
        err.write(f"secantsv: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        err.write(f"secantsv: {exc}\n")
        return EXIT_IO
    if cmd.options.get("json"):
        out.write(json.dumps(doc, default=str) + "\n")
    else:
        _render(cmd.verb, doc, out)
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse(args)
    except UsageError as exc:
        sys.stderr.write(f"secantsv: {exc}\n")
        return EXIT_USAGE
    return execute(cmd)


if __name__ == "__main__":
    sys.exit(main())
