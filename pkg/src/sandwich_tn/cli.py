"""Command-line front end. Text output is a summary; ``--json`` is the stable format."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import classification as cl
from .idempotents import count_idempotents_formula, enumerate_idempotents
from .oracle import DEFAULT_MAX_SUBSETS, verify_classification
from .transform import ScanLimitError, Transformation, parse_transformation
from .variants import context_for, normalize_sandwich, variants_isomorphic

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _alpha(text: str) -> Transformation:
    try:
        return parse_transformation(text)
    except ValueError as exc:
        raise UsageError(f"bad transformation {text!r}: {exc}") from None


def _context(text: str):
    alpha = _alpha(text)
    return alpha, context_for(alpha)


def _context_dict(alpha: Transformation) -> dict:
    return normalize_sandwich(alpha).to_dict() | {"sandwich": str(context_for(alpha).alpha)}


def _family_dict(fam: cl.Family, with_elements: bool) -> dict:
    out = {"descriptor": fam.descriptor.to_dict(), "cardinality": len(fam.elements)}
    if with_elements:
        out["elements"] = [str(t) for t in fam.elements.elements()]
    return out


# ---------------------------------------------------------------------------
# subcommands: each returns (payload, text lines, exit code)


def cmd_info(args):
    alpha, ctx = _context(args.alpha)
    payload = _context_dict(alpha)
    lines = [
        f"alpha: {alpha}",
        f"sandwich element: {ctx.alpha}" + (" (normalized)" if ctx.alpha != alpha else ""),
        f"n: {ctx.n}  l: {ctx.l}",
        f"kernel blocks: {payload['blocks']}  reps: {payload['reps']}",
        f"kernel type: {payload['kernel_type']}",
    ]
    return payload, lines, EXIT_OK


def cmd_idempotents(args):
    alpha, ctx = _context(args.alpha)
    infos = enumerate_idempotents(ctx, args.max_scan)
    formula = count_idempotents_formula(ctx)
    payload = {
        "context": _context_dict(alpha),
        "idempotents": [i.to_dict() for i in infos],
        "scanned": len(infos),
        "formula": formula,
        "agrees": formula == len(infos),
    }
    lines = [f"{i.eps}  rank {i.rank}" for i in infos]
    lines.append(f"scanned {len(infos)}, formula {formula}, agrees: {str(formula == len(infos)).lower()}")
    return payload, lines, EXIT_OK


def cmd_classify(args):
    alpha, ctx = _context(args.alpha)
    lists = {
        "isolated": cl.enumerate_isolated(ctx, args.max_scan),
        "completely_isolated": cl.enumerate_completely_isolated(ctx, args.max_scan),
        "left_convex": cl.enumerate_one_sided_convex(ctx, "left", args.max_scan),
        "right_convex": cl.enumerate_one_sided_convex(ctx, "right", args.max_scan),
        "convex": cl.enumerate_convex(ctx, args.max_scan),
    }
    counts = cl.count_isolated_formula(ctx, max_scan=args.max_scan)
    payload = {"context": _context_dict(alpha)}
    payload |= {k: [_family_dict(f, args.elements) for f in v] for k, v in lists.items()}
    payload["counts"] = counts
    lines = [f"{k}: {len(v)}" for k, v in lists.items()]
    lines.append(f"family total {counts['family_total']}, closed form {counts['formula']}")
    if args.elements or args.verbose:
        for fam in lists["isolated"]:
            lines.append(f"  {fam.descriptor}  |{len(fam.elements)}|")
    return payload, lines, EXIT_OK


def cmd_verify(args):
    alpha, ctx = _context(args.alpha)
    report = verify_classification(ctx, args.max_subsets, args.pruned, args.max_scan)
    payload = {"context": _context_dict(alpha)} | {
        k: v for k, v in report.items() if k != "context"
    }
    lines = [f"{name}: {sec['status']}" for name, sec in report["sections"].items()]
    counts = report["sections"].get("counts", {})
    if "oracle" in counts:
        lines.append(
            f"oracle {counts['oracle']}, families {counts['family_total']}, closed form {counts['formula']}"
        )
    lines.append(f"verdict: {report['verdict']}")
    code = EXIT_FAIL if report["verdict"] == "fail" else EXIT_OK
    return payload, lines, code


def cmd_count(args):
    alpha, ctx = _context(args.alpha)
    counts = cl.count_isolated_formula(ctx, enumerate_families=False)
    counts.pop("enumerated")
    counts.pop("enumeration_status")
    counts.pop("match")
    counts.pop("family_match")
    payload = {
        "context": _context_dict(alpha),
        "idempotents": count_idempotents_formula(ctx),
        "isolated": counts,
    }
    lines = [
        f"idempotents: {payload['idempotents']}",
        f"isolated (family count): {counts['family_total']}",
        f"isolated (closed form): {counts['formula']}",
    ]
    if "rank2_listed" in counts:
        lines.append(f"rank-2 root-union list: {counts['rank2_listed']}")
    return payload, lines, EXIT_OK


def cmd_iso(args):
    a1, a2 = _alpha(args.alpha1), _alpha(args.alpha2)
    try:
        same = variants_isomorphic(a1, a2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {"alpha1": str(a1), "alpha2": str(a2), "isomorphic": same}
    return payload, [f"isomorphic: {str(same).lower()}"], EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sandwich-tn",
        description="Idempotents and isolated subsemigroups of variants of T_n.",
    )
    parser.add_argument("--json", action="store_true", help="emit a JSON report")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, guarded=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        if guarded:
            p.add_argument("--max-scan", type=int, default=None, metavar="B",
                           help="refuse whole-semigroup scans above B elements")
        return p

    p = add("info", cmd_info, "normalization, rank and kernel type of alpha", guarded=False)
    p.add_argument("alpha")
    p = add("idempotents", cmd_idempotents, "list idempotents and compare with the count formula")
    p.add_argument("alpha")
    p = add("classify", cmd_classify, "isolated, completely isolated and convex subsemigroups")
    p.add_argument("alpha")
    p.add_argument("--elements", action="store_true", help="include element lists")
    p.add_argument("-v", "--verbose", action="store_true", help="list descriptors in text mode")
    p = add("verify", cmd_verify, "check the classification against brute force")
    p.add_argument("alpha")
    p.add_argument("--max-subsets", type=int, default=DEFAULT_MAX_SUBSETS, metavar="B",
                   help="largest |E| for the 2^|E| subset scan")
    p.add_argument("--pruned", action="store_true", help="use closure-system search instead")
    p = add("count", cmd_count, "counts from formulas only", guarded=False)
    p.add_argument("alpha")
    p = add("iso", cmd_iso, "whether two variants are isomorphic", guarded=False)
    p.add_argument("alpha1")
    p.add_argument("alpha2")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        payload, lines, code = args.func(args)
    except (UsageError, ScanLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        doc = {"schema_version": SCHEMA_VERSION, "command": args.command} | payload
        print(json.dumps(doc, indent=2))
    else:
        print("\n".join(lines))
    return code


def main() -> None:
    sys.exit(run())
