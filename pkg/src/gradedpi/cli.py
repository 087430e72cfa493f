"""Batch command-line front end.

Subcommands build algebras from descriptors, compute identity components
and factoring verdicts, probe the normal-form engine, and evaluate the
generic matrix model. Every successful run can emit a JSON certificate
that echoes enough of the configuration to reproduce it; certificates are
byte-stable for a fixed configuration (seeds included, no timestamps).

Exit codes: 0 computed (verdicts live in the output, never in the code),
1 usage or malformed input, 2 internal inconsistency (two routes that must
agree did not), 3 resource guard tripped, 4 unsupported feature.
"""

from __future__ import annotations

import argparse
import copy
import itertools
import json
import math
import os
import sys

from .algebras import (
    BlockShape,
    algebra_from_descriptor,
    build_matrix_algebra,
    build_matrix_over,
    GradingMap,
    is_g_regular,
    parse_inline_descriptor,
)
from .errors import (
    GradedPIError,
    GuardExceededError,
    InternalInconsistencyError,
    ParseError,
    TruncationError,
    UnsupportedFeatureError,
)
from .freealg import format_poly, parse_poly, parse_signature
from .groups import GroupSpec, Z2
from .linalg import GuardLimits
from .model import ModelConfig, model_eval
from .relfree import (
    GradingMode,
    format_relfree,
    normal_form,
    partial_multiplicativity_check,
)
from .spaces import (
    EvaluationProvider,
    TIdealPresentation,
    check_factoring,
    identities_by_consequences,
    identities_by_evaluation,
    stabilization_scan,
)

CERTIFICATE_VERSION = 1


class _Parser(argparse.ArgumentParser):
    # usage problems are exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _guard(args) -> GuardLimits:
    return GuardLimits(max_cells=args.max_cells, max_bits=args.max_bits)


def _parse_group(text: str) -> GroupSpec:
    orders = tuple(int(p) for p in text.split(",") if p.strip())
    return GroupSpec(orders)


def _parse_sig(text: str, spec: GroupSpec):
    """Signature text; over the trivial group each entry must be "0"."""
    if spec.orders == ():
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ParseError("empty signature")
        for p in parts:
            if p != "0":
                raise ParseError(f"the trivial group has only degree 0, got {p!r}")
        return tuple(() for _ in parts)
    return parse_signature(text, spec)


def _sig_json(sig) -> list:
    return [list(t) for t in sig]


def _sig_text(sig) -> str:
    return ",".join(".".join(map(str, t)) if t else "0" for t in sig)


def _load_descriptor(text: str) -> dict:
    text = text.strip()
    try:
        if os.path.isfile(text):
            with open(text, encoding="utf-8") as fh:
                return json.load(fh)
        if text.startswith("{"):
            return json.loads(text)
    except ValueError as exc:
        raise ParseError(f"bad descriptor JSON: {exc}") from exc
    return parse_inline_descriptor(text)


def _poly_text(arg: str) -> str:
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return " ".join(fh.read().split())
    return arg


def _atomic_write(path: str, text: str):
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(command: str, config: dict, result: dict, lines, out_path) -> None:
    for ln in lines:
        print(ln)
    cert = {
        "certificate_version": CERTIFICATE_VERSION,
        "command": command,
        "config": config,
        "result": result,
    }
    text = json.dumps(cert, sort_keys=True, indent=2) + "\n"
    if out_path:
        _atomic_write(out_path, text)
        print(f"certificate written to {out_path}")
    else:
        sys.stdout.write(text)


def _json_meta(meta: dict) -> dict:
    return {k: v for k, v in meta.items() if isinstance(v, (int, str, bool))}


def _default_truncation(n_total: int, k_extra: int) -> int:
    # enough generators for every achievable disjoint-support pattern,
    # with two consecutive levels confirming stabilization
    return 2 * n_total + k_extra


def _grassmann_inner(desc: dict) -> dict | None:
    inner = desc
    while isinstance(inner, dict) and inner.get("kind") == "matrix_over":
        inner = inner.get("entries")
    if isinstance(inner, dict) and inner.get("kind") == "grassmann":
        return inner
    return None


def _with_generators(desc: dict, n: int) -> dict:
    out = copy.deepcopy(desc)
    inner = out
    while inner.get("kind") == "matrix_over":
        inner = inner["entries"]
    inner["generators"] = n
    return out


def _kstar_extra(inner: dict) -> int:
    deg = inner.get("grading", {}).get("deg")
    if isinstance(deg, dict) and "kstar" in deg:
        return int(deg["kstar"])
    return 0


# -- regularity ---------------------------------------------------------------


def cmd_regularity(args) -> int:
    spec = _parse_group(args.group)
    targets = _parse_sig(args.targets, spec)
    regular, report = is_g_regular(GradingMap(tuple(targets)), spec)
    lines = [f"regular: {'yes' if regular else 'no'}"]
    lines.append(f"surjective: {'yes' if report['surjective'] else 'no'}")
    lines.append(f"equipotent fibers: {'yes' if report['equipotent'] else 'no'}")
    for g, count in sorted(report["fibers"].items()):
        lines.append(f"  fiber of degree ({g}): {count}")
    config = {"group": list(spec.orders), "targets": _sig_json(targets)}
    _emit("regularity", config, report, lines, args.out)
    return 0


# -- identities ---------------------------------------------------------------


def _read_generators(path: str, spec: GroupSpec):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read generator file: {exc}") from exc
    gens = []
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        gens.append(parse_poly(line, spec))
    if not gens:
        raise ParseError(f"no generators found in {path}")
    return gens


def cmd_identities(args) -> int:
    guard = _guard(args)
    if args.algebra is None and args.generators is None:
        raise ParseError("need --algebra and/or --generators")
    desc = _load_descriptor(args.algebra) if args.algebra else None
    if desc is not None:
        spec = GroupSpec(tuple(int(x) for x in desc.get("group", [])))
    else:
        spec = _parse_group(args.group)
    sig = _parse_sig(args.sig, spec)

    comp_eval = scan = None
    if desc is not None:
        inner = _grassmann_inner(desc)
        if inner is not None:
            n0 = inner.get("generators") or _default_truncation(
                len(sig), _kstar_extra(inner)
            )
            n0 = int(n0)
            scan = stabilization_scan(
                lambda nn: algebra_from_descriptor(_with_generators(desc, nn)),
                sig,
                [n0, n0 + 2],
                args.method,
                guard,
            )
            desc = _with_generators(desc, n0)
        algebra = algebra_from_descriptor(desc)
        comp_eval = identities_by_evaluation(algebra, sig, args.method, guard)

    comp_cons = None
    gen_texts = None
    if args.generators is not None:
        gens = _read_generators(args.generators, spec)
        gen_texts = [format_poly(g, style="yz") for g in gens]
        pres = TIdealPresentation(tuple(gens), spec, os.path.basename(args.generators))
        comp_cons = identities_by_consequences(pres, sig, guard)

    config = {
        "algebra": desc,
        "generator_polynomials": gen_texts,
        "group": list(spec.orders),
        "guard": {"max_cells": guard.max_cells, "max_bits": guard.max_bits},
        "method": args.method,
        "signature": _sig_json(sig),
    }

    comp = comp_eval if comp_eval is not None else comp_cons
    routes = {}
    if comp_eval is not None:
        routes["evaluation"] = {"dim": comp_eval.dim, "meta": _json_meta(comp_eval.meta)}
    if comp_cons is not None:
        routes["consequences"] = {
            "dim": comp_cons.dim,
            "meta": _json_meta(comp_cons.meta),
        }
    result = {
        "ambient_dim": math.factorial(len(sig)),
        "dim": comp.dim,
        "routes": routes,
        "signature": _sig_json(sig),
        "stabilization": scan,
    }
    lines = [
        f"signature: {_sig_text(sig)}",
        f"ambient dimension: {result['ambient_dim']}",
        f"identity dimension: {comp.dim}",
    ]
    if scan is not None:
        lines.append(
            f"truncations {scan['n_values']} give dimensions {scan['dims']}"
            f" ({'stabilized' if scan['stabilized'] else 'NOT stabilized'})"
        )

    if comp_eval is not None and comp_cons is not None:
        agree = comp_eval.space.rows == comp_cons.space.rows
        result["routes_agree"] = agree
        if not agree:
            if scan is not None and not scan["stabilized"]:
                reason = (
                    "the truncation did not stabilize; rerun with a larger "
                    "generator count"
                )
            else:
                reason = (
                    "evaluation and consequence routes disagree on a stabilized "
                    "computation; this indicates an implementation fault"
                )
            result["disagreement"] = {
                "consequences_dim": comp_cons.dim,
                "evaluation_dim": comp_eval.dim,
                "reason": reason,
            }
            lines.append(f"ROUTE DISAGREEMENT: {reason}")
            _emit("identities", config, result, lines, args.out)
            return 2
        lines.append("routes agree")

    if args.basis:
        result["basis"] = [
            format_poly(p, style="yz") for p in comp.basis_polynomials()
        ]
        lines.append("basis:")
        lines.extend(f"  {text}" for text in result["basis"])
    _emit("identities", config, result, lines, args.out)
    return 0


# -- factor-check ---------------------------------------------------------------


def _sweep_signatures(spec: GroupSpec, bound: int):
    if bound < 1:
        raise ParseError("sweep bound must be at least 1")
    els = spec.elements()
    out = []
    for n in range(1, bound + 1):
        out.extend(itertools.combinations_with_replacement(els, n))
    return out


def _field_setup(args, shape: BlockShape, guard: GuardLimits):
    """Elementary grading over the field: one run, no truncation."""
    if args.targets:
        spec = _parse_group(args.group if args.group else "2")
        targets = _parse_sig(args.targets, spec)
        if len(targets) != shape.n:
            raise ParseError(
                f"{len(targets)} grading targets for {shape.n} matrix rows"
            )
    else:
        spec = _parse_group(args.group) if args.group else GroupSpec(())
        targets = tuple(spec.identity() for _ in range(shape.n))
    target_alg = build_matrix_algebra(targets, spec, shape)
    factors = []
    offset = 0
    for d in shape.sizes:
        block = targets[offset : offset + d]
        factors.append(
            EvaluationProvider(build_matrix_algebra(block, spec), "auto", guard)
        )
        offset += d
    run = (None, EvaluationProvider(target_alg, "auto", guard), factors)
    config = {"targets": _sig_json(targets)}
    return spec, [run], config


def _grassmann_setup(desc, shape: BlockShape, max_n: int, guard: GuardLimits):
    """Matrices over the exterior algebra: two truncations unless pinned."""
    spec = GroupSpec(tuple(int(x) for x in desc.get("group", [])))
    if "generators" in desc:
        truncations = [int(desc["generators"])]
    else:
        n0 = _default_truncation(max_n, _kstar_extra(desc))
        truncations = [n0, n0 + 2]
    runs = []
    for nn in truncations:
        entry_alg = algebra_from_descriptor(_with_generators(desc, nn))
        target_alg = build_matrix_over(entry_alg, shape)
        factors = [
            EvaluationProvider(
                entry_alg if d == 1 else build_matrix_over(entry_alg, BlockShape((d,))),
                "auto",
                guard,
            )
            for d in shape.sizes
        ]
        runs.append((nn, EvaluationProvider(target_alg, "auto", guard), factors))
    config = {"truncations": truncations}
    return spec, runs, config


def cmd_factor_check(args) -> int:
    guard = _guard(args)
    shape = BlockShape(tuple(int(p) for p in args.shape.split(",")))
    if len(shape.sizes) < 2:
        raise ParseError("factor checking needs at least two diagonal blocks")
    desc = _load_descriptor(args.entries)
    if args.targets and desc["kind"] != "field":
        raise ParseError("--targets applies to field entries only")

    if desc["kind"] == "field":
        spec, runs, extra = _field_setup(args, shape, guard)
        sigs = (
            [_parse_sig(args.sig, spec)] if args.sig else _sweep_signatures(spec, args.sweep)
        )
    elif desc["kind"] == "grassmann":
        spec = GroupSpec(tuple(int(x) for x in desc.get("group", [])))
        sigs = (
            [_parse_sig(args.sig, spec)] if args.sig else _sweep_signatures(spec, args.sweep)
        )
        max_n = max(len(s) for s in sigs)
        spec, runs, extra = _grassmann_setup(desc, shape, max_n, guard)
    else:
        raise ParseError(
            f"entry algebra kind {desc['kind']!r} is not supported by factor-check"
        )

    config = {
        "bordered": args.bordered,
        "entries": desc,
        "group": list(spec.orders),
        "guard": {"max_cells": guard.max_cells, "max_bits": guard.max_bits},
        "shape": list(shape.sizes),
        "signatures": [_sig_json(s) for s in sigs],
    }
    config.update(extra)

    rows = []
    lines = []
    for sig in sigs:
        verdicts = []
        for _, provider, factors in runs:
            verdicts.append(
                check_factoring(
                    provider,
                    factors,
                    sig,
                    spec,
                    bordered_crosscheck=args.bordered,
                    guard=guard,
                )
            )
        summaries = {
            (v.dim_identities, v.dim_product, v.relation) for v in verdicts
        }
        if len(summaries) > 1:
            raise InternalInconsistencyError(
                f"verdict at {_sig_text(sig)} changed between truncations "
                f"{[nn for nn, _, _ in runs]}; the default level is too small"
            )
        v = verdicts[0]
        witness = format_poly(v.witness, style="yz") if v.witness else None
        rows.append(
            {
                "dim_identities": v.dim_identities,
                "dim_product": v.dim_product,
                "relation": v.relation,
                "signature": _sig_json(sig),
                "witness": witness,
            }
        )
        msg = (
            f"sig {_sig_text(sig)}: identities {v.dim_identities}, "
            f"product {v.dim_product}, {v.relation}"
        )
        if witness:
            msg += f", witness {witness}"
        lines.append(msg)

    all_equal = all(r["relation"] == "equal" for r in rows)
    result = {"all_equal": all_equal, "verdicts": rows}
    lines.append(
        "summary: factoring holds at every signature"
        if all_equal
        else "summary: the product is strictly smaller at some signature"
    )
    _emit("factor-check", config, result, lines, args.out)
    return 0


# -- model ---------------------------------------------------------------------


def cmd_model(args) -> int:
    mode = GradingMode.parse(args.mode)
    shape = BlockShape(tuple(int(p) for p in args.shape.split(",")))
    cfg = ModelConfig(shape, Z2, mode)
    f = parse_poly(_poly_text(args.poly), Z2)
    matrix = model_eval(f, cfg)
    zero = matrix.is_zero()
    entries = matrix.entry_strings()
    config = {
        "mode": mode.token(),
        "poly": format_poly(f, style="yz"),
        "shape": list(shape.sizes),
    }
    result = {"entries": entries, "is_identity": zero}
    lines = [f"identity of the model: {'yes' if zero else 'no'}"]
    for key in sorted(entries):
        lines.append(f"  ({key}) = {entries[key]}")
    _emit("model-eval", config, result, lines, args.out)
    return 0


# -- relfree -------------------------------------------------------------------


def cmd_relfree(args) -> int:
    mode = GradingMode.parse(args.mode)
    if args.relfree_cmd == "nf":
        f = parse_poly(_poly_text(args.poly), Z2)
        nf = format_relfree(normal_form(f, mode))
        config = {"mode": mode.token(), "poly": format_poly(f, style="yz")}
        _emit("relfree-nf", config, {"normal_form": nf}, [nf], args.out)
        return 0
    report = partial_multiplicativity_check(mode, args.bound, args.samples, args.seed)
    config = {
        "bound": args.bound,
        "mode": mode.token(),
        "samples": args.samples,
        "seed": args.seed,
    }
    result = {"verdict": report.verdict, "witness": report.witness}
    lines = [report.verdict]
    if report.witness:
        lines.append(f"witness: {report.witness}")
    _emit("relfree-multbasis", config, result, lines, args.out)
    return 0


# -- wiring --------------------------------------------------------------------


def _add_guard_flags(p):
    p.add_argument("--max-cells", type=int, default=GuardLimits().max_cells)
    p.add_argument("--max-bits", type=int, default=GuardLimits().max_bits)


def _add_out_flag(p):
    p.add_argument("--out", help="write the JSON certificate to this path")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="gradedpi", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command")

    p = sub.add_parser("regularity", help="elementary grading regularity check")
    p.add_argument("--group", required=True, help="cyclic orders, e.g. 2 or 2,2")
    p.add_argument("--targets", required=True, help="row degrees, e.g. 0,1")
    _add_out_flag(p)
    p.set_defaults(func=cmd_regularity)

    p = sub.add_parser("identities", help="multilinear identity component")
    p.add_argument("--algebra", help="inline descriptor or JSON file")
    p.add_argument("--generators", help="file of T-ideal generator polynomials")
    p.add_argument("--sig", required=True, help="signature, e.g. 0,1,1")
    p.add_argument("--group", default="2", help="orders for --generators input")
    p.add_argument(
        "--method", default="auto", choices=["auto", "fast", "full", "limit"]
    )
    p.add_argument("--basis", action="store_true", help="include a basis")
    _add_guard_flags(p)
    _add_out_flag(p)
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("factor-check", help="identity factoring over the blocks")
    p.add_argument("--shape", required=True, help="block sizes, e.g. 1,1")
    p.add_argument("--entries", default="field", help="entry algebra descriptor")
    p.add_argument("--targets", help="elementary grading targets (field entries)")
    p.add_argument("--group", help="orders for --targets")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--sig", help="one signature")
    grp.add_argument(
        "--sweep",
        type=int,
        help="all signatures (nondecreasing degree order) up to this length",
    )
    p.add_argument("--bordered", action="store_true", help="bordered cross-check")
    _add_guard_flags(p)
    _add_out_flag(p)
    p.set_defaults(func=cmd_factor_check)

    p = sub.add_parser("model", help="generic matrix model")
    msub = p.add_subparsers(dest="model_cmd", required=True)
    pe = msub.add_parser("eval", help="evaluate a polynomial at generic matrices")
    pe.add_argument("--shape", required=True, help="block sizes, e.g. 1,1")
    pe.add_argument("--mode", required=True, help="natural | infty | kstar:<k>")
    pe.add_argument("--poly", required=True, help="polynomial text or file")
    _add_out_flag(pe)
    pe.set_defaults(func=cmd_model)

    p = sub.add_parser("relfree", help="relatively free algebra utilities")
    rsub = p.add_subparsers(dest="relfree_cmd", required=True)
    pn = rsub.add_parser("nf", help="normal form of a polynomial")
    pn.add_argument("--mode", required=True)
    pn.add_argument("--poly", required=True)
    _add_out_flag(pn)
    pn.set_defaults(func=cmd_relfree)
    pm = rsub.add_parser("multbasis", help="partial multiplicativity probe")
    pm.add_argument("--mode", required=True)
    pm.add_argument("--bound", type=int, default=4)
    pm.add_argument("--samples", type=int, default=200)
    pm.add_argument("--seed", type=int, default=0)
    _add_out_flag(pm)
    pm.set_defaults(func=cmd_relfree)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        sys.stderr.write("gradedpi: error: a command is required\n")
        return 1
    try:
        return args.func(args)
    except InternalInconsistencyError as exc:
        sys.stderr.write(f"internal inconsistency: {exc}\n")
        return 2
    except (GuardExceededError, TruncationError) as exc:
        sys.stderr.write(f"resource guard: {exc}\n")
        return 3
    except UnsupportedFeatureError as exc:
        sys.stderr.write(f"unsupported: {exc}\n")
        return 4
    except GradedPIError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
