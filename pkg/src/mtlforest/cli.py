"""Command-line front end.

Exit codes: 0 for verified/success, 1 for a verified negative (the input
is well-formed but the property fails, e.g. not representable, not
isomorphic, axiom violation), 2 for errors (unreadable or malformed
input, caps exceeded).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from . import config
from .algebras import FiniteMTL, lukasiewicz_chain, parse_mtl, write_mtl
from .constructions import (
    LabeledForest,
    forest_product,
    forest_product_size,
    parse_lforest,
    write_lforest,
)
from .corpus import (
    chain_corpus,
    grid_corpus,
    load_config,
    sheaf_corpus,
    validation_corpus,
)
from .duality import (
    enumerate_archimedean_chains,
    g_decomposition,
    is_representable,
)
from .errors import MTLForestError, ValidationError
from .kconstruct import k_of_forest, plan_str
from .morphisms import find_isomorphism
from .posets import is_tree, parse_forest
from .sheaves import ForestPresheaf, enumerate_covers, stalk, verify_cover

OK, NEGATIVE, ERROR = 0, 1, 2


def _emit(report: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _load_algebra(path: str, max_size: int) -> FiniteMTL:
    with open(path, encoding="utf-8") as fh:
        alg = parse_mtl(fh.read())
    if alg.n > max_size:
        raise MTLForestError(
            f"algebra has {alg.n} elements, over --max-size {max_size}")
    return alg


def _load_lforest(path: str, max_nodes: int) -> LabeledForest:
    with open(path, encoding="utf-8") as fh:
        lf = parse_lforest(fh.read(), base_dir=os.path.dirname(os.path.abspath(path)))
    if lf.n > max_nodes:
        raise MTLForestError(
            f"forest has {lf.n} nodes, over --max-nodes {max_nodes}")
    return lf


def _forest_summary(lf: LabeledForest) -> dict:
    return {
        "nodes": lf.n,
        "edges": lf.forest.edges(),
        "names": list(lf.forest.names),
        "label_sizes": [lab.n for lab in lf.labels],
    }


def cmd_validate(args) -> int:
    path = args.file
    try:
        if path.endswith(".mtl"):
            alg = _load_algebra(path, args.max_size)
            _emit({"file": path, "kind": "mtl", "valid": True, "n": alg.n},
                  args.json, [f"{path}: valid MTL-algebra with {alg.n} elements"])
        elif path.endswith(".lforest"):
            lf = _load_lforest(path, args.max_nodes)
            _emit({"file": path, "kind": "lforest", "valid": True,
                   "forest": _forest_summary(lf)},
                  args.json,
                  [f"{path}: valid labeled forest with {lf.n} nodes"])
        else:
            with open(path, encoding="utf-8") as fh:
                forest = parse_forest(fh.read())
            _emit({"file": path, "kind": "forest", "valid": True,
                   "nodes": forest.n, "tree": is_tree(forest)},
                  args.json,
                  [f"{path}: valid forest with {forest.n} nodes"])
        return OK
    except ValidationError as exc:
        _emit({"file": path, "valid": False, "reason": str(exc)},
              args.json, [f"{path}: INVALID: {exc}"])
        return NEGATIVE


def cmd_decompose(args) -> int:
    alg = _load_algebra(args.file, args.max_size)
    dec = g_decomposition(alg)
    lf = dec.labeled
    report = {
        "file": args.file,
        "forest": _forest_summary(lf),
        "join_irreducible_idempotents": list(dec.nodes),
        "labels": [
            {"node": i, "size": lab.n, "mtl": write_mtl(lab)}
            for i, lab in enumerate(lf.labels)
        ],
    }
    lines = [f"forest nodes {lf.n}"]
    lines += [f"edge {i} {j}" for i, j in lf.forest.edges()]
    for i, lab in enumerate(lf.labels):
        tag = f"L{lab.n}" if lab == lukasiewicz_chain(lab.n) else f"chain(n={lab.n})"
        lines.append(f"label {i} = {tag}  # idempotent {dec.nodes[i]}")
    _emit(report, args.json, lines)
    return OK


def cmd_reconstruct(args) -> int:
    lf = _load_lforest(args.file, args.max_nodes)
    product = forest_product(lf)
    text = write_mtl(product.algebra)
    _emit({"file": args.file, "n": product.algebra.n, "mtl": text},
          args.json, [text.rstrip("\n")])
    return OK


def cmd_roundtrip(args) -> int:
    alg = _load_algebra(args.file, args.max_size)
    rep, witness = is_representable(alg)
    dec = g_decomposition(alg)
    product = forest_product(dec.labeled)
    iso = find_isomorphism(alg, product.algebra)
    report = {
        "algebra": args.file,
        "representable": rep,
        "witness": list(witness) if witness else None,
        "size": alg.n,
        "hg_size": product.algebra.n,
        "iso": iso is not None,
        "forest": _forest_summary(dec.labeled),
    }
    lines = [
        f"representable: {rep}" + (f" (witness e={witness[0]}, y={witness[1]})" if witness else ""),
        f"|M| = {alg.n}, |H(G(M))| = {product.algebra.n}",
        f"isomorphic: {iso is not None}",
    ]
    _emit(report, args.json, lines)
    return OK if rep and iso is not None else NEGATIVE


def cmd_kbuild(args) -> int:
    lf = _load_lforest(args.file, args.max_nodes)
    alg, plan = k_of_forest(lf)
    plan_text = plan_str(plan, lf.forest.names)
    _emit({"file": args.file, "plan": plan_text, "n": alg.n,
           "mtl": write_mtl(alg)},
          args.json, [plan_text, write_mtl(alg).rstrip("\n")])
    return OK


def cmd_iso(args) -> int:
    a = _load_algebra(args.a, args.max_size)
    b = _load_algebra(args.b, args.max_size)
    iso = find_isomorphism(a, b)
    if iso is None:
        _emit({"iso": False}, args.json, ["not isomorphic"])
        return NEGATIVE
    _emit({"iso": True, "map": list(iso)}, args.json,
          ["isomorphic", " ".join(str(v) for v in iso)])
    return OK


def cmd_sheaf_check(args) -> int:
    lf = _load_lforest(args.file, args.max_nodes)
    if forest_product_size(lf) > config.element_cap(None):
        raise MTLForestError("forest product too large for sheaf check")
    ph = ForestPresheaf(lf)
    per_downset = []
    failures = []
    for t_mask in ph.opens():
        covers = enumerate_covers(ph, t_mask, max_arity=args.max_arity)
        families = 0
        for cover in covers:
            try:
                families += verify_cover(ph, cover)
            except AssertionError as exc:
                failures.append({"downset": t_mask, "cover": list(cover),
                                 "reason": str(exc)})
        per_downset.append({"downset": t_mask, "covers": len(covers),
                            "families": families})
    stalk_report = []
    for i in range(lf.n):
        try:
            alg, _ = stalk(ph, i)
            stalk_report.append({"node": i, "size": alg.n, "chain": True})
        except AssertionError as exc:
            failures.append({"node": i, "reason": str(exc)})
    report = {
        "file": args.file,
        "downsets": per_downset,
        "stalks": stalk_report,
        "failures": failures,
    }
    lines = [
        f"downsets checked: {len(per_downset)}",
        f"matching families tested: {sum(d['families'] for d in per_downset)}",
        f"stalks: {[s['size'] for s in stalk_report]}",
        f"failures: {len(failures)}",
    ]
    _emit(report, args.json, lines)
    return OK if not failures else NEGATIVE


def cmd_enumerate_archimedean(args) -> int:
    reg = enumerate_archimedean_chains(args.max_size)
    chains = reg.chains()
    report = {
        "max_size": args.max_size,
        "count": len(chains),
        "chains": [{"n": c.n, "mtl": write_mtl(c)} for c in chains],
    }
    lines = [f"archimedean chains up to size {args.max_size}: {len(chains)}"]
    by_n = {}
    for c in chains:
        by_n[c.n] = by_n.get(c.n, 0) + 1
    lines += [f"  size {n}: {by_n[n]}" for n in sorted(by_n)]
    _emit(report, args.json, lines)
    return OK


def cmd_corpus(args) -> int:
    cfg = load_config()
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    out = args.out
    os.makedirs(out, exist_ok=True)
    written = []
    for i, chain in enumerate(chain_corpus(cfg.chain_max)):
        path = os.path.join(out, f"chain_{chain.n}_{i:03d}.mtl")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(write_mtl(chain))
        written.append(path)
    for name, family in (
        ("validation", validation_corpus(cfg)),
        ("sheaf", sheaf_corpus(cfg)),
        ("grid", grid_corpus(cfg)),
    ):
        for i, lf in enumerate(family):
            path = os.path.join(out, f"{name}_{i:04d}.lforest")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(write_lforest(lf))
            written.append(path)
    _emit({"out": out, "seed": cfg.seed, "files": len(written)},
          args.json, [f"wrote {len(written)} corpus files to {out}"])
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtlforest",
        description="Finite MTL-algebras, labeled forests and their duality",
    )
    parser.add_argument("--json", action="store_true", help="emit JSON reports")
    parser.add_argument("--max-size", type=int, default=12,
                        help="largest input algebra accepted (default 12)")
    parser.add_argument("--max-nodes", type=int, default=8,
                        help="largest input forest accepted (default 8)")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed override for corpus generation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a .mtl/.forest/.lforest file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("decompose", help="decompose an algebra into its labeled forest")
    p.add_argument("file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("reconstruct", help="forest product of a labeled forest")
    p.add_argument("file")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("roundtrip", help="decompose, reconstruct and compare")
    p.add_argument("file")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("kbuild", help="recursive ordinal-sum/product construction")
    p.add_argument("file")
    p.set_defaults(func=cmd_kbuild)

    p = sub.add_parser("iso", help="search for an isomorphism between two algebras")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("sheaf-check", help="verify the sheaf condition on a labeled forest")
    p.add_argument("file")
    p.add_argument("--max-arity", type=int, default=3)
    p.set_defaults(func=cmd_sheaf_check)

    p = sub.add_parser("enumerate-archimedean", help="list archimedean chains up to a size")
    p.set_defaults(func=cmd_enumerate_archimedean)

    p = sub.add_parser("corpus", help="write the deterministic test corpus")
    p.add_argument("--out", default="corpus_out")
    p.set_defaults(func=cmd_corpus)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return NEGATIVE
    except (MTLForestError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
