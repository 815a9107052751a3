"""Command-line entry point.

Exit codes: 0 success or true, 1 false, 2 error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline
from .algebra import from_text, is_butson, is_normalized, is_row_balanced, normalize, to_text
from .cocycles import compute_cocycle_space, orthogonal_cocycles
from .equivalence import are_equivalent
from .exceptions import NotApplicable, ParameterError, ParseError, ResourceLimit, ValidationError
from .groups import groups_of_order, parse_group
from .rds import extension_candidates, rds_search, rds_to_matrix
from .screens import format_table

OK, FALSE, ERROR, LIMIT = 0, 1, 2, 3


def _yn(b: bool) -> str:
    return "yes" if b else "no"


def _read_matrix(path: str):
    text = Path(path).read_text()
    return from_text(text)


def _emit(args, text: str, payload: dict):
    if getattr(args, "json", False):
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _write(out: str | None, text: str):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands ------------------------------------------------------------------------


def verify_matrix(H) -> tuple[bool, str, dict]:
    bh = is_butson(H)
    balanced = bh and is_row_balanced(normalize(H))
    text = (f"BH({H.n},{H.k}): {_yn(bh)}; normalized: {_yn(is_normalized(H))}; "
            f"row-balanced after normalization: {_yn(balanced)}")
    return bh, text, {"n": H.n, "k": H.k, "butson": bh, "normalized": is_normalized(H),
                      "row_balanced_after_normalization": balanced}


def cmd_verify(args) -> int:
    if args.file.endswith(".jsonl"):
        cat = pipeline.load_catalog(args.file)
        ok = True
        for i, e in enumerate(cat.entries):
            good, text, payload = verify_matrix(pipeline.entry_matrix(e))
            ok &= good
            payload["entry"] = i
            _emit(args, f"entry {i}: {text}", payload)
        return OK if ok else FALSE
    good, text, payload = verify_matrix(_read_matrix(args.file))
    _emit(args, text, payload)
    return OK if good else FALSE


def cmd_equiv(args) -> int:
    H1, H2 = _read_matrix(args.file1), _read_matrix(args.file2)
    if (H1.n, H1.k) != (H2.n, H2.k):
        _emit(args, "equivalent: no (different order or phase)", {"equivalent": False})
        return FALSE
    res = are_equivalent(H1, H2)
    payload = {"equivalent": res.equivalent}
    text = f"equivalent: {_yn(res.equivalent)}"
    if res.witness is not None:
        w = res.witness
        payload["witness"] = {
            "row": {"perm": list(w.row_monomial.perm), "exps": list(w.row_monomial.exps)},
            "col": {"perm": list(w.col_monomial.perm), "exps": list(w.col_monomial.exps)},
        }
        text += "\nwitness (row * second * col^* = first)\n" + str(w)
    _emit(args, text, payload)
    return OK if res.equivalent else FALSE


def cmd_classify(args) -> int:
    if args.n is None or args.p is None:
        raise ParameterError("classify needs --n and --p")
    if args.n * args.p > 100 and not args.extended:
        raise ResourceLimit(f"np = {args.n * args.p} > 100 needs --extended")
    cat = pipeline.classify(args.n, args.p, args.method, extended=args.extended, jobs=args.jobs,
                            checkpoint_dir=args.checkpoint)
    out = args.out or f"catalog_{args.n}_{args.p}.jsonl"
    cat.write(out)
    print(f"BH({args.n},{args.p}): {len(cat.entries)} matrices, {len(cat.class_ids)} classes -> {out}")
    for cid in cat.class_ids:
        members = cat.members(cid)
        print(f"  class {cid}: {len(members)} matrices, |Aut| = {members[0]['aut_order']}")
    for m in cat.incomplete:
        print(f"  incomplete: {m['stage']}: {m['reason']}")
    return LIMIT if cat.incomplete else OK


def cmd_annotate(args) -> int:
    cat = pipeline.load_catalog(args.catalog)
    pipeline.annotate(cat)
    cat.write(args.out or args.catalog)
    for cid in cat.class_ids:
        f = cat.representative(cid)["flags"]
        print(f"class {cid}: self-transpose {_yn(f['self_transpose'])}; "
              f"hermitian partner {f['hermitian_pair_id']}; "
              f"indexing groups {', '.join(f['indexing_groups']) or '-'} ({f['indexing_groups_source']}); "
              f"group-developed over {', '.join(f['group_developed_over']) or '-'}; "
              f"circulant {_yn(f['circulant'])} ({f['circulant_source']})")
    return LIMIT if cat.incomplete else OK


def cmd_screens(args) -> int:
    primes = tuple(args.p) if args.p else (3, 5, 7)
    verdicts = pipeline.existence_table(args.max_np, primes, max_n=args.max_n, search=not args.no_search,
                                        search_max_np=None if args.extended else pipeline.SEARCH_MAX_NP)
    if args.json:
        print(json.dumps([{"n": n, "p": p, "verdict": v.verdict, "justification": v.justification}
                          for (n, p), v in sorted(verdicts.items(), key=lambda t: (t[0][1], t[0][0]))]))
    else:
        sys.stdout.write(format_table(verdicts, args.max_np, primes))
    return LIMIT if any(v.verdict == "UNKNOWN" for v in verdicts.values()) else OK


def cmd_cocycles_count(args) -> int:
    groups = [parse_group(args.group)] if args.group else groups_of_order(args.n)
    for G in groups:
        if G.order % args.p:
            raise ParameterError(f"{args.p} does not divide |{G.name}| = {G.order}")
        t = len(orthogonal_cocycles(G, args.p, mode=args.mode))
        space = compute_cocycle_space(G, args.p)
        _emit(args, f"{G.name}: t = {t} (dim Z = {space.dim_z}, dim B = {space.dim_b})",
              {"group": G.name, "p": args.p, "t": t, "dim_z": space.dim_z, "dim_b": space.dim_b})
    return OK


def cmd_rds_search(args) -> int:
    total = 0
    records = []
    ckdir = Path(args.checkpoint) if args.checkpoint else None
    if ckdir:
        ckdir.mkdir(parents=True, exist_ok=True)
    for G, coords, ext in extension_candidates(args.n, args.p):
        if args.group and G.name != parse_group(args.group).name:
            continue
        ck = None
        if ckdir:
            safe = G.name.replace(":", "_").replace("#", "_").replace("^", "")
            ck = ckdir / f"rds_{args.n}_{args.p}_{safe}_{''.join(map(str, coords)) or '0'}.json"
        sets = rds_search(ext, mode=args.mode, jobs=args.jobs, checkpoint=ck)
        total += len(sets)
        print(f"{G.name} class {list(coords)}: {len(sets)} set(s)")
        for i, R in enumerate(sets):
            rec = R.to_record(G.name)
            rec.update({"extension_class": list(coords), "set_id": i,
                        "matrix": to_text(rds_to_matrix(R)[0])})
            records.append(rec)
        if sets and args.mode == "find_one":
            break
    if args.out:
        Path(args.out).write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in records))
    print(f"RDS({args.n},{args.p},{args.n},{args.n // args.p}): {total} found"
          + ("" if total or args.group else " (search complete)"))
    return OK if total else FALSE


def cmd_compose(args) -> int:
    if args.files:
        mats = [_read_matrix(f) for f in args.files]
        if len({M.k for M in mats}) != 1:
            raise ParameterError("all factors need the same phase")
        H = pipeline.kronecker_all(mats)
        label = " (x) ".join(args.files)
    else:
        if args.a is None or args.b is None or args.group is None:
            raise ParameterError("compose needs matrix files or --a --b --group")
        H, label = pipeline.kronecker_family(args.a, args.b, args.group)
        label = f"group-developed over {label}"
    ok = is_butson(H)
    print(f"BH({H.n},{H.k}) {label}: verified {_yn(ok)}", file=sys.stderr)
    _write(args.out, to_text(H))
    return OK if ok else FALSE


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="butson", description="Cocyclic Butson Hadamard matrix toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check a matrix file or every entry of a catalog")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("equiv", help="decide equivalence of two matrices")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("classify", help="classify cocyclic BH(n,p) into a catalog")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--method", choices=("cocycle", "rds", "auto"), default="auto")
    p.add_argument("--out")
    p.add_argument("--extended", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--checkpoint", help="directory for RDS search checkpoints")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("annotate", help="add class flags to a catalog")
    p.add_argument("catalog")
    p.add_argument("--out")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("screens", help="existence table for n*p <= max-np")
    p.add_argument("--p", type=int, action="append")
    p.add_argument("--max-n", type=int)
    p.add_argument("--max-np", type=int, default=100)
    p.add_argument("--no-search", action="store_true")
    p.add_argument("--extended", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_screens)

    p = sub.add_parser("cocycles", help="cocycle tools")
    csub = p.add_subparsers(dest="action", required=True)
    c = csub.add_parser("count", help="count orthogonal cocycles")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--group")
    g.add_argument("--n", type=int)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--mode", choices=("exhaustive", "shift_orbit"), default="shift_orbit")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_cocycles_count)

    p = sub.add_parser("rds", help="relative difference set tools")
    rsub = p.add_subparsers(dest="action", required=True)
    r = rsub.add_parser("search", help="search all central extensions of order n*p")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--p", type=int, required=True)
    r.add_argument("--group", help="restrict to one quotient group")
    r.add_argument("--mode", choices=("find_one", "find_all"), default="find_one")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--checkpoint", help="directory for checkpoints")
    r.add_argument("--out")
    r.set_defaults(func=cmd_rds_search)

    p = sub.add_parser("compose", help="Kronecker products and the order 2^(2a) 3^b family")
    p.add_argument("files", nargs="*")
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--group", help="C3:C4, A4 or C2^2xC3")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compose)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return LIMIT
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return ERROR
    except (ParameterError, ValidationError, NotApplicable, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
