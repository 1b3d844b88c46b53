"""Command-line front end: rotgroup <command> [options] [words]."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import certify as cert
from . import explore, normal
from .words import (
    GNU41,
    GNUFREE,
    GTRANS,
    FAMILIES,
    GroupSpec,
    Gm41,
    Gpq,
    Word,
    WordSyntaxError,
    evaluate,
    format_word,
    parse_word,
    random_word,
)

EXIT_OK, EXIT_FALSE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _spec(args) -> GroupSpec:
    fam = args.family
    if fam == "gpq":
        if args.p is None or args.q is None:
            raise UsageError("--family gpq needs --p and --q")
        return Gpq(args.p, args.q)
    if fam == "gm41":
        if args.m is None:
            raise UsageError("--family gm41 needs --m")
        return Gm41(args.m)
    return {"gnu41": GNU41, "gnufree": GNUFREE, "gtrans": GTRANS}[fam]


def _words(args, spec: GroupSpec, count: int | None = None) -> list[Word]:
    if getattr(args, "random", None):
        rng = random.Random(args.seed)
        need = count or 1
        return [random_word(spec, args.random, rng) for _ in range(need)]
    texts = args.words
    if count is not None and len(texts) != count:
        raise UsageError(f"expected {count} word argument(s), got {len(texts)}")
    return [parse_word(t, spec) for t in texts]


def _entry_str(x) -> str:
    return str(x)


def _matrix_rows(mat) -> list[list[str]]:
    return [[_entry_str(mat[i, j]) for j in range(3)] for i in range(3)]


def _form_dict(form) -> dict:
    d = {"form": format_word(form.to_word()), "length": form.length, "identity": form.is_empty()}
    if isinstance(form, normal.LRCForm):
        d.update(kind="lrc", variant=form.variant, pairs=[list(x) for x in form.pairs], roles_swapped=form.swapped)
    elif isinstance(form, normal.FreeProductForm):
        d.update(kind="free", pairs=[list(x) for x in form.pairs])
    else:
        d.update(kind="gm41", W=form.W, exponents=list(form.exps), E=[list(r) for r in form.E])
    return d


def cmd_normalize(args) -> tuple[int, dict, str]:
    spec = _spec(args)
    (w,) = _words(args, spec, 1)
    try:
        form = normal.normalize(w, args.variant)
    except ValueError as e:
        raise UsageError(str(e)) from e
    d = _form_dict(form)
    target = form.original_spec if isinstance(form, normal.LRCForm) else form.spec
    d["group"] = str(target)
    lines = [d["form"], f"length={d['length']}"]
    if target != spec:
        # 4 | p and 4 | q: the form is spelled in G(lcm(p,q),4,1)
        lines.append(f"group={target} (--family gm41 --m {target.m})")
    if args.matrix:
        rows = _matrix_rows(evaluate(w))
        d["matrix"] = rows
        lines += [" ".join(r) for r in rows]
    return EXIT_OK, d, "\n".join(lines)


def cmd_eq(args) -> tuple[int, dict, str]:
    spec = _spec(args)
    w1, w2 = _words(args, spec, 2)
    try:
        same = normal.equal(w1, w2)
    except ValueError as e:
        raise UsageError(str(e)) from e
    d = {"equal": same, "left": format_word(w1), "right": format_word(w2)}
    return (EXIT_OK if same else EXIT_FALSE), d, "true" if same else "false"


def cmd_eval(args) -> tuple[int, dict, str]:
    spec = _spec(args)
    (w,) = _words(args, spec, 1)
    mat = evaluate(w)
    rows = _matrix_rows(mat)
    # the transcendental family is formal in x, so it has no numeric value
    num = None if spec == GTRANS else mat.numeric().real.round(12).tolist()
    ident = mat.is_identity()
    d = {"word": format_word(w), "matrix": rows, "numeric": num, "identity": ident}
    text = "exact:\n" + "\n".join(" ".join(r) for r in rows)
    if num is not None:
        text += "\nnumeric:\n" + "\n".join(" ".join(f"{x:.12g}" for x in r) for r in num)
    return EXIT_OK, d, text


def cmd_certify(args) -> tuple[int, dict, str]:
    spec = _spec(args)
    (w,) = _words(args, spec, 1)
    c = cert.certify_word(w)
    text = c.to_text().rstrip("\n")
    d = {"kind": c.kind, "verdict": c.verdict, "text": c.to_text()}
    return (EXIT_OK if c.verdict == "nonidentity" else EXIT_FALSE), d, text


def cmd_ball(args) -> tuple[int, dict, str]:
    spec = _spec(args)
    if args.n is None:
        raise UsageError("ball needs --n")
    try:
        b = explore.ball(spec, args.n, args.variant, override=args.override)
    except ValueError as e:
        raise UsageError(str(e)) from e
    counts = {str(k): v for k, v in sorted(b.counts_by_length.items())}
    d = {"group": str(spec), "radius": args.n, "size": len(b), "counts_by_length": counts}
    lines = [f"size={len(b)}"] + [f"length {k}: {v}" for k, v in counts.items()]
    if args.list:
        d["forms"] = [format_word(f.to_word()) for f in b.forms]
        lines += d["forms"]
    code = EXIT_OK
    if args.check_injective:
        if spec.family != "gpq" or spec.p % 2 == 0 or spec.q % 2 == 0:
            raise UsageError("--check-injective needs G(p,q) with p, q odd")
        rep = explore.verify_free_product(spec.p, spec.q, args.n, jobs=args.jobs)
        d["injective"] = rep.free
        d["words_checked"] = rep.words_checked
        lines.append(str(rep))
        if not rep.free:
            d["relation"] = rep.relation()
            code = EXIT_FALSE
    return code, d, "\n".join(lines)


def cmd_closure(args) -> tuple[int, dict, str]:
    spec = _spec(args)
    gens = _words(args, spec) if args.words else [Word(spec, ((g, 1),)) for g in _default_gens(spec)]
    res = explore.closure(gens, args.cap)
    d = {"order": res.order, "exceeded": res.exceeded, "cap": args.cap, "found": len(res.elements)}
    return (EXIT_OK if not res.exceeded else EXIT_FALSE), d, str(res)


def _default_gens(spec: GroupSpec):
    if spec.family == "gm41" and spec.m % 4:
        return ("S", "T")
    return spec.generators


def cmd_count(args) -> tuple[int, dict, str]:
    if args.p is None or args.q is None or args.n is None:
        raise UsageError("count needs --p, --q and --n")
    try:
        c = explore.count_formula(args.p, args.q, args.n)
    except ValueError as e:
        raise UsageError(str(e)) from e
    return EXIT_OK, {"p": args.p, "q": args.q, "n": args.n, "count": c}, str(c)


def cmd_orbit(args) -> tuple[int, dict, str]:
    src = args.table
    if Path(src).exists():
        table = explore.parse_table(Path(src).read_text())
    else:
        try:
            table = explore.load_table(src)
        except FileNotFoundError as e:
            raise UsageError(f"no table file or shipped table named {src!r}") from e
    depth = args.n or 3
    rep = explore.substitution_orbit(table, depth, args.cap)
    d = rep.to_dict()
    lines = [f"group={rep.spec}", "distinct=" + " ".join(map(str, rep.distinct_counts)), f"subgroup: {rep.subgroup}"]
    return EXIT_OK, d, "\n".join(lines)


COMMANDS = {
    "normalize": cmd_normalize,
    "eq": cmd_eq,
    "eval": cmd_eval,
    "certify": cmd_certify,
    "ball": cmd_ball,
    "closure": cmd_closure,
    "count": cmd_count,
    "orbit": cmd_orbit,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=FAMILIES, default="gpq")
    common.add_argument("--p", type=int)
    common.add_argument("--q", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--variant", choices=normal.VARIANTS, default="L")
    common.add_argument("--n", type=int)
    common.add_argument("--cap", type=int, default=10000)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--random", type=int, metavar="LEN", help="use a seeded random word of LEN syllables")

    parser = argparse.ArgumentParser(prog="rotgroup", description="Exact word problems for rotation groups.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "normalize": "canonical form of a word",
        "eq": "decide whether two words are equal (exit 0 if equal, 1 if not)",
        "eval": "exact matrix of a word",
        "certify": "non-identity certificate (exit 1 if the word is the identity)",
        "ball": "enumerate canonical forms of at most n syllable pairs",
        "closure": "order of the group generated by words (exit 1 past --cap)",
        "count": "exact-length canonical form count",
        "orbit": "orientation orbit of a substitution table",
    }
    for name, h in helps.items():
        sp = sub.add_parser(name, parents=[common], help=h)
        if name == "orbit":
            sp.add_argument("table", help="table file, or shipped table name (dite_kart, wedge)")
        elif name != "count":
            sp.add_argument("words", nargs="*", help="words such as 'A^2 B^-1 A'")
        if name == "normalize":
            sp.add_argument("--matrix", action="store_true", help="also print the exact matrix")
        if name == "ball":
            sp.add_argument("--override", action="store_true", help="allow radius above the guard rail")
            sp.add_argument("--list", action="store_true", help="print every form")
            sp.add_argument(
                "--check-injective",
                action="store_true",
                help="check exactly that distinct reduced words give distinct matrices (uses --jobs)",
            )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, data, text = COMMANDS[args.command](args)
    except (UsageError, WordSyntaxError) as e:
        print(f"rotgroup {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"rotgroup {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        data = {"command": args.command, **data}
        print(json.dumps(data, sort_keys=True))
    else:
        print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
