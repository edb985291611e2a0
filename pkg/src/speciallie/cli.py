"""Command-line front end: ``python -m speciallie {rank,verify,element}``.

Exit codes: 0 success, 1 a rank mismatch or failed verification, 2 usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from math import comb
from pathlib import Path

from . import __version__
from . import freelie as fl
from .derivations import NAMED_ELEMENTS, is_special, named_element, special_kernel, tangential_basis
from .johnson import braid_lcs_rank, johnson_degree
from .suite import Bounds, find_claim, run_claims, run_properties, special_formula
from .traces import TRACES, cyclic_rank, target_basis

SCHEMA = 1
CACHE_ENV = "SPECIALLIE_CACHE_DIR"
SPACES = ("L", "p", "b", "C", "S", "wedge", "grB")


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ ranks

def rank_formula(space: str, n: int, k: int) -> int:
    if space == "L":
        return fl.witt_rank(n, k)
    if space == "p":
        return n * (n - 1) if k == 1 else n * fl.witt_rank(n, k)
    if space == "b":
        return special_formula(n, k)
    if space == "C":
        return cyclic_rank(n, k)
    if space == "S":
        return comb(n + k - 1, k)
    if space == "wedge":
        return n * comb(n, k - 1)
    if space == "grB":
        return braid_lcs_rank(n, k)
    raise UsageError(f"unknown space {space!r}")


def rank_computed(space: str, n: int, k: int) -> int:
    if space == "L":
        return len(fl.lyndon_words(n, k))
    if space == "p":
        return tangential_basis(n, k).rank
    if space == "b":
        return special_kernel(n, k).rank
    if space == "C":
        return len(target_basis("cyclic", n, k))
    if space == "S":
        return len(target_basis("symmetric", n, k))
    if space == "wedge":
        return len(target_basis("wedge", n, k))
    if space == "grB":
        return johnson_degree(n, k).rank
    raise UsageError(f"unknown space {space!r}")


def _rank_cell(args):
    return rank_computed(*args)


def code_hash() -> str:
    h = hashlib.sha256(__version__.encode())
    for p in sorted(Path(__file__).parent.glob("*.py")):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()[:16]


class DiskCache:
    """One JSON file per (space, n, k) under a directory named by the code hash."""

    def __init__(self, root):
        self.dir = Path(root) / code_hash() if root else None

    def _path(self, space, n, k):
        return self.dir / f"{space}_n{n}_k{k}.json"

    def get(self, space, n, k):
        if self.dir is None:
            return None
        try:
            obj = json.loads(self._path(space, n, k).read_text())
            v = obj["value"]
            return v if isinstance(v, int) else None
        except (OSError, ValueError, KeyError, TypeError):
            return None

    def put(self, space, n, k, value):
        if self.dir is None:
            return
        self.dir.mkdir(parents=True, exist_ok=True)
        tmp = self._path(space, n, k).with_suffix(f".tmp{os.getpid()}")
        tmp.write_text(json.dumps({"space": space, "n": n, "k": k, "value": value}))
        tmp.replace(self._path(space, n, k))


def parse_range(text: str, lo: int, what: str) -> list[int]:
    """'3', '1..4' or '1,3,5'."""
    try:
        out = []
        for part in text.split(","):
            if ".." in part:
                a, b = part.split("..")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"cannot parse {what} range {text!r}") from None
    if not out or min(out) < lo:
        raise UsageError(f"{what} must be >= {lo}")
    return sorted(set(out))


def cmd_rank(args) -> tuple[dict, bool]:
    ns = parse_range(args.n, 1 if args.space in ("L", "C", "S") else 2, "n")
    ks = parse_range(args.k, 1 if args.space != "wedge" else 2, "k")
    cache = DiskCache(args.cache_dir)
    cells = [(args.space, n, k) for n in ns for k in ks]
    values = {c: cache.get(*c) for c in cells}
    todo = [c for c in cells if values[c] is None]
    if args.parallelism > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=args.parallelism) as ex:
            results = list(ex.map(_rank_cell, todo))
    else:
        results = [_rank_cell(c) for c in todo]
    for c, v in zip(todo, results):
        values[c] = v
        cache.put(*c, v)
    rows = []
    for c in cells:
        f = rank_formula(*c)
        rows.append({"n": c[1], "k": c[2], "formula": f, "computed": values[c], "match": f == values[c]})
    ok = all(r["match"] for r in rows)
    return {"command": "rank", "space": args.space, "rows": rows, "ok": ok}, ok


def _rank_text(res, fmt):
    cols = ["n", "k", "formula", "computed", "match"]
    if fmt == "tsv":
        lines = ["\t".join(cols)] + ["\t".join(str(r[c]).lower() if c == "match" else str(r[c])
                                               for c in cols) for r in res["rows"]]
        return "\n".join(lines)
    lines = [f"rank of {res['space']}", f"{'n':>3} {'k':>3} {'formula':>10} {'computed':>10}  match"]
    for r in res["rows"]:
        lines.append(f"{r['n']:>3} {r['k']:>3} {r['formula']:>10} {r['computed']:>10}  "
                     f"{'yes' if r['match'] else 'NO'}")
    return "\n".join(lines)


# ----------------------------------------------------------------- verify

def cmd_verify(args) -> tuple[dict, bool]:
    b = Bounds(max_n=args.max_n, max_k=args.max_k, n=args.n, seed=args.seed, cases=args.cases)
    if args.suite == "paper":
        if args.claim:
            try:
                find_claim(args.claim)
            except KeyError:
                raise UsageError(f"unknown claim {args.claim!r}") from None
        results = run_claims(b, args.claim)
    else:
        results = run_properties(b, args.claim)
        if args.claim and not results:
            raise UsageError(f"unknown property {args.claim!r}")
    ok = all(r.status != "fail" for r in results)
    return {"command": "verify", "suite": args.suite,
            "bounds": {"max_n": b.max_n, "max_k": b.max_k, "n": b.n, "seed": b.seed, "cases": b.cases},
            "claims": [r.to_json() for r in results], "ok": ok}, ok


def _verify_text(res, fmt):
    if fmt == "tsv":
        lines = ["claim\ttag\tstatus\tchecks\tfailed"]
        for c in res["claims"]:
            bad = sum(not x["ok"] for x in c["checks"])
            lines.append(f"{c['id']}\t{c['tag']}\t{c['status']}\t{len(c['checks'])}\t{bad}")
        return "\n".join(lines)
    lines = []
    for c in res["claims"]:
        lines.append(f"{c['status'].upper():4}  {c['id']} [{c['tag']}]  {c['title']}  "
                     f"({len(c['checks'])} checks)")
        for x in c["checks"]:
            if not x["ok"]:
                lines.append(f"      failed: {x['label']}: {x['detail']}")
    lines.append("all passed" if res["ok"] else "FAILURES")
    return "\n".join(lines)


# ---------------------------------------------------------------- element

def _trace_names(spec: str, k: int) -> list[str]:
    if spec == "all":
        return [t for t in TRACES if t != "wedge" or k >= 3]
    if spec.startswith("mt"):
        if spec[2:] and int(spec[2:]) != k:
            raise UsageError(f"{spec} needs an element of degree {spec[2:]}, this one has degree {k}")
        return ["symmetric"]
    if spec not in TRACES:
        raise UsageError(f"unknown trace {spec!r}; use all, mt<k>, {', '.join(TRACES)}")
    if spec == "wedge" and k < 3:
        raise UsageError("the wedge trace needs degree >= 3")
    return [spec]


def _definition(tag, idx) -> str:
    build = NAMED_ELEMENTS[tag][0]
    parts = []
    for c, t in build(*idx):
        dual = fl.leaves(t)[-1]
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else f"{abs(c)}*"
        parts.append(f"{sign} {mag}x{dual}*(x){fl.tree_str(t)}")
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else s


def cmd_element(args) -> tuple[dict, bool]:
    try:
        f = named_element(args.name, args.indices, args.n)
    except ValueError as e:
        raise UsageError(str(e)) from None
    words = {w for (_, w) in f.terms}
    contents = {tuple(fl.content(w, f.n)) for w in words}
    alpha = sorted(contents)[0] if len(contents) == 1 else None
    traces = {}
    for t in _trace_names(args.trace, f.degree):
        traces[t] = TRACES[t](f)
    res = {"command": "element", "name": args.name, "indices": list(args.indices), "n": f.n, "k": f.degree,
           "element": f.to_json(), "definition": _definition(args.name, tuple(args.indices)),
           "normal_form": repr(f), "special": is_special(f),
           "alpha": list(alpha) if alpha else None,
           "partition": sorted((a for a in alpha if a), reverse=True) if alpha else None,
           "traces": {t: v.to_json() for t, v in traces.items()},
           "_text": {t: repr(v) for t, v in traces.items()}}
    return res, True


def _element_text(res, fmt):
    if fmt == "tsv":
        lines = ["field\tvalue", f"name\t{res['name']}", f"n\t{res['n']}", f"k\t{res['k']}",
                 f"partition\t{res['partition']}", f"element\t{res['normal_form']}"]
        lines += [f"trace:{t}\t{v}" for t, v in res["_text"].items()]
        return "\n".join(lines)
    lines = [f"{res['name']}{tuple(res['indices'])} in b_{res['n']}({res['k']}, {tuple(res['partition'] or ())})",
             f"  definition:  {res['definition']}",
             f"  normal form: {res['normal_form']}",
             f"  content:     {tuple(res['alpha'] or ())}"]
    for t, v in res["_text"].items():
        lines.append(f"  {t} trace: {v}")
    return "\n".join(lines)


# ------------------------------------------------------------------ main

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "tsv", "pretty"), default="pretty")
    common.add_argument("--cache-dir", default=None,
                        help=f"on-disk cache (default: ${CACHE_ENV}; unset disables caching)")
    common.add_argument("--parallelism", type=int, default=1, help="worker process cap")

    p = argparse.ArgumentParser(prog="speciallie", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("rank", parents=[common], help="formula vs computed ranks")
    r.add_argument("--space", choices=SPACES, required=True)
    r.add_argument("--n", required=True, help="n or a range a..b")
    r.add_argument("--k", required=True, help="k or a range a..b")

    v = sub.add_parser("verify", parents=[common], help="run the claim suite or property checks")
    v.add_argument("--suite", choices=("paper", "props"), default="paper")
    v.add_argument("--claim", default=None, help="claim id or tag")
    v.add_argument("--max-n", type=int, default=5)
    v.add_argument("--max-k", type=int, default=6)
    v.add_argument("--n", type=int, default=None, help="restrict to one n")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--cases", type=int, default=200)

    e = sub.add_parser("element", parents=[common], help="show a named special derivation")
    e.add_argument("name", choices=sorted(NAMED_ELEMENTS))
    e.add_argument("indices", type=int, nargs="+")
    e.add_argument("--n", type=int, default=None)
    e.add_argument("--trace", default="all", help="all, mt<k>, cyclic, reduced, symmetric or wedge")
    return p


COMMANDS = {"rank": (cmd_rank, _rank_text), "verify": (cmd_verify, _verify_text),
            "element": (cmd_element, _element_text)}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cache_dir is None:
        args.cache_dir = os.environ.get(CACHE_ENV) or None
    if args.parallelism < 1:
        parser.error("--parallelism must be >= 1")
    run, text = COMMANDS[args.command]
    try:
        res, ok = run(args)
    except UsageError as err:
        print(f"{parser.prog}: error: {err}", file=sys.stderr)
        return 2
    if args.format == "json":
        body = {k: v for k, v in res.items() if not k.startswith("_")}
        print(json.dumps({"schema": SCHEMA, **body}, sort_keys=True, indent=2))
    else:
        print(text(res, args.format))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
