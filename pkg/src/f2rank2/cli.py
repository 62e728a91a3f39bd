"""Command-line entry point: ``f2rank2 {verify,equiv,classify,catalog,cache}``.

Exit codes: 0 when everything checked passes, 1 when a check fails or two
spaces turn out inequivalent, 2 for usage, parse and shape errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from . import catalog
from .catalog import CatalogError
from .classify import enumerate_classes, run_suite
from .genmatrix import GenericSyntaxError, format_generic, parse_generic
from .gf2 import Gf2Matrix, ShapeError
from .orbits import (
    CACHE_VERSION,
    EquivalenceCanonizer,
    affine_equivalent,
    are_equivalent,
    are_similar,
    set_default_canonizer,
)
from .predicates import (
    has_trivial_spectrum,
    is_irreducible_action,
    is_lld,
    is_maximal_with_urk,
    is_minimal_lld,
    is_primitive,
    is_rank_constant_2,
    is_reduced,
    is_semi_primitive,
    rank_histogram,
    upper_rank,
)
from .spaces import eval_dim

SUITE_ORDER = ("core", "main", "j3", "lld", "spectrum", "affine", "maximal", "r11", "counting")

PREDICATES = {
    "all": lambda V: True,
    "reduced": is_reduced,
    "semi_primitive": is_semi_primitive,
    "primitive": is_primitive,
    "rank_constant": is_rank_constant_2,
    "trivial_spectrum": has_trivial_spectrum,
    "irreducible": is_irreducible_action,
    "lld": is_lld,
    "minimal_lld": is_minimal_lld,
    "maximal": lambda V: is_maximal_with_urk(V, upper_rank(V)),
}


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    cache_dir: str
    output: str
    threads: int
    seed: int

    @classmethod
    def resolve(cls, args: argparse.Namespace) -> CliConfig:
        cache = args.cache_dir or os.environ.get("F2RANK2_CACHE") or str(_default_cache_dir())
        return cls(cache, args.output, args.threads, args.seed)

    def header(self) -> str:
        if self.output == "json":
            return json.dumps({"config": asdict(self)}, sort_keys=True)
        return "# f2rank2 " + " ".join(f"{k}={v}" for k, v in asdict(self).items())


def _default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "f2rank2"


def _emit(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def _matrix_text(M: Gf2Matrix) -> str:
    return "[" + ";".join(",".join(str(v) for v in row) for row in M.to_lists()) + "]"


# ---------------------------------------------------------------------------
# commands


def cmd_verify(cfg: CliConfig, suite: str) -> int:
    names = SUITE_ORDER if suite == "all" else (suite,)
    ok = True
    for name in names:
        t0 = time.perf_counter()
        try:
            rep = run_suite(name, seed=cfg.seed)
        except CatalogError as exc:
            record = {"suite": name, "check": "catalog self-check", "status": "fail", "detail": str(exc)}
            _emit(json.dumps(record, sort_keys=True) if cfg.output == "json" else f"[{name}] fail\n  FAIL  catalog self-check  {exc}")
            ok = False
            continue
        lines = rep.jsonl() if cfg.output == "json" else rep.table()
        for line in lines:
            _emit(line)
        ok &= rep.passed
        print(f"{name}: {rep.status} in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 0 if ok else 1


def cmd_equiv(cfg: CliConfig, a: str, b: str, mode: str) -> int:
    S, T = parse_generic(a), parse_generic(b)
    if mode == "affine":
        wit = affine_equivalent(S, T)
    else:
        if not (S.is_linear and T.is_linear):
            raise UsageError(f"mode {mode} needs linear spaces; use --mode affine")
        fn = are_equivalent if mode == "equiv" else are_similar
        wit = fn(S.translation, T.translation)
    if cfg.output == "json":
        rec = {"mode": mode, "related": wit is not None}
        if wit is not None:
            rec.update(P=wit.P.to_lists(), Q=wit.Q.to_lists())
        _emit(json.dumps(rec, sort_keys=True))
    elif wit is None:
        _emit("inequivalent")
    else:
        _emit({"equiv": "equivalent", "similar": "similar", "affine": "affinely equivalent"}[mode])
        _emit(f"P = {_matrix_text(wit.P)}")
        _emit(f"Q = {_matrix_text(wit.Q)}")
    return 0 if wit is not None else 1


def _fingerprint(V) -> dict:
    counts = [eval_dim(V, x) for x in range(1, 1 << V.p)]
    return {
        "dim": V.dim,
        "urk": upper_rank(V),
        "ranks": rank_histogram(V),
        "n2": counts.count(2),
    }


def cmd_classify(cfg: CliConfig, n: int, p: int, dim: int, predicate: str, action: str, element_filter: str) -> int:
    if not (1 <= n and 1 <= p and n * p <= 16):
        raise UsageError("classification needs n*p <= 16")
    if not 0 <= dim <= 6:
        raise UsageError("dim must lie in 0..6")
    classes = enumerate_classes(n, p, dim, element_filter, PREDICATES[predicate], action)
    for V in classes:
        fp = _fingerprint(V)
        if cfg.output == "json":
            _emit(json.dumps({"matrix": format_generic(V), **fp}, sort_keys=True))
        else:
            hist = ",".join(f"{r}:{c}" for r, c in sorted(fp["ranks"].items()))
            _emit(f"{format_generic(V)}  dim={fp['dim']} urk={fp['urk']} ranks={hist} n2={fp['n2']}")
    if cfg.output == "json":
        _emit(json.dumps({"classes": len(classes)}))
    else:
        _emit(f"classes: {len(classes)}")
    return 0


def cmd_catalog(cfg: CliConfig, name: str | None) -> int:
    entries = catalog.load_catalog(verify=True)
    if name and name not in entries:
        raise UsageError(f"unknown catalog entry {name!r}")
    chosen = [entries[name]] if name else list(entries.values())
    for e in chosen:
        if cfg.output == "json":
            _emit(json.dumps({"name": e.name, "matrix": e.text, "expect": e.expected}, sort_keys=True))
        elif name:
            _emit(f"name: {e.name}")
            _emit(f"matrix: {e.text}")
            _emit(f"shape: {e.space.shape[0]}x{e.space.shape[1]}")
            for k, v in e.expected.items():
                _emit(f"  {k} = {v}")
        else:
            _emit(f"{e.name:<14} {e.text}")
    return 0


def cmd_cache(cfg: CliConfig, action: str) -> int:
    root = Path(cfg.cache_dir)
    files = sorted(root.glob("equiv-*.txt")) if root.is_dir() else []
    if action == "clear":
        for f in files:
            f.unlink()
        _emit(f"removed {len(files)} cache files from {root}")
        return 0
    _emit(f"cache: {root} ({CACHE_VERSION})")
    for f in files:
        with f.open() as fh:
            records = sum(1 for _ in fh) - 1
        _emit(f"  {f.name}: {records} records")
    if not files:
        _emit("  empty")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="f2rank2", description="Spaces of bounded-rank matrices over F2.")
    ap.add_argument("--cache-dir", help="equivalence-key cache directory (overrides F2RANK2_CACHE)")
    ap.add_argument("--output", choices=("table", "json"), default="table")
    ap.add_argument("--threads", type=int, default=0, help="worker count, 0 = auto (enumeration runs single-threaded)")
    ap.add_argument("--seed", type=int, default=0, help="seed for the randomized property checks")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", choices=(*SUITE_ORDER, "all"))

    e = sub.add_parser("equiv", help="test two generic matrices for equivalence")
    e.add_argument("a")
    e.add_argument("b")
    e.add_argument("--mode", choices=("equiv", "similar", "affine"), default="equiv")

    c = sub.add_parser("classify", help="list classes of spaces")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--dim", type=int, required=True)
    c.add_argument("--predicate", choices=sorted(PREDICATES), default="all")
    c.add_argument("--action", choices=("equiv", "similar"), default="equiv")
    c.add_argument("--filter", dest="element_filter", default="rank<=2", help="element filter, e.g. rank<=2, singular, trivial_spectrum")

    g = sub.add_parser("catalog", help="print catalog entries")
    g.add_argument("name", nargs="?")

    k = sub.add_parser("cache", help="inspect or clear the key cache")
    k.add_argument("action", choices=("stats", "clear"))
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    cfg = CliConfig.resolve(args)
    canon = EquivalenceCanonizer(cfg.cache_dir)
    set_default_canonizer(canon)
    _emit(cfg.header())
    try:
        if args.command == "verify":
            code = cmd_verify(cfg, args.suite)
        elif args.command == "equiv":
            code = cmd_equiv(cfg, args.a, args.b, args.mode)
        elif args.command == "classify":
            code = cmd_classify(cfg, args.n, args.p, args.dim, args.predicate, args.action, args.element_filter)
        elif args.command == "catalog":
            code = cmd_catalog(cfg, args.name)
        else:
            code = cmd_cache(cfg, args.action)
    except CatalogError as exc:
        print(f"f2rank2: catalog failure: {exc}", file=sys.stderr)
        return 1
    except (UsageError, GenericSyntaxError, ShapeError, ValueError) as exc:
        print(f"f2rank2: error: {exc}", file=sys.stderr)
        return 2
    if args.command != "cache":
        try:
            canon.flush()
        except OSError as exc:
            print(f"f2rank2: warning: cache not written: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
