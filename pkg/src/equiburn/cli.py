"""Command-line surface.

Deterministic subcommands over JSON files: presentations (with an optional
content-addressed cache), classes of toric actions, equality tests with
certificates, blow-ups, determinant and vanishing reports, and the
compressibility search.  Exit codes: 0 success or Equal, 1 Distinct,
2 any error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import burncalc, models, symb
from .abgrp import FinAbGroup, finabgroup_from_json, wedge_det
from .grp import (
    DEFAULT_ORDER_CAP,
    PermGroup,
    SubgroupG,
    permgroup_from_json,
    pmul,
    regular_representation,
)
from .symb import ClassVector, KSymbol


@dataclass
class Config:
    cache_dir: str | None = None
    cap_group: int = DEFAULT_ORDER_CAP
    cap_basis: int = burncalc.BASIS_CAP
    cap_rows: int = burncalc.ROW_CAP
    fmt: str = "json"

    def __post_init__(self):
        if min(self.cap_group, self.cap_basis, self.cap_rows) <= 0:
            raise ValueError("caps must be positive")


def _read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _emit(cfg: Config, payload: dict, text_lines) -> None:
    if cfg.fmt == "json":
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        for line in text_lines:
            print(line)


def _load_group(d: dict, cfg: Config):
    kind = d.get("type")
    if kind == "abelian":
        return finabgroup_from_json(d)
    if kind == "perm":
        return permgroup_from_json(d, cap=cfg.cap_group)
    raise ValueError(f"unknown group type {kind!r}")


def _as_perm_group(group, cfg: Config):
    """(G, coords_to_perm) with abelian groups taken to their regular
    representation."""
    if isinstance(group, PermGroup):
        return group, None
    G, _, perm_of = regular_representation(group, cap=cfg.cap_group)
    return G, perm_of


def _load_filter(d: dict, G: PermGroup, perm_of) -> burncalc.GFilter:
    def as_perm(x):
        return perm_of(tuple(x)) if perm_of is not None else tuple(x)

    pairs = []
    for entry in d["pairs"]:
        H = SubgroupG(G, tuple(as_perm(e) for e in entry["H"]))
        reps = [as_perm(r) for r in entry["Y"]]
        y_elems = {pmul(r, h) for r in reps for h in H.elems}
        pairs.append((H, SubgroupG(G, tuple(y_elems))))
    return burncalc.GFilter.build(G, pairs)


def _build_presentation(args, cfg: Config):
    group_json = _read_json(args.group)
    group = _load_group(group_json, cfg)
    gfilter = None
    if args.flavor == "b":
        if not isinstance(group, FinAbGroup):
            raise ValueError("flavor b needs an abelian group literal")
        builder = lambda: burncalc.present_b(
            group, args.n, basis_cap=cfg.cap_basis, row_cap=cfg.cap_rows
        )
        gj = {"type": "abelian", "orders": list(group.orders)}
        filter_json = None
    elif args.flavor == "bc":
        G, perm_of = _as_perm_group(group, cfg)
        if getattr(args, "filter", None):
            gfilter = _load_filter(_read_json(args.filter), G, perm_of)
        builder = lambda: burncalc.present_bc(
            G, args.n, gfilter, basis_cap=cfg.cap_basis, row_cap=cfg.cap_rows
        )
        gj = {"type": "perm", "degree": G.degree, "gens": [list(g) for g in G.gens]}
        filter_json = None if gfilter is None else gfilter.to_json()
    else:
        raise ValueError(f"unknown flavor {args.flavor!r}")

    cache = None
    cache_path = None
    if cfg.cache_dir:
        cache = burncalc.PresentationCache(cfg.cache_dir)
        key = burncalc.presentation_cache_key(args.flavor, gj, args.n, filter_json)
        cached = cache.load(key)
        if cached is not None:
            return cached, cache.path_for(key)
    p = builder()
    if cache is not None:
        cache_path = cache.store(key, p)
    return p, cache_path


def cmd_present(args, cfg: Config) -> int:
    p, cache_path = _build_presentation(args, cfg)
    free_rank, torsion = p.invariants
    payload = {
        "schema": 1,
        "flavor": p.flavor,
        "n": p.n,
        "free_rank": free_rank,
        "torsion": list(torsion),
        "basis_size": len(p.basis),
        "relation_rows": len(p.relations),
    }
    if cache_path:
        payload["cache_file"] = cache_path
    lines = [
        f"free_rank: {free_rank}, torsion: {list(torsion)}, "
        f"basis: {len(p.basis)}, relations: {len(p.relations)}"
    ]
    if cache_path:
        lines.append(f"cache: {cache_path}")
    _emit(cfg, payload, lines)
    return 0


def cmd_class(args, cfg: Config) -> int:
    act = models.action_from_json(_read_json(args.action))
    cv = models.class_b(act)
    payload = symb.classvector_to_json(cv)
    _emit(cfg, payload, [str(cv)])
    return 0


def _load_class_vector(path: str) -> ClassVector:
    return symb.classvector_from_json(_read_json(path))


def cmd_eq(args, cfg: Config) -> int:
    p, _ = _build_presentation(args, cfg)
    u = _load_class_vector(args.lhs)
    v = _load_class_vector(args.rhs)
    res = burncalc.class_eq(p, u, v)
    payload = {"schema": 1, "verdict": res.verdict}
    lines = ["Equal" if res.equal else "Distinct"]
    if res.equal:
        payload["certificate"] = {
            "relation_coefficients": {str(i): c for i, c in sorted(res.coefficients.items())}
        }
        lines.append(
            "certificate: relation rows "
            + ", ".join(f"{i}:{c}" for i, c in sorted(res.coefficients.items()))
        )
    else:
        payload["certificate"] = {
            "snf_image": [
                {"coordinate": i, "value": v_, "modulus": m}
                for i, v_, m in res.snf_image
            ]
        }
        lines.append(
            "certificate: nonzero quotient coordinates "
            + ", ".join(
                f"{i}={v_}" + (f" (mod {m})" if m else "") for i, v_, m in res.snf_image
            )
        )
    _emit(cfg, payload, lines)
    return 0 if res.equal else 1


def cmd_blowup(args, cfg: Config) -> int:
    act = models.action_from_json(_read_json(args.action))
    tau = tuple(int(t) for t in args.cone.split(",") if t != "")
    blown = models.star_subdivide(act, tau)
    before = models.class_b(act)
    after = models.class_b(blown)
    p = burncalc.present_b(act.group, act.fan.dim, basis_cap=cfg.cap_basis, row_cap=cfg.cap_rows)
    res = burncalc.class_eq(p, before, after)
    payload = {
        "schema": 1,
        "action": models.action_to_json(blown),
        "class_before": symb.classvector_to_json(before),
        "class_after": symb.classvector_to_json(after),
        "verdict": res.verdict,
    }
    lines = [
        f"class_before: {before}",
        f"class_after: {after}",
        "verdict: " + ("Equal" if res.equal else "Distinct"),
        "action: " + json.dumps(models.action_to_json(blown), sort_keys=True, separators=(",", ":")),
    ]
    _emit(cfg, payload, lines)
    return 0 if res.equal else 1


def cmd_det(args, cfg: Config) -> int:
    act = models.action_from_json(_read_json(args.action))
    cv = models.class_b(act)
    points = []
    classes = set()
    for s, coeff in cv.items():
        w = wedge_det(list(s.beta))
        points.append(
            {
                "beta": [list(c.coords) for c in s.beta],
                "multiplicity": coeff,
                "det": str(w),
                "zero": w.is_zero(),
            }
        )
        if not w.is_zero():
            classes.add(str(w))
    payload = {
        "schema": 1,
        "fixed_components": points,
        "sign_classes": sorted(classes),
        "consistent": len(classes) <= 1,
    }
    lines = [
        f"fixed_components: {len(points)}, sign_classes: "
        + (", ".join(sorted(classes)) if classes else "all zero")
    ]
    for pt in points:
        lines.append(f"beta {pt['beta']}: det {pt['det']}")
    _emit(cfg, payload, lines)
    return 0


def cmd_vanish(args, cfg: Config) -> int:
    s = symb.symbol_from_json(_read_json(args.symbol))
    contains_zero = symb.vanish_V(s)
    try:
        sumzero = symb.vanish_sumzero(s)
        sumzero_note = None
    except symb.TooLong as exc:
        sumzero = None
        sumzero_note = str(exc)
    payload = {"schema": 1, "contains_zero": contains_zero, "sumzero": sumzero}
    lines = [f"contains_zero: {str(contains_zero).lower()}, sumzero: "
             + (str(sumzero).lower() if sumzero is not None else "skipped")]
    if sumzero_note:
        payload["sumzero_note"] = sumzero_note
    if isinstance(s, KSymbol):
        stable = symb.vanish_stable(s)
        payload["stable_range"] = stable
        lines.append(f"stable_range: {str(stable).lower()}")
    _emit(cfg, payload, lines)
    return 0


def cmd_compress(args, cfg: Config) -> int:
    s = symb.symbol_from_json(_read_json(args.symbol))
    if isinstance(s, KSymbol):
        s = symb.forget_K(s)
    witnesses = symb.compress_witnesses(s)
    payload = {
        "schema": 1,
        "witnesses": [
            {"parent": symb.symbol_to_json(parent), "pair": list(pair)}
            for parent, pair in witnesses
        ],
        "incompressible_combinatorially": not witnesses,
    }
    lines = [f"witnesses: {len(witnesses)}, incompressible: "
             + ("yes" if not witnesses else "no")]
    for parent, pair in witnesses:
        lines.append(f"parent {parent} at pair {pair}")
    _emit(cfg, payload, lines)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equiburn",
        description="Exact calculator for equivariant Burnside groups",
    )
    parser.add_argument("--cache", help="presentation cache directory")
    parser.add_argument(
        "--format", choices=("json", "text"), default="json", help="output format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("present", help="present a symbol group")
    p.add_argument("--group", required=True, help="group literal file")
    p.add_argument("--n", type=int, required=True, help="ambient dimension")
    p.add_argument("--flavor", choices=("b", "bc"), required=True)
    p.add_argument("--filter", help="stabilizer-pair filter file (bc only)")
    p.set_defaults(func=cmd_present)

    p = sub.add_parser("class", help="class of a toric action")
    p.add_argument("--action", required=True, help="action file")
    p.set_defaults(func=cmd_class)

    p = sub.add_parser("eq", help="decide equality of two classes")
    p.add_argument("--group", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--flavor", choices=("b", "bc"), required=True)
    p.add_argument("--filter")
    p.add_argument("--lhs", required=True, help="left class file")
    p.add_argument("--rhs", required=True, help="right class file")
    p.set_defaults(func=cmd_eq)

    p = sub.add_parser("blowup", help="star-subdivide and compare classes")
    p.add_argument("--action", required=True)
    p.add_argument("--cone", required=True, help="comma-separated ray indices")
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("det", help="determinant classes of the fixed locus")
    p.add_argument("--action", required=True)
    p.set_defaults(func=cmd_det)

    p = sub.add_parser("vanish", help="vanishing report for a symbol")
    p.add_argument("--symbol", required=True)
    p.set_defaults(func=cmd_vanish)

    p = sub.add_parser("compress", help="blow-up parents of a divisor symbol")
    p.add_argument("--symbol", required=True)
    p.set_defaults(func=cmd_compress)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = Config(cache_dir=args.cache, fmt=args.format)
    try:
        return args.func(args, cfg)
    except (ValueError, RuntimeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
