"""Command-line front end.

Every subcommand writes one JSON document (or a Markdown rendering of it).
Documents carry a ``kind`` and a ``checks`` table; ``proetale check`` reruns
the checks on any emitted document.

Exit codes: 0 success, 2 validation failure, 3 size cap exceeded, 4 parse error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Any, Callable

from . import finspace, io
from .category import SizeCapError
from .cohomology import (Coefficients, cochain_complex, cohomology_table, group_cohomology_oracle,
                         verdier_colimit)
from .finspace import SpaceMap
from .groups import FiniteGroup, GroupTableError
from .homotopy_type import (GaloisSystem, classifying_space, check_isomorphism, edge_path_presentation,
                            nerve, pi0, pi1_edge_path, pi_of_hypercovering, todd_coxeter, underlying)
from .simplicial import check_reduced_homotopy, nondegenerate_decomposition, validate, validate_map
from .site import (GSetSite, check_hypercovering, homotopy_between, is_split_wc, map_from_split_wc,
                   refine_to_split_wc)

EXIT_OK, EXIT_INVALID, EXIT_CAP, EXIT_PARSE = 0, 2, 3, 4


class CapNotice(Exception):
    """A partial result was produced because a level exceeded the size cap."""

    def __init__(self, doc: dict):
        super().__init__(doc.get("truncated", "size cap exceeded"))
        self.doc = doc


def _finish(kind: str, checks: dict, **fields) -> dict:
    doc = {"kind": kind, "checks": {k: bool(v) for k, v in checks.items()}}
    failures = {k: v.reason for k, v in checks.items() if not v and getattr(v, "reason", None)}
    if failures:
        doc["diagnostics"] = failures
    doc["ok"] = all(doc["checks"].values())
    doc.update(fields)
    return doc


# -- bg -------------------------------------------------------------------------------

def cmd_bg(args) -> dict:
    g = io.group_from_json(io.load(args.input))
    return bg_document(g, args.dim, args.cap)


def bg_document(g: FiniteGroup, d: int, cap: int | None = None) -> dict:
    bg = classifying_space(g, d, cap)
    b = bg.simplicial
    nondeg = [len(nondegenerate_decomposition(b, n).nondegenerate) for n in range(d + 1)]
    space, _ = pi0(b) if d >= 1 else (None, None)
    fields = {
        "group": g.to_json(), "dim": d, "levels": b.sizes(), "nondegenerate": nondeg,
        "simplicial": io.simp_to_json(b),
        "nerve_isomorphism": io.simp_map_to_json(bg.certificate),
    }
    if space is not None:
        fields["pi0"] = io.space_to_json(space)
    if d >= 2:
        res = pi1_edge_path(underlying(b), b.elements(0)[0])
        fields["pi1"] = dict(res.to_json(), relator_words=[list(w) for w in res.relators])
    return _finish("bg", _bg_checks(g, b, bg.certificate), **fields)


def _bg_checks(g, b, cert) -> dict:
    return {"simplicial": validate(b), "nerve_isomorphism": check_isomorphism(cert)}


def _check_bg(doc) -> dict:
    g = io.group_from_json(doc["group"])
    b = io.simp_from_json(doc["simplicial"])
    target = nerve(g, b.dim)
    cert = io.simp_map_from_json(doc["nerve_isomorphism"], underlying(b), target)
    checks = _bg_checks(g, b, cert)
    checks["levels"] = b.sizes() == doc["levels"]
    return checks


# -- cohomology ------------------------------------------------------------------------

def cmd_cohomology(args) -> dict:
    data = io.load(args.input)
    coeffs = _coefficients(args.coeff)
    if isinstance(data, dict) and "groups" in data:
        return system_cohomology_document(data, coeffs, args.pmax)
    return cohomology_document(io.group_from_json(data), coeffs, args.pmax, args.cap)


def _coefficients(text: str) -> Coefficients:
    try:
        return Coefficients.parse(text)
    except ValueError as exc:
        raise io.ParseError(str(exc)) from None


def _system_from_json(data) -> GaloisSystem:
    groups = {name: io.group_from_json(g) for name, g in data["groups"].items()}
    quotients = {}
    for q in data.get("quotients", ()):
        quotients[(q["from"], q["to"])] = [int(v) for v in q["map"]]
    unknown = {i for pair in quotients for i in pair} - set(groups)
    if unknown:
        raise io.ParseError(f"quotients mention unknown groups {sorted(unknown)}")
    system = GaloisSystem.build(groups, quotients)
    v = system.check()
    if not v:
        raise ValueError(f"invalid Galois system: {v.reason}")
    return system


def cohomology_document(g: FiniteGroup, coeffs: Coefficients, p_max: int, cap: int | None = None) -> dict:
    truncated = None
    top = p_max
    bg = None
    while top >= 0:
        try:
            bg = classifying_space(g, top + 1, cap)
            break
        except SizeCapError as exc:
            truncated = f"degrees above {top - 1} omitted: {exc}"
            top -= 1
    rows = []
    if bg is not None:
        cx = cochain_complex(GSetSite(g, cap=None), bg.hypercovering, coeffs, top)
        for h in cohomology_table(cx, top):
            row = h.to_json()
            try:
                row["oracle_match"] = group_cohomology_oracle(g, coeffs, h.degree).group == h.group
            except SizeCapError:
                row["oracle_match"] = None
            row["group"] = str(h.group)
            rows.append(row)
    checks = {f"H^{r['p']}": r["oracle_match"] is not False for r in rows}
    doc = _finish("cohomology", checks, group=g.to_json(), coefficients=str(coeffs), pmax=p_max, rows=rows)
    if truncated:
        doc["truncated"] = truncated
        raise CapNotice(doc)
    return doc


def system_cohomology_document(data: dict, coeffs: Coefficients, p_max: int) -> dict:
    system = _system_from_json(data)
    rows = []
    for p in range(p_max + 1):
        rep = verdier_colimit(system, coeffs, p)
        row = rep.to_json()
        row["group"] = str(rep.colimit.group)
        rows.append(row)
    return _finish("cohomology", {"system": system.check()}, system=data, coefficients=str(coeffs),
                   pmax=p_max, rows=rows)


def _check_cohomology(doc) -> dict:
    coeffs = _coefficients(doc["coefficients"])
    if "system" in doc:
        fresh = system_cohomology_document(doc["system"], coeffs, doc["pmax"])
        return {"system": fresh["ok"], "recomputed": fresh["rows"] == doc["rows"]}
    fresh = cohomology_document(io.group_from_json(doc["group"]), coeffs, len(doc["rows"]) - 1)
    return {"recomputed": fresh["rows"] == doc["rows"],
            "oracle": all(r["oracle_match"] is not False for r in doc["rows"])}


# -- refinement, homotopies, lifts ------------------------------------------------------

def cmd_refine(args) -> dict:
    site, h = io.hypercovering_from_json(io.load(args.input), args.cap)
    v = check_hypercovering(site, h)
    if not v:
        return _finish("refinement", {"hypercovering": v}, site=io.site_to_json(site))
    w, phi = refine_to_split_wc(site, h, args.dim)
    return _finish("refinement", _refinement_checks(site, h, w, phi), site=io.site_to_json(site),
                   hypercovering=io.simp_to_json(h), refinement=io.simp_to_json(w),
                   map=io.simp_map_to_json(phi), levels=w.sizes())


def _refinement_checks(site, h, w, phi) -> dict:
    return {"hypercovering": check_hypercovering(site, h), "refinement": check_hypercovering(site, w),
            "split_wc": is_split_wc(site, w), "map": validate_map(phi)}


def _check_refinement(doc, cap) -> dict:
    site = io.site_from_json(doc["site"], cap)
    h = io.simp_from_json(doc["hypercovering"], site)
    w = io.simp_from_json(doc["refinement"], site)
    from .simplicial import skeleton
    phi = io.simp_map_from_json(doc["map"], w, skeleton(h, w.dim))
    return _refinement_checks(site, h, w, phi)


def cmd_homotopy(args) -> dict:
    """Two maps from a split wc refinement into the input, built with different
    tie-breaks, and a reduced homotopy between them."""
    site, u = io.hypercovering_from_json(io.load(args.input), args.cap)
    v = check_hypercovering(site, u)
    if not v:
        return _finish("homotopy", {"hypercovering": v}, site=io.site_to_json(site))
    w, _ = refine_to_split_wc(site, u, args.dim)
    f = map_from_split_wc(site, w, u)
    g = map_from_split_wc(site, w, u, random.Random(args.seed))
    r = homotopy_between(site, f, g)
    return _finish("homotopy", _homotopy_checks(site, w, r), site=io.site_to_json(site),
                   source=io.simp_to_json(w), target=io.simp_to_json(r.f.target),
                   homotopy=io.reduced_homotopy_to_json(r))


def _homotopy_checks(site, w, r) -> dict:
    return {"source": check_hypercovering(site, w), "split_wc": is_split_wc(site, w),
            "f": validate_map(r.f), "g": validate_map(r.g), "reduced_homotopy": check_reduced_homotopy(r)}


def _check_homotopy(doc, cap) -> dict:
    site = io.site_from_json(doc["site"], cap)
    w = io.simp_from_json(doc["source"], site)
    u = io.simp_from_json(doc["target"], site)
    r = io.reduced_homotopy_from_json(doc["homotopy"], w, u)
    return _homotopy_checks(site, w, r)


def cmd_lift(args) -> dict:
    data = io.load(args.input)
    site = io.site_from_json(data["site"], args.cap)
    w, x, u = (io.object_from_json(site, data[k]) for k in ("w", "x", "u"))
    f, p = io.decode_map(data["f"]), io.decode_map(data["p"])
    pre = {"f": site.is_morphism(w, x, f), "covering": site.is_covering(u, x, p), "wc": site.is_wc(w)}
    fields = {k: data[k] for k in ("site", "w", "x", "u", "f", "p")}
    if not all(pre.values()):
        return _finish("lift", pre, **fields)
    g = site.lift(w, f, u, p, random.Random(args.seed) if args.seed is not None else None)
    fields["lift"] = io.encode_map(g, w.elements)
    return _finish("lift", _lift_checks(site, w, x, u, f, p, g), **fields)


def _lift_checks(site, w, x, u, f, p, g) -> dict:
    return {"f": site.is_morphism(w, x, f), "covering": site.is_covering(u, x, p), "wc": site.is_wc(w),
            "morphism": site.is_morphism(w, u, g), "commutes": all(p[g[e]] == f[e] for e in w.elements)}


def _check_lift(doc, cap) -> dict:
    site = io.site_from_json(doc["site"], cap)
    w, x, u = (io.object_from_json(site, doc[k]) for k in ("w", "x", "u"))
    return _lift_checks(site, w, x, u, io.decode_map(doc["f"]), io.decode_map(doc["p"]),
                        io.decode_map(doc["lift"]))


def _check_hypercovering_doc(doc, cap) -> dict:
    site, h = io.hypercovering_from_json(doc, cap)
    return {"hypercovering": check_hypercovering(site, h)}


# -- pi0, pi1 ---------------------------------------------------------------------------

def _simplicial_input(data, dim: int | None, cap: int | None, need: int):
    """A simplicial set from a group (its classifying space), a hypercovering
    (components of its split wc refinement) or a simplicial set document."""
    if isinstance(data, dict) and "mul" in data:
        d = max(need, dim if dim is not None else need)
        return classifying_space(io.group_from_json(data), d, cap).simplicial, "group"
    if isinstance(data, dict) and "site" in data:
        site, h = io.hypercovering_from_json(data, cap)
        v = check_hypercovering(site, h)
        if not v:
            raise ValueError(f"input is not a hypercovering: {v.reason}")
        w, _ = refine_to_split_wc(site, h, dim)
        return pi_of_hypercovering(site, w), "hypercovering"
    return io.simp_from_json(data), "simplicial"


def cmd_pi0(args) -> dict:
    data = io.load(args.input)
    x, source = _simplicial_input(data, args.dim, args.cap, 1)
    space, q = pi0(x)
    return _finish("pi0", {"simplicial": validate(x), "continuous": q.is_continuous()}, input=source,
                   simplicial=io.simp_to_json(x), pi0=io.space_to_json(space),
                   quotient=io.encode_map(q.assignment, q.source.points), points=len(space))


def _check_pi0(doc) -> dict:
    x = io.simp_from_json(doc["simplicial"])
    space, q = pi0(x)
    return {"simplicial": validate(x), "continuous": q.is_continuous(),
            "recomputed": io.space_to_json(space) == doc["pi0"]
            and io.encode_map(q.assignment, q.source.points) == doc["quotient"]}


def cmd_pi1(args) -> dict:
    data = io.load(args.input)
    x, source = _simplicial_input(data, args.dim, args.cap, 2)
    x = underlying(x)
    base = io.decode_label(args.basepoint) if args.basepoint is not None else x.elements(0)[0]
    if base not in x.levels[0].base:
        raise io.ParseError(f"basepoint {base!r} is not a vertex")
    res = pi1_edge_path(x, base)
    checks = {"simplicial": validate(x), "decided": res.status == "finite"}
    if res.group is not None:
        checks["table"] = True
    return _finish("pi1", checks, input=source, basepoint=io.encode_label(base),
                   pi1=dict(res.to_json(), relator_words=[list(w) for w in res.relators]))


def _check_pi1(doc) -> dict:
    p = doc["pi1"]
    checks = {"decided": p["status"] == "finite"}
    if p["status"] == "finite":
        rels = [tuple(w) for w in p["relator_words"]]
        if p["generators"] == 0:
            checks["order"] = p["order"] == 1
        else:
            table = todd_coxeter(p["generators"], rels, max(50 * 5000, 100000))
            checks["order"] = table is not None and len(table) == p["order"]
        if "table" in p:
            try:
                FiniteGroup(tuple(tuple(r) for r in p["table"]))
                checks["table"] = len(p["table"]) == p["order"]
            except GroupTableError:
                checks["table"] = False
    return checks


# -- finite spaces -----------------------------------------------------------------------

def cmd_components(args) -> dict:
    x = io.space_from_json(io.load(args.input))
    return components_document(x)


def components_document(x) -> dict:
    c, q = finspace.components(x)
    checks = {"continuous": q.is_continuous(), "surjective": q.is_surjective(),
              "totally_disconnected_target": finspace.is_totally_disconnected(c)}
    return _finish("components", checks, space=io.space_to_json(x), components=io.space_to_json(c),
                   quotient=io.encode_map(q.assignment, x.points),
                   totally_disconnected=finspace.is_totally_disconnected(x),
                   extremally_disconnected=finspace.is_extremally_disconnected(x))


def _check_components(doc) -> dict:
    fresh = components_document(io.space_from_json(doc["space"]))
    return dict(fresh["checks"], recomputed=all(fresh[k] == doc[k] for k in ("components", "quotient")))


def cmd_fibreproduct(args) -> dict:
    data = io.load(args.input)
    return fibre_product_document(io.space_from_json(data["P"]), io.space_from_json(data["S"]),
                                  io.decode_map(data["f"]))


def fibre_product_document(p, s, f_assign) -> dict:
    cs, _ = finspace.components(s)
    f = SpaceMap(p, cs, f_assign)
    fp, to_p, to_s = finspace.fibre_product_over_components(p, f, s)
    checks = {"projections": to_p.is_continuous() and to_s.is_continuous()}
    if finspace.is_totally_disconnected(p):
        cfp, _ = finspace.components(fp)
        checks["components_match_P"] = finspace.find_homeomorphism(cfp, p) is not None
    return _finish("fibreproduct", checks, P=io.space_to_json(p), S=io.space_to_json(s),
                   f=io.encode_map(f_assign, p.points), product=io.space_to_json(fp),
                   projections={"P": io.encode_map(to_p.assignment, fp.points),
                                "S": io.encode_map(to_s.assignment, fp.points)})


def _check_fibreproduct(doc) -> dict:
    fresh = fibre_product_document(io.space_from_json(doc["P"]), io.space_from_json(doc["S"]),
                                   io.decode_map(doc["f"]))
    return dict(fresh["checks"], recomputed=all(fresh[k] == doc[k] for k in ("product", "projections")))


# -- check ------------------------------------------------------------------------------

def cmd_check(args) -> dict:
    doc = io.load(args.input)
    if not isinstance(doc, dict):
        raise io.ParseError("expected a JSON object")
    kind = doc.get("kind", "hypercovering" if "site" in doc else None)
    checkers: dict[str, Callable[[Any], dict]] = {
        "bg": _check_bg, "cohomology": _check_cohomology, "pi0": _check_pi0, "pi1": _check_pi1,
        "components": _check_components, "fibreproduct": _check_fibreproduct,
        "refinement": lambda d: _check_refinement(d, args.cap),
        "homotopy": lambda d: _check_homotopy(d, args.cap),
        "lift": lambda d: _check_lift(d, args.cap),
        "hypercovering": lambda d: _check_hypercovering_doc(d, args.cap),
    }
    if kind not in checkers:
        raise io.ParseError(f"cannot check a document of kind {kind!r}")
    if kind != "hypercovering" and not doc.get("ok", False):
        return _finish("check", {"document": False}, checked=kind)
    try:
        checks = checkers[kind](doc)
    except (KeyError, TypeError) as exc:
        raise io.ParseError(f"incomplete {kind} document: {exc}") from None
    return _finish("check", checks, checked=kind)


# -- output -----------------------------------------------------------------------------

def to_markdown(doc: dict) -> str:
    """Render a result document; scalar fields become a table, ``rows`` a
    second table and anything else a fenced JSON block."""
    lines = [f"## {doc.get('kind', 'result')}", ""]
    scalars = {k: v for k, v in doc.items() if _is_scalar(v)
               or (isinstance(v, list) and all(_is_scalar(e) for e in v))}
    lines += ["| field | value |", "| --- | --- |"]
    lines += [f"| {k} | {_cell(v)} |" for k, v in sorted(scalars.items())]
    lines.append("")
    if doc.get("checks"):
        lines += ["| check | passed |", "| --- | --- |"]
        lines += [f"| {k} | {_cell(v)} |" for k, v in sorted(doc["checks"].items())]
        lines.append("")
    rows = doc.get("rows")
    if rows and all(isinstance(r, dict) for r in rows):
        cols = sorted({c for r in rows for c in r if not isinstance(r[c], dict)})
        lines += ["| " + " | ".join(cols) + " |", "|" + " --- |" * len(cols)]
        lines += ["| " + " | ".join(_cell(r.get(c)) for c in cols) + " |" for r in rows]
        lines.append("")
    rest = {k: v for k, v in doc.items() if k not in scalars and k not in ("checks", "rows")}
    for k in sorted(rest):
        lines += [f"### {k}", "", "```json", json.dumps(rest[k], sort_keys=True), "```", ""]
    return "\n".join(lines)


def _is_scalar(v) -> bool:
    return v is None or isinstance(v, (str, int, float, bool))


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, list):
        return "[" + ", ".join(str(e) for e in v) + "]"
    return str(v)


def _emit(doc: dict, args) -> None:
    text = to_markdown(doc) if args.format == "markdown" else io.dumps(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


COMMANDS = {
    "bg": (cmd_bg, "classifying space of a finite group with its nerve certificate"),
    "cohomology": (cmd_cohomology, "cohomology of B(G) or of a Galois system, with oracle comparison"),
    "refine": (cmd_refine, "split weakly contractible refinement of a hypercovering"),
    "check": (cmd_check, "re-validate a document emitted by another subcommand"),
    "lift": (cmd_lift, "lift a map from a weakly contractible object along a covering"),
    "homotopy": (cmd_homotopy, "reduced homotopy between two maps out of a split wc refinement"),
    "pi0": (cmd_pi0, "space of simplicial components"),
    "pi1": (cmd_pi1, "edge-path group by coset enumeration"),
    "components": (cmd_components, "space of components of a finite space"),
    "fibreproduct": (cmd_fibreproduct, "fibre product of P and S over the components of S"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proetale", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("input", help="input JSON file")
        sp.add_argument("--dim", type=int, default=None, help="truncation level")
        sp.add_argument("--pmax", type=int, default=3, help="highest cohomological degree")
        sp.add_argument("--coeff", default="Z", help="coefficients: Z, Z/n or 0")
        sp.add_argument("--format", choices=("json", "markdown"), default="json")
        sp.add_argument("--cap", type=int, default=None, help="maximum elements per level")
        sp.add_argument("--seed", type=int, default=None, help="seed for randomized tie-breaks")
        sp.add_argument("--output", "-o", default=None, help="write here instead of stdout")
        if name == "pi1":
            sp.add_argument("--basepoint", type=_json_label, default=None, help="vertex label (JSON)")
    return parser


def _json_label(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _validate_args(args) -> None:
    if args.cap is not None and args.cap <= 0:
        raise io.ParseError("--cap must be positive")
    if args.dim is not None and args.dim < 0:
        raise io.ParseError("--dim must be non-negative")
    if args.pmax < 0:
        raise io.ParseError("--pmax must be non-negative")
    if args.command == "cohomology" and args.dim is not None and args.dim < args.pmax + 1:
        raise io.ParseError(f"--dim {args.dim} is too small for --pmax {args.pmax}; need {args.pmax + 1}")
    if args.command == "bg" and args.dim is None:
        args.dim = 3
    if args.command == "homotopy" and args.seed is None:
        args.seed = 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _validate_args(args)
        doc = COMMANDS[args.command][0](args)
    except CapNotice as notice:
        _emit(notice.doc, args)
        print(f"error: {notice}", file=sys.stderr)
        return EXIT_CAP
    except SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (io.ParseError, GroupTableError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(doc, args)
    return EXIT_OK if doc["ok"] else EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
