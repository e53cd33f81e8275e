"""JSON encodings for groups, spaces, site objects, simplicial objects and maps.

Point labels are nested tuples of ints and strings; JSON has no tuples, so
labels are written with lists and every list is read back as a tuple.
Maps are written as ``[[x, f(x)], ...]`` pair lists in element order.
"""
from __future__ import annotations

import json
from typing import Any, Mapping

from .category import SETS, SiteObject, ordered
from .finspace import SPACES, FiniteSpace, SpaceMap
from .groups import FiniteGroup, GroupTableError
from .simplicial import ReducedHomotopy, SimpMap, TruncSimp, make_simp
from .site import FiniteSite, GSetSite, SliceSite


class ParseError(ValueError):
    """Malformed input document."""


def dumps(doc: Any) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    except OSError as exc:
        raise ParseError(str(exc)) from None


def encode_label(x):
    if isinstance(x, tuple):
        return [encode_label(e) for e in x]
    return x


def decode_label(x):
    if isinstance(x, list):
        return tuple(decode_label(e) for e in x)
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return x
    raise ParseError(f"unsupported label {x!r}")


def encode_map(mapping: Mapping, domain) -> list:
    return [[encode_label(x), encode_label(mapping[x])] for x in domain]


def decode_map(pairs) -> dict:
    try:
        return {decode_label(a): decode_label(b) for a, b in pairs}
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad map table: {exc}") from None


def _need(data, field: str, what: str):
    if not isinstance(data, dict) or field not in data:
        raise ParseError(f"{what} needs a {field!r} field")
    return data[field]


# -- groups and spaces -------------------------------------------------------------

def group_from_json(data) -> FiniteGroup:
    return FiniteGroup.from_json(data)


def space_to_json(x: FiniteSpace) -> dict:
    return {"points": [encode_label(p) for p in x.points],
            "leq": [[encode_label(a), encode_label(b)] for a, b in x.relation() if a != b]}


def space_from_json(data) -> FiniteSpace:
    pts = [decode_label(p) for p in _need(data, "points", "space")]
    try:
        leq = [(decode_label(a), decode_label(b)) for a, b in data.get("leq", ())]
        return FiniteSpace.from_relation(pts, leq)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad space: {exc}") from None


def space_map_to_json(f: SpaceMap) -> dict:
    return {"source": space_to_json(f.source), "target": space_to_json(f.target),
            "assignment": encode_map(f.assignment, f.source.points)}


def space_map_from_json(data) -> SpaceMap:
    return SpaceMap(space_from_json(_need(data, "source", "space map")),
                    space_from_json(_need(data, "target", "space map")),
                    decode_map(_need(data, "assignment", "space map")))


# -- sites and their objects -------------------------------------------------------

def site_to_json(site: FiniteSite) -> dict:
    if isinstance(site, SliceSite):
        return {"kind": "slice", "base": [encode_label(b) for b in site.base_points]}
    return {"kind": "gset", "group": site.group.to_json()}


def site_from_json(data, cap: int | None = None) -> FiniteSite:
    kind = _need(data, "kind", "site")
    kw = {} if cap is None else {"cap": cap}
    if kind == "gset":
        return GSetSite(group_from_json(_need(data, "group", "G-set site")), **kw)
    if kind == "slice":
        return SliceSite([decode_label(b) for b in _need(data, "base", "slice site")], **kw)
    raise ParseError(f"unknown site kind {kind!r}")


def object_to_json(obj: SiteObject) -> dict:
    out: dict = {"elements": [encode_label(x) for x in obj.elements]}
    if not obj.group.is_trivial():
        out["action"] = {str(g): [encode_label(obj.action[g][x]) for x in obj.elements]
                         for g in obj.group.elements}
    bases = {obj.base[x] for x in obj.elements}
    if bases != {()}:
        out["over"] = [encode_label(obj.base[x]) for x in obj.elements]
    return out


def object_from_json(site: FiniteSite, data) -> SiteObject:
    elems = [decode_label(x) for x in _need(data, "elements", "object")]
    if len(set(elems)) != len(elems):
        raise ParseError("object has repeated elements")
    pos = {x: i for i, x in enumerate(elems)}
    act = None
    if not site.group.is_trivial():
        table = _need(data, "action", "G-set")
        try:
            perms = {int(g): [decode_label(y) for y in row] for g, row in table.items()}
        except (AttributeError, ValueError) as exc:
            raise ParseError(f"bad action table: {exc}") from None
        if set(perms) != set(site.group.elements) or any(len(r) != len(elems) for r in perms.values()):
            raise ParseError("action needs one full permutation per group element")
        act = lambda g, x: perms[g][pos[x]]
    over = None
    if "over" in data:
        ov = [decode_label(b) for b in data["over"]]
        if len(ov) != len(elems):
            raise ParseError("'over' must list one base point per element")
        over = lambda x: ov[pos[x]]
    try:
        obj = site.make(elems, act=act, over=over)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad object: {exc}") from None
    _check_action(site, obj)
    return obj


def _check_action(site: FiniteSite, obj: SiteObject) -> None:
    g = site.group
    for a in g.elements:
        for x in obj.elements:
            y = obj.action[a][x]
            if y not in obj.base:
                raise ParseError(f"action sends {x!r} outside the object")
            if obj.base[y] != obj.base[x]:
                raise ParseError(f"action moves {x!r} to another base point")
            for b in g.elements:
                if obj.action[g.m(a, b)][x] != obj.action[a][obj.action[b][x]]:
                    raise ParseError("action table is not a group action")
    for x in obj.elements:
        if obj.base[x] not in site.base_points:
            raise ParseError(f"{x!r} lies over unknown base point {obj.base[x]!r}")


# -- simplicial objects ------------------------------------------------------------

def simp_to_json(x: TruncSimp) -> dict:
    levels = []
    for lvl in x.levels:
        if isinstance(lvl, FiniteSpace):
            levels.append(space_to_json(lvl))
        else:
            levels.append(object_to_json(lvl))
    out = {
        "levels": levels,
        "faces": [[[encode_label(f[e]) for e in x.elements(n)] for f in x.faces[n]] for n in range(1, x.dim + 1)],
        "degeneracies": [[[encode_label(s[e]) for e in x.elements(n)] for s in x.degens[n]] for n in range(x.dim)],
    }
    if x.coskeletal_above is not None:
        out["coskeletal_above"] = x.coskeletal_above
    return out


def simp_from_json(data, site: FiniteSite | None = None) -> TruncSimp:
    """Levels are site objects when ``site`` is given, bare sets or spaces otherwise."""
    raw = _need(data, "levels", "simplicial object")
    if not raw:
        raise ParseError("simplicial object needs at least one level")
    if site is not None:
        levels = [object_from_json(site, l) for l in raw]
        cat = site
    elif all("points" in l for l in raw):
        levels = [space_from_json(l) for l in raw]
        cat = SPACES
    else:
        levels = [SETS.make(decode_label(e) for e in _need(l, "elements", "level")) for l in raw]
        cat = SETS
    d = len(levels) - 1
    faces_raw = data.get("faces", [])
    degens_raw = data.get("degeneracies", [])
    if len(faces_raw) != d or len(degens_raw) != d:
        raise ParseError(f"{d + 1} levels need {d} face and {d} degeneracy blocks")

    def table(n, rows, count, what):
        if len(rows) != count:
            raise ParseError(f"level {n} needs {count} {what} maps, got {len(rows)}")
        elems = levels[n].elements if isinstance(levels[n], SiteObject) else levels[n].points
        out = []
        for row in rows:
            if len(row) != len(elems):
                raise ParseError(f"{what} table on level {n} has {len(row)} entries for {len(elems)} elements")
            out.append({e: decode_label(v) for e, v in zip(elems, row)})
        return tuple(out)

    faces = [table(n + 1, faces_raw[n], n + 2, "face") for n in range(d)]
    degens = [table(n, degens_raw[n], n + 1, "degeneracy") for n in range(d)]
    return make_simp(levels, faces, degens, cat, data.get("coskeletal_above"))


def hypercovering_to_json(site: FiniteSite, h: TruncSimp) -> dict:
    lvl0 = h.levels[0]
    return {"site": site_to_json(site), "simplicial": simp_to_json(h),
            "augmentation": [encode_label(lvl0.base[x]) for x in lvl0.elements]}


def hypercovering_from_json(data, cap: int | None = None) -> tuple[FiniteSite, TruncSimp]:
    site = site_from_json(_need(data, "site", "hypercovering"), cap)
    h = simp_from_json(_need(data, "simplicial", "hypercovering"), site)
    if "augmentation" in data:
        aug = [decode_label(b) for b in data["augmentation"]]
        lvl0 = h.levels[0]
        if aug != [lvl0.base[x] for x in lvl0.elements]:
            raise ParseError("augmentation disagrees with the base map of level 0")
    return site, h


def simp_map_to_json(f: SimpMap) -> dict:
    return {"maps": [encode_map(m, f.source.elements(n)) for n, m in enumerate(f.maps)]}


def simp_map_from_json(data, source: TruncSimp, target: TruncSimp) -> SimpMap:
    maps = tuple(decode_map(m) for m in _need(data, "maps", "simplicial map"))
    if len(maps) != source.dim + 1:
        raise ParseError(f"map needs {source.dim + 1} levels, got {len(maps)}")
    return SimpMap(source, target, maps)


def reduced_homotopy_to_json(r: ReducedHomotopy) -> dict:
    w = r.f.source
    return {"f": simp_map_to_json(r.f), "g": simp_map_to_json(r.g),
            "r": [[encode_map(ri, w.elements(n)) for ri in lvl] for n, lvl in enumerate(r.r)]}


def reduced_homotopy_from_json(data, source: TruncSimp, target: TruncSimp) -> ReducedHomotopy:
    f = simp_map_from_json(_need(data, "f", "reduced homotopy"), source, target)
    g = simp_map_from_json(_need(data, "g", "reduced homotopy"), source, target)
    r = tuple(tuple(decode_map(ri) for ri in lvl) for lvl in _need(data, "r", "reduced homotopy"))
    return ReducedHomotopy(f, g, r)


def labels(xs) -> list:
    return [encode_label(x) for x in ordered(xs)]
