"""Polytope serialisation: versioned JSON with exact ``p/q`` strings, OFF meshes."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .hull import Facet, VPolytope, facet_cycles
from .linalg import format_rational, parse_rational

FORMAT = "subgraph-polytopes/polytope"
VERSION = 1


def polytope_to_dict(poly: VPolytope, meta: dict | None = None) -> dict:
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "dim": poly.dim,
        "vertices": [[format_rational(x) for x in v] for v in poly.vertices],
    }
    if poly.witnesses:
        doc["witnesses"] = {str(i): list(w) for i, w in sorted(poly.witnesses.items())}
    if poly.facets is not None:
        doc["facets"] = [
            {
                "normal": [format_rational(x) for x in f.normal],
                "offset": format_rational(f.offset),
                "incident_vertices": list(f.incident),
            }
            for f in poly.facets
        ]
    if meta:
        doc["meta"] = meta
    return doc


def polytope_from_dict(doc: dict) -> VPolytope:
    if doc.get("format") != FORMAT:
        raise ValueError(f"not a polytope document (format={doc.get('format')!r})")
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported polytope document version {doc.get('version')!r}")
    poly = VPolytope(
        int(doc["dim"]),
        [tuple(parse_rational(x) for x in v) for v in doc["vertices"]],
        {int(k): list(v) for k, v in doc.get("witnesses", {}).items()},
    )
    if "facets" in doc:
        poly.facets = [
            Facet(
                tuple(parse_rational(x) for x in f["normal"]),
                parse_rational(f["offset"]),
                tuple(f["incident_vertices"]),
            )
            for f in doc["facets"]
        ]
    return poly


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_polytope(poly: VPolytope, path, meta: dict | None = None) -> None:
    Path(path).write_text(dumps(polytope_to_dict(poly, meta)))


def read_polytope(path) -> VPolytope:
    return polytope_from_dict(json.loads(Path(path).read_text()))


def to_off(poly: VPolytope) -> str:
    """OFF mesh of a full-dimensional 3D polytope (faces are facet polygons)."""
    if poly.dim != 3:
        raise ValueError("OFF export needs a 3-dimensional polytope")
    cycles = facet_cycles(poly)
    lines = ["OFF", f"{len(poly.vertices)} {len(cycles)} 0"]
    lines += [" ".join(repr(float(x)) for x in v) for v in poly.vertices]
    lines += [" ".join(str(i) for i in [len(c), *c]) for c in cycles]
    return "\n".join(lines) + "\n"


def write_off(poly: VPolytope, path) -> None:
    Path(path).write_text(to_off(poly))


def fractions_to_strings(values) -> list[str]:
    return [format_rational(Fraction(v)) for v in values]
