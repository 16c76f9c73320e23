"""Text formats for graphs, patterns, tiling specs, patches, and class bundles.

Graph format, one record per line, `#` starts a comment:

    graph <name> palette=<k>
    v <id> [colors: c1,c2,...]
    e <id> <id>

The pattern format uses header keyword ``pattern`` and adds forbidden pairs:

    f <id> <id>

Ids are whitespace-free tokens; purely numeric tokens round-trip as ints.
Tiling specs:

    tiles <t>
    hnot <l> <k>     # k may not sit directly right of l
    vnot <j> <i>     # i may not sit directly above j

Patches serialize row-major with the y=0 row first, `.` for blank cells:

    patch <w> <h>        |  periodic <px> <py>
    <row y=0>            |  <row y=0>
    ...                  |  ...

Compiled classes serialize to a bundle directory: ``manifest.json`` plus one
pattern file per constraint instance.  Semantic rules are stored as their
descriptors and rebuilt by the compiler registry on load.

All writers go through a temp file and an atomic rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .core import ColoredGraph
from .matching import ConstraintPattern
from .hereditary import HereditaryClass
from .tiling import Patch, PeriodicTiling, TilingProblem


class FormatError(ValueError):
    """Malformed input file."""


def _parse_id(tok: str):
    if tok.lstrip("-").isdigit():
        return int(tok)
    return tok


def _fmt_id(v) -> str:
    s = str(v)
    if any(ch.isspace() for ch in s) or "#" in s:
        raise FormatError(f"vertex id {v!r} contains whitespace or the comment character")
    return s


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _lines(text: str) -> list:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


# -- graphs and patterns ----------------------------------------------------


def graph_to_text(g: ColoredGraph, palette_size: int | None = None) -> str:
    lines = [f"graph {g.name or 'g'} palette={palette_size if palette_size is not None else 0}"]
    for v in g.vertices:
        cs = sorted(g.colors(v))
        if cs:
            lines.append(f"v {_fmt_id(v)} colors: {','.join(cs)}")
        else:
            lines.append(f"v {_fmt_id(v)}")
    for u, v in g.sorted_edges():
        lines.append(f"e {_fmt_id(u)} {_fmt_id(v)}")
    return "\n".join(lines) + "\n"


def pattern_to_text(p: ConstraintPattern, palette_size: int | None = None) -> str:
    head = f"pattern {p.name or 'p'} palette={palette_size if palette_size is not None else 0}"
    body = graph_to_text(p.pattern, palette_size).split("\n", 1)[1]
    g = p.pattern
    forb = sorted(
        (tuple(g.sorted_vertices(e)) for e in p.forbidden),
        key=lambda e: (g.index(e[0]), g.index(e[1])),
    )
    lines = [head, body.rstrip("\n")] if body.strip() else [head]
    for u, v in forb:
        lines.append(f"f {_fmt_id(u)} {_fmt_id(v)}")
    if p.constraint:
        lines.append(f"constraint {p.constraint}")
    return "\n".join(lines) + "\n"


def _parse_graph_lines(lines: list, expect: str):
    if not lines:
        raise FormatError("empty file")
    head = lines[0].split()
    if head[0] != expect:
        raise FormatError(f"expected {expect!r} header, got {lines[0]!r}")
    name = head[1] if len(head) > 1 else ""
    verts: list = []
    colors: dict = {}
    edges: list = []
    forb: list = []
    constraint = ""
    for line in lines[1:]:
        toks = line.split()
        kind = toks[0]
        if kind == "v":
            if len(toks) < 2:
                raise FormatError(f"bad vertex line: {line!r}")
            vid = _parse_id(toks[1])
            verts.append(vid)
            if len(toks) >= 3:
                if toks[2] != "colors:" or len(toks) < 4:
                    raise FormatError(f"bad colors clause: {line!r}")
                colors[vid] = [c for c in toks[3].split(",") if c]
        elif kind == "e":
            edges.append((_parse_id(toks[1]), _parse_id(toks[2])))
        elif kind == "f":
            forb.append((_parse_id(toks[1]), _parse_id(toks[2])))
        elif kind == "constraint":
            constraint = toks[1]
        else:
            raise FormatError(f"unknown record {kind!r} in line {line!r}")
    return name, verts, edges, colors, forb, constraint


def graph_from_text(text: str) -> ColoredGraph:
    name, verts, edges, colors, forb, _ = _parse_graph_lines(_lines(text), "graph")
    if forb:
        raise FormatError("graph file contains forbidden-pair lines; use pattern_from_text")
    return ColoredGraph(verts, edges, colors, name=name)


def pattern_from_text(text: str) -> ConstraintPattern:
    name, verts, edges, colors, forb, constraint = _parse_graph_lines(_lines(text), "pattern")
    g = ColoredGraph(verts, edges, colors, name=name)
    return ConstraintPattern(g, forb, name=name, constraint=constraint)


def write_graph(path, g: ColoredGraph, palette_size: int | None = None) -> None:
    atomic_write(path, graph_to_text(g, palette_size))


def read_graph(path) -> ColoredGraph:
    return graph_from_text(Path(path).read_text())


# -- tiling specs, patches --------------------------------------------------


def tiling_to_text(problem: TilingProblem) -> str:
    lines = [f"tiles {problem.tiles}"]
    lines += [f"hnot {a} {b}" for a, b in sorted(problem.h_forbidden)]
    lines += [f"vnot {a} {b}" for a, b in sorted(problem.v_forbidden)]
    return "\n".join(lines) + "\n"


def tiling_from_text(text: str) -> TilingProblem:
    tiles = None
    h: set = set()
    v: set = set()
    for line in _lines(text):
        toks = line.split()
        if toks[0] == "tiles":
            tiles = int(toks[1])
        elif toks[0] == "hnot":
            h.add((int(toks[1]), int(toks[2])))
        elif toks[0] == "vnot":
            v.add((int(toks[1]), int(toks[2])))
        else:
            raise FormatError(f"unknown tiling record: {line!r}")
    if tiles is None:
        raise FormatError("tiling spec missing 'tiles <t>' line")
    return TilingProblem(tiles, frozenset(h), frozenset(v))


def read_tiling(path) -> TilingProblem:
    return tiling_from_text(Path(path).read_text())


def write_tiling(path, problem: TilingProblem) -> None:
    atomic_write(path, tiling_to_text(problem))


def map_to_text(m) -> str:
    if isinstance(m, PeriodicTiling):
        lines = [f"periodic {m.px} {m.py}"]
        for row in m.table:
            lines.append(" ".join(str(t) for t in row))
        return "\n".join(lines) + "\n"
    lines = [f"patch {m.width} {m.height}"]
    for row in m.rows():
        lines.append(" ".join("." if t is None else str(t) for t in row))
    return "\n".join(lines) + "\n"


def map_from_text(text: str):
    lines = _lines(text)
    if not lines:
        raise FormatError("empty tiling map")
    head = lines[0].split()
    if head[0] == "periodic":
        px, py = int(head[1]), int(head[2])
        rows = [tuple(int(t) for t in line.split()) for line in lines[1 : 1 + py]]
        return PeriodicTiling(px, py, tuple(rows))
    if head[0] == "patch":
        w, h = int(head[1]), int(head[2])
        cells = {}
        for y, line in enumerate(lines[1 : 1 + h]):
            for x, tok in enumerate(line.split()):
                if tok != ".":
                    cells[(x, y)] = int(tok)
        return Patch(w, h, cells)
    raise FormatError(f"unknown map header: {lines[0]!r}")


def read_map(path):
    return map_from_text(Path(path).read_text())


def write_map(path, m) -> None:
    atomic_write(path, map_to_text(m))


# -- encoding scheme file ---------------------------------------------------


def scheme_to_text(scheme) -> str:
    lines = [f"k = {scheme.k}", f"dummy = {scheme.dummy}"]
    for color in scheme.palette:
        lines.append(f"wheel.{color} = {scheme.wheel_size(color)}")
    return "\n".join(lines) + "\n"


def scheme_from_text(text: str):
    from .encoding import EncodingScheme

    palette = []
    sizes = {}
    for line in _lines(text):
        key, _, val = (t.strip() for t in line.partition("="))
        if key.startswith("wheel."):
            palette.append(key[len("wheel."):])
            sizes[palette[-1]] = int(val)
    scheme = EncodingScheme(tuple(palette))
    for color in palette:
        if scheme.wheel_size(color) != sizes[color]:
            raise FormatError(f"wheel size mismatch for {color}: file says {sizes[color]}")
    return scheme


# -- class bundles ----------------------------------------------------------


def write_bundle(dirpath, cls: HereditaryClass) -> None:
    d = Path(dirpath)
    d.mkdir(parents=True, exist_ok=True)
    files = []
    for i, p in enumerate(cls.patterns):
        fname = f"pattern_{i:04d}.pat"
        atomic_write(d / fname, pattern_to_text(p, len(cls.palette)))
        files.append(fname)
    manifest = {
        "name": cls.name,
        "palette": list(cls.palette),
        "meta": dict(cls.meta),
        "patterns": files,
        "semantic_rules": [dict(r.descriptor, name=r.name, constraint=r.constraint) for r in cls.rules],
    }
    atomic_write(d / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_bundle(dirpath) -> HereditaryClass:
    """Rebuild a compiled class from a bundle directory.

    Patterns load from their files; semantic rules are reconstructed by
    recompiling from the manifest's recorded stage and tiling problem,
    then matched up by rule name.
    """
    d = Path(dirpath)
    manifest = json.loads((d / "manifest.json").read_text())
    patterns = tuple(
        pattern_from_text((d / f).read_text()) for f in manifest["patterns"]
    )
    meta = manifest.get("meta", {})
    rules: tuple = ()
    stage = meta.get("stage")
    if stage:
        problem = TilingProblem(
            meta["tiles"],
            frozenset(map(tuple, meta.get("h", []))),
            frozenset(map(tuple, meta.get("v", []))),
        )
        rules = _recompile_rules(stage, problem)
        wanted = {r["name"] for r in manifest.get("semantic_rules", [])}
        rules = tuple(r for r in rules if r.name in wanted)
    return HereditaryClass(
        name=manifest["name"],
        palette=tuple(manifest["palette"]),
        patterns=patterns,
        rules=rules,
        meta=meta,
    )


def _recompile_rules(stage: str, problem: TilingProblem) -> tuple:
    if stage == "unary":
        from .unary import compile_unary_class

        return compile_unary_class(problem).rules
    if stage == "pure":
        from .encoding import compile_pure_class

        return compile_pure_class(problem).rules
    if stage == "jhp":
        from .jhp import compile_jhp_class

        return compile_jhp_class(problem).rules
    raise FormatError(f"unknown stage in manifest: {stage!r}")


# -- two-relation structures --------------------------------------------------


def tworel_to_text(s) -> str:
    lines = [f"struct {s.name or 's'}"]
    order = {v: i for i, v in enumerate(s.vertices)}
    for v in s.vertices:
        lines.append(f"v {_fmt_id(v)}")
    for tag, rel in (("e", s.epairs), ("n", s.npairs)):
        pairs = sorted(
            (tuple(sorted(p, key=order.__getitem__)) for p in rel),
            key=lambda e: (order[e[0]], order[e[1]]),
        )
        lines += [f"{tag} {_fmt_id(u)} {_fmt_id(v)}" for u, v in pairs]
    return "\n".join(lines) + "\n"


def tworel_from_text(text: str):
    from .jhp import TwoRelStructure

    lines = _lines(text)
    if not lines or lines[0].split()[0] != "struct":
        raise FormatError("expected 'struct' header")
    head = lines[0].split()
    name = head[1] if len(head) > 1 else ""
    verts: list = []
    eps: list = []
    nps: list = []
    for line in lines[1:]:
        toks = line.split()
        if toks[0] == "v":
            verts.append(_parse_id(toks[1]))
        elif toks[0] == "e":
            eps.append(frozenset((_parse_id(toks[1]), _parse_id(toks[2]))))
        elif toks[0] == "n":
            nps.append(frozenset((_parse_id(toks[1]), _parse_id(toks[2]))))
        else:
            raise FormatError(f"unknown record in structure file: {line!r}")
    return TwoRelStructure(tuple(verts), frozenset(eps), frozenset(nps), name=name)
