"""SteinLib STP reader and writer, extended with real weights and coordinates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicateEdge, IndexOutOfRange, MissingSection, StpSyntaxError
from .model import REL_TOL, Instance, metric_closure, validate

MAGIC = "33D32945 STP File, STP Format Version 1.0"
SECTION_ORDER = ("Comment", "Graph", "Terminals", "Coordinates")


@dataclass
class StpDocument:
    magic: str
    sections: list = field(default_factory=list)  # (name, [(lineno, text), ...])
    provenance: str = "generated"

    def section(self, name):
        for s, lines in self.sections:
            if s.lower() == name.lower():
                return lines
        return None


def _split(text: str, provenance: str) -> StpDocument:
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    numbered = [(i + 1, ln.strip()) for i, ln in enumerate(lines)]
    body = [(i, ln) for i, ln in numbered if ln and not ln.startswith("#")]
    if not body:
        raise StpSyntaxError(1, "empty document")
    lineno, magic = body[0]
    if not magic.upper().startswith("33D32945"):
        raise StpSyntaxError(lineno, f"bad magic line {magic!r}")
    doc = StpDocument(magic, provenance=provenance)
    cur = None
    seen = set()
    saw_eof = False
    for lineno, ln in body[1:]:
        word = ln.split()[0].upper()
        if saw_eof:
            raise StpSyntaxError(lineno, "content after EOF")
        if word == "EOF":
            saw_eof = True
            continue
        if word == "SECTION":
            parts = ln.split()
            if len(parts) != 2:
                raise StpSyntaxError(lineno, "SECTION needs exactly one name")
            name = parts[1].capitalize()
            if name in seen:
                raise StpSyntaxError(lineno, f"section {name} repeated")
            seen.add(name)
            cur = (name, [])
            doc.sections.append(cur)
            continue
        if word == "END":
            if cur is None:
                raise StpSyntaxError(lineno, "END outside a section")
            cur = None
            continue
        if cur is None:
            raise StpSyntaxError(lineno, f"line outside any section: {ln!r}")
        cur[1].append((lineno, ln))
    if cur is not None:
        raise StpSyntaxError(lineno, f"section {cur[0]} not closed by END")
    if not saw_eof:
        raise StpSyntaxError(lineno, "missing EOF")
    return doc


def _ints(lineno, parts, k):
    try:
        return [int(p) for p in parts[:k]]
    except ValueError:
        raise StpSyntaxError(lineno, f"expected {k} integer(s) in {' '.join(parts)!r}") from None


def _real(lineno, s):
    try:
        x = float(s)
    except ValueError:
        raise StpSyntaxError(lineno, f"bad number {s!r}") from None
    if not math.isfinite(x):
        raise StpSyntaxError(lineno, f"non-finite number {s!r}")
    return x


def parse_stp(text: str, provenance: str = "generated") -> Instance:
    """Parse an STP document into an :class:`Instance`.

    An incomplete edge list is closed under shortest paths (a note records
    it).  A Coordinates section makes the instance Euclidean and is checked
    against the weights.
    """
    doc = _split(text, provenance)
    graph = doc.section("Graph")
    if graph is None:
        raise MissingSection("Graph")
    terms_sec = doc.section("Terminals")
    if terms_sec is None:
        raise MissingSection("Terminals")

    n = m = None
    edges = {}
    e_lines = 0
    for lineno, ln in graph:
        parts = ln.split()
        key = parts[0].upper()
        if key == "NODES":
            n = _ints(lineno, parts[1:], 1)[0]
        elif key == "EDGES":
            m = _ints(lineno, parts[1:], 1)[0]
        elif key in ("E", "A"):
            if n is None:
                raise StpSyntaxError(lineno, "edge before Nodes")
            if len(parts) != 4:
                raise StpSyntaxError(lineno, "edge line needs 'E i j w'")
            i, j = _ints(lineno, parts[1:3], 2)
            w = _real(lineno, parts[3])
            for x in (i, j):
                if not 1 <= x <= n:
                    raise IndexOutOfRange(f"line {lineno}: vertex {x} outside 1..{n}")
            if i == j:
                raise StpSyntaxError(lineno, "self-loop")
            if not w > 0:
                raise StpSyntaxError(lineno, f"non-positive weight {w}")
            k = (min(i, j) - 1, max(i, j) - 1)
            if k in edges and edges[k] != w:
                raise DuplicateEdge(f"line {lineno}: edge {i}-{j} given weights {edges[k]} and {w}")
            edges[k] = w
            e_lines += 1
        else:
            raise StpSyntaxError(lineno, f"unknown Graph keyword {parts[0]!r}")
    if n is None:
        raise StpSyntaxError(graph[0][0] if graph else 1, "Graph section lacks Nodes")
    if m is not None and m != e_lines:
        raise StpSyntaxError(graph[-1][0], f"Edges {m} declared but {e_lines} E-lines found")

    terminals = set()
    t_decl = None
    for lineno, ln in terms_sec:
        parts = ln.split()
        key = parts[0].upper()
        if key == "TERMINALS":
            t_decl = _ints(lineno, parts[1:], 1)[0]
        elif key == "T":
            (x,) = _ints(lineno, parts[1:], 1)
            if not 1 <= x <= n:
                raise IndexOutOfRange(f"line {lineno}: terminal {x} outside 1..{n}")
            terminals.add(x - 1)
        else:
            raise StpSyntaxError(lineno, f"unknown Terminals keyword {parts[0]!r}")
    if t_decl is not None and t_decl != len(terminals):
        raise StpSyntaxError(terms_sec[-1][0], f"Terminals {t_decl} declared, {len(terminals)} listed")

    coords = None
    coord_sec = doc.section("Coordinates")
    if coord_sec is not None:
        rows = {}
        for lineno, ln in coord_sec:
            parts = ln.split()
            if parts[0].upper() != "DD" or len(parts) < 3:
                raise StpSyntaxError(lineno, "coordinate line needs 'DD i x [y ...]'")
            (x,) = _ints(lineno, parts[1:], 1)
            if not 1 <= x <= n:
                raise IndexOutOfRange(f"line {lineno}: vertex {x} outside 1..{n}")
            rows[x - 1] = [_real(lineno, p) for p in parts[2:]]
        if len(rows) != n or len({len(r) for r in rows.values()}) != 1:
            raise StpSyntaxError(coord_sec[-1][0], "coordinates must cover every vertex with one dimension")
        coords = np.array([rows[i] for i in range(n)])

    notes = []
    if len(edges) == n * (n - 1) // 2:
        w = np.zeros((n, n))
        for (i, j), x in edges.items():
            w[i, j] = w[j, i] = x
        inst = Instance(w, frozenset(terminals))
        inst = inst.replace(metric=validate(inst.replace(metric=True)).ok)
    else:
        inst = metric_closure(n, terminals, ((i, j, x) for (i, j), x in edges.items()))
        notes.append(f"metric closure applied: {len(edges)} of {n * (n - 1) // 2} edges given")
    if coords is not None:
        inst = inst.replace(coords=coords, euclidean=True)
        rep = validate(inst)
        if not rep.ok:
            rule, detail = rep.violations[0]
            raise StpSyntaxError(coord_sec[0][0], f"coordinates disagree with weights: {detail}")
    return inst.replace(notes=tuple(notes), name=_comment_name(doc))


def _comment_name(doc):
    for lineno, ln in doc.section("Comment") or []:
        parts = ln.split(None, 1)
        if parts[0].lower() == "name" and len(parts) == 2:
            return parts[1].strip().strip('"')
    return ""


def write_stp(instance: Instance, comment: dict | None = None) -> str:
    """Serialise as STP: complete edge list, 12 significant digits, LF endings."""
    n = instance.n
    out = [MAGIC, ""]
    items = dict(comment or {})
    if instance.name and "Name" not in items:
        items = {"Name": instance.name, **items}
    if items:
        out.append("SECTION Comment")
        for k, v in items.items():
            out.append(f'{k} "{v}"')
        out += ["END", ""]
    out.append("SECTION Graph")
    out.append(f"Nodes {n}")
    out.append(f"Edges {n * (n - 1) // 2}")
    w = instance.weights
    for i in range(n):
        for j in range(i + 1, n):
            out.append(f"E {i + 1} {j + 1} {w[i, j]:.12g}")
    out += ["END", ""]
    out.append("SECTION Terminals")
    out.append(f"Terminals {len(instance.terminals)}")
    out += [f"T {t + 1}" for t in instance.terminal_list]
    out += ["END", ""]
    if instance.coords is not None:
        out.append("SECTION Coordinates")
        for i, row in enumerate(instance.coords):
            out.append(f"DD {i + 1} " + " ".join(f"{x:.17g}" for x in row))
        out += ["END", ""]
    out.append("EOF")
    return "\n".join(out) + "\n"


def read_stp(path) -> Instance:
    with open(path, encoding="ascii") as fh:
        return parse_stp(fh.read(), provenance=str(path))


def write_stp_file(instance: Instance, path, comment: dict | None = None) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(write_stp(instance, comment))
