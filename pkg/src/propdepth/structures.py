"""Vertex-colored graphs, partial maps, and the CSP <-> homomorphism translation.

A Structure is a finite undirected graph whose vertices carry colors and whose
vertex order is fixed at construction.  That order is the canonical iteration
order everywhere else in the package, which is what makes saturation runs,
derivation files and generated instances reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class StructureError(ValueError):
    """Malformed structure, partial map, or structure file."""


@dataclass(frozen=True)
class VerifyResult:
    """Outcome of a verification pass: ok, or the first failure reason."""

    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True, init=False)
class PartialMap:
    """A functional set of (source, image) vertex pairs.

    Equality and hashing are by pair set, so two maps built in different
    orders compare equal.  Serialization orders pairs by the source
    structure's vertex order (see ``sorted_pairs``).
    """

    pairs: frozenset

    def __init__(self, pairs: Iterable[tuple[str, str]] = ()):
        ps = frozenset((str(a), str(b)) for a, b in pairs)
        seen: dict[str, str] = {}
        for a, b in ps:
            if a in seen and seen[a] != b:
                raise StructureError(f"not functional: {a!r} maps to {seen[a]!r} and {b!r}")
            seen[a] = b
        object.__setattr__(self, "pairs", ps)

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs

    def __iter__(self):
        return iter(self.pairs)

    def domain(self) -> frozenset:
        return frozenset(a for a, _ in self.pairs)

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    def get(self, a: str, default=None):
        for x, y in self.pairs:
            if x == a:
                return y
        return default

    def issubset(self, other: "PartialMap") -> bool:
        return self.pairs <= other.pairs

    def union(self, other: "PartialMap") -> "PartialMap":
        return PartialMap(self.pairs | other.pairs)

    def __repr__(self) -> str:
        inner = " ".join(f"{a}:{b}" for a, b in sorted(self.pairs))
        return f"PartialMap[{inner}]"


EMPTY_MAP = PartialMap()


def sorted_pairs(p: PartialMap, a_structure: "Structure") -> list[tuple[str, str]]:
    """Pairs of ``p`` ordered by the source structure's vertex order."""
    idx = a_structure.index
    for a, _ in p.pairs:
        if a not in idx:
            raise StructureError(f"unknown vertex id {a!r} in partial map")
    return sorted(p.pairs, key=lambda ab: idx[ab[0]])


class Structure:
    """Finite vertex-colored undirected graph with a fixed vertex order."""

    __slots__ = ("name", "vertices", "color", "index", "edges", "adj")

    def __init__(
        self,
        name: str,
        vertices: Sequence[str],
        color: Mapping[str, str],
        edges: Iterable[tuple[str, str]] = (),
    ):
        self.name = str(name)
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise StructureError(f"duplicate vertex id in structure {name!r}")
        self.index = {v: i for i, v in enumerate(self.vertices)}
        missing = [v for v in self.vertices if v not in color]
        if missing:
            raise StructureError(f"vertex {missing[0]!r} has no color")
        self.color = {v: str(color[v]) for v in self.vertices}

        idx = self.index
        norm = set()
        for u, v in edges:
            u, v = str(u), str(v)
            if u not in idx or v not in idx:
                bad = u if u not in idx else v
                raise StructureError(f"edge endpoint {bad!r} is not a declared vertex")
            norm.add((u, v) if idx[u] <= idx[v] else (v, u))
        self.edges = tuple(sorted(norm, key=lambda e: (idx[e[0]], idx[e[1]])))

        adj: dict[str, set] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        self.adj = {v: frozenset(s) for v, s in adj.items()}

    def has_edge(self, u: str, v: str) -> bool:
        return v in self.adj[u]

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Structure)
            and self.name == other.name
            and self.vertices == other.vertices
            and self.color == other.color
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.name, self.vertices, self.edges))

    def __repr__(self) -> str:
        return f"Structure({self.name!r}, |V|={len(self.vertices)}, |E|={len(self.edges)})"


def is_partial_homomorphism(p: PartialMap, a_struct: Structure, b_struct: Structure) -> bool:
    """True iff ``p`` preserves colors and maps every covered edge to an edge."""
    mapping = []
    for a, b in p.pairs:
        if a not in a_struct.index:
            raise StructureError(f"unknown vertex id {a!r} in {a_struct.name!r}")
        if b not in b_struct.index:
            raise StructureError(f"unknown vertex id {b!r} in {b_struct.name!r}")
        if a_struct.color[a] != b_struct.color[b]:
            return False
        mapping.append((a, b))
    for i, (a1, b1) in enumerate(mapping):
        if a1 in a_struct.adj[a1] and b1 not in b_struct.adj[b1]:
            return False  # self-loop must map to a self-loop
        for a2, b2 in mapping[i + 1 :]:
            if a2 in a_struct.adj[a1] and b2 not in b_struct.adj[b1]:
                return False
    return True


# -- constraint networks ----------------------------------------------------


@dataclass(frozen=True)
class Constraint:
    scope: tuple[str, str]
    allowed: frozenset  # of (value, value) pairs

    def __init__(self, scope, allowed):
        object.__setattr__(self, "scope", (str(scope[0]), str(scope[1])))
        object.__setattr__(self, "allowed", frozenset((str(d), str(e)) for d, e in allowed))


@dataclass(frozen=True)
class ConstraintNetwork:
    variables: tuple
    domain: tuple
    constraints: tuple

    def __init__(self, variables, domain, constraints=()):
        object.__setattr__(self, "variables", tuple(str(x) for x in variables))
        object.__setattr__(self, "domain", tuple(str(d) for d in domain))
        cs = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in constraints)
        for c in cs:
            for x in c.scope:
                if x not in self.variables:
                    raise StructureError(f"constraint scope variable {x!r} is not declared")
            for d, e in c.allowed:
                if d not in self.domain or e not in self.domain:
                    raise StructureError(f"allowed pair ({d!r}, {e!r}) outside the domain")
        object.__setattr__(self, "constraints", cs)


def csp_to_structures(net: ConstraintNetwork) -> tuple[Structure, Structure]:
    """Encode a binary constraint network as a homomorphism problem.

    Encoding: one source vertex per variable, one target vertex ``(x, d)``
    per variable/value pair, and one color class per variable so that a
    homomorphism must send ``x`` into its own value copies.  A target vertex
    ``(x, d)`` exists only if every constraint with scope ``(x, x)`` allows
    ``(d, d)`` (off-diagonal pairs of a reflexive scope are unsatisfiable by
    a single assignment and are ignored).  For distinct variables, the edge
    between ``(x, d)`` and ``(y, e)`` is present iff every constraint on
    ``(x, y)`` allows ``(d, e)`` and every constraint on ``(y, x)`` allows
    ``(e, d)``.  Satisfying assignments then correspond exactly to total
    homomorphisms ``x -> (x, f(x))``.
    """
    color = {x: f"P.{x}" for x in net.variables}

    by_scope: dict[tuple[str, str], list[Constraint]] = {}
    for c in net.constraints:
        by_scope.setdefault(c.scope, []).append(c)

    def value_ok(x: str, d: str) -> bool:
        return all((d, d) in c.allowed for c in by_scope.get((x, x), ()))

    def pair_ok(x: str, d: str, y: str, e: str) -> bool:
        return all((d, e) in c.allowed for c in by_scope.get((x, y), ())) and all(
            (e, d) in c.allowed for c in by_scope.get((y, x), ())
        )

    a = Structure(
        "vars",
        net.variables,
        color,
        [
            (x, y)
            for (x, y) in {c.scope for c in net.constraints}
            if x != y
        ],
    )

    b_vertices = []
    b_color = {}
    for x in net.variables:
        for d in net.domain:
            if value_ok(x, d):
                v = f"{x}={d}"
                b_vertices.append(v)
                b_color[v] = color[x]
    b_edges = []
    for x, y in a.edges:
        for d in net.domain:
            if not value_ok(x, d):
                continue
            for e in net.domain:
                if value_ok(y, e) and pair_ok(x, d, y, e):
                    b_edges.append((f"{x}={d}", f"{y}={e}"))
    b = Structure("vals", b_vertices, b_color, b_edges)
    return a, b


# -- .struct files -----------------------------------------------------------


def write_structure(s: Structure) -> str:
    """Canonical text form; equal structures serialize to identical bytes."""
    lines = [f"structure {s.name}"]
    lines.extend(f"v {v} {s.color[v]}" for v in s.vertices)
    lines.extend(f"e {u} {v}" for u, v in s.edges)
    return "\n".join(lines) + "\n"


def read_structure(text: str) -> Structure:
    """Parse the line-based .struct format (``#`` starts a comment)."""
    name = None
    vertices: list[str] = []
    color: dict[str, str] = {}
    edges: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if name is None:
            if parts[0] != "structure" or len(parts) != 2:
                raise StructureError(f"line {lineno}: expected 'structure <name>'")
            name = parts[1]
            continue
        if parts[0] == "v":
            if len(parts) != 3:
                raise StructureError(f"line {lineno}: expected 'v <vertex-id> <color-id>'")
            v = parts[1]
            if v in color:
                raise StructureError(f"line {lineno}: duplicate vertex id {v!r}")
            vertices.append(v)
            color[v] = parts[2]
        elif parts[0] == "e":
            if len(parts) != 3:
                raise StructureError(f"line {lineno}: expected 'e <vertex-id> <vertex-id>'")
            u, v = parts[1], parts[2]
            if u not in color:
                raise StructureError(f"line {lineno}: edge endpoint {u!r} not declared")
            if v not in color:
                raise StructureError(f"line {lineno}: edge endpoint {v!r} not declared")
            edges.append((u, v))
        else:
            raise StructureError(f"line {lineno}: unknown directive {parts[0]!r}")
    if name is None:
        raise StructureError("line 1: missing 'structure <name>' header")
    return Structure(name, vertices, color, edges)
