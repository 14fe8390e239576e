"""Exact existential pebble-game solver and Duplicator strategy machinery.

The solver ranks game positions by the number of placement rounds Spoiler
needs to win: a round is one pebble placement, pick-ups are free, and the
game starts from the empty position.  Position ranks are computed backward
from immediately-lost positions (non-homomorphisms) as a least fixpoint, and
only minimal losing positions are materialized; larger positions are resolved
by subset queries.

Strategies for Duplicator are downward-closed families of partial
homomorphisms represented by their maximal elements together with a set of
critical positions that are excused from the extension property.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .structures import (
    PartialMap,
    Structure,
    StructureError,
    VerifyResult,
    sorted_pairs,
)


class ResourceLimitError(RuntimeError):
    """A solver or builder exceeded its configured resource budget."""


# -- the game solver ----------------------------------------------------------


class _Board:
    """Indexed view of the two structures for the game solver."""

    def __init__(self, a: Structure, b: Structure):
        self.a = a
        self.b = b
        self.na = len(a.vertices)
        self.nb = len(b.vertices)
        self.adj_a = [frozenset(a.index[w] for w in a.adj[v]) for v in a.vertices]
        bits = [0] * self.nb
        for u, v in b.edges:
            ui, vi = b.index[u], b.index[v]
            bits[ui] |= 1 << vi
            bits[vi] |= 1 << ui
        self.adj_b = bits
        self.loop_a = [v in a.adj[v] for v in a.vertices]
        self.loop_b = [v in b.adj[v] for v in b.vertices]
        by_color: dict[str, list[int]] = {}
        for i, v in enumerate(b.vertices):
            by_color.setdefault(b.color[v], []).append(i)
        self.answers = [tuple(by_color.get(a.color[v], ())) for v in a.vertices]
        self.answer_pos = [{v: i for i, v in enumerate(ans)} for ans in self.answers]
        self.all_live = [(1 << len(ans)) - 1 for ans in self.answers]

    def pebble_ok(self, u: int, v: int) -> bool:
        return self.a.color[self.a.vertices[u]] == self.b.color[self.b.vertices[v]] and not (
            self.loop_a[u] and not self.loop_b[v]
        )

    def pebbles_coexist(self, p1: tuple, p2: tuple) -> bool:
        u, v = p1
        x, w = p2
        if u == x:
            return v == w
        if x in self.adj_a[u] and not (self.adj_b[v] >> w) & 1:
            return False
        return True

    def position_of(self, p: PartialMap) -> tuple:
        out = []
        for av, bv in p.pairs:
            if av not in self.a.index:
                raise StructureError(f"unknown vertex id {av!r} in {self.a.name!r}")
            if bv not in self.b.index:
                raise StructureError(f"unknown vertex id {bv!r} in {self.b.name!r}")
            out.append((self.a.index[av], self.b.index[bv]))
        return tuple(sorted(out))


class _GameSolver:
    def __init__(self, a: Structure, b: Structure, k: int, targets=(), max_positions=None):
        if k < 2:
            raise ValueError(f"k must be at least 2, got {k}")
        if len(b.vertices) == 0:
            raise ValueError("Duplicator's structure has no vertices")
        self.board = _Board(a, b)
        self.k = k
        self.max_positions = max_positions
        bd = self.board
        self.legal = [
            [(u, v) for v in bd.answers[u] if bd.pebble_ok(u, v)] for u in range(bd.na)
        ]
        self.all_pebbles = [pb for lst in self.legal for pb in lst]
        self.ranked: dict[tuple, int] = {}
        self.dead_dyn: dict[tuple, int] = {}  # (shrunk position, x) -> answer mask
        self.dead_single: list[int] = [0] * bd.na
        self._static_pair: dict[tuple, int] = {}
        self._static_kill: dict[tuple, list] = {}
        self._dyn_kill: dict[tuple, list] = {}
        self.rounds = 0
        self.targets = [bd.position_of(t) for t in targets]
        for t in self.targets:
            self._seed_target(t)

    def _seed_target(self, t: tuple) -> None:
        bd = self.board
        for i, (x, v) in enumerate(t):
            pos = bd.answer_pos[x].get(v)
            if pos is None:
                continue
            rest = t[:i] + t[i + 1 :]
            if len(rest) > self.k - 1:
                continue
            if not rest:
                self.dead_single[x] |= 1 << pos
            else:
                key = (rest, x)
                self.dead_dyn[key] = self.dead_dyn.get(key, 0) | 1 << pos
                if len(rest) == 1:
                    self._dyn_kill.setdefault((x, pos), []).append(rest[0])

    # answer deadness ----------------------------------------------------

    def _static_zero(self, x: int) -> int:
        bd = self.board
        if not bd.loop_a[x]:
            return 0
        mask = 0
        for pos, v in enumerate(bd.answers[x]):
            if not bd.loop_b[v]:
                mask |= 1 << pos
        return mask

    def _static(self, pb: tuple, x: int) -> int:
        key = (pb, x)
        m = self._static_pair.get(key)
        if m is None:
            bd = self.board
            u, v = pb
            m = 0
            if x in bd.adj_a[u]:
                bits = bd.adj_b[v]
                for pos, w in enumerate(bd.answers[x]):
                    if not (bits >> w) & 1:
                        m |= 1 << pos
            self._static_pair[key] = m
        return m

    def _kill_mask(self, pb: tuple, x: int) -> int:
        return self._static(pb, x) | self.dead_dyn.get(((pb,), x), 0)

    def _killers(self, x: int, pos: int):
        key = (x, pos)
        static = self._static_kill.get(key)
        if static is None:
            bd = self.board
            w = bd.answers[x][pos]
            bits = bd.adj_b[w]
            static = [
                pb
                for u in sorted(bd.adj_a[x])
                for pb in self.legal[u]
                if not (bits >> pb[1]) & 1
            ]
            self._static_kill[key] = static
        dyn = self._dyn_kill.get(key)
        return static if dyn is None else static + dyn

    def _dead_base(self, p: tuple, x: int) -> int:
        mask = self._static_zero(x) | self.dead_single[x]
        for pb in p:
            mask |= self._kill_mask(pb, x)
        if len(p) >= 2:
            dyn = self.dead_dyn
            for size in range(2, min(len(p), self.k - 2) + 1):
                for sub in itertools.combinations(p, size):
                    mask |= dyn.get((sub, x), 0)
        return mask

    # losing-position detection ------------------------------------------

    def _is_minimal_loss_candidate(self, p: tuple) -> bool:
        if p in self.ranked:
            return False
        for size in range(len(p)):
            for sub in itertools.combinations(p, size):
                if sub in self.ranked:
                    return False
        for t in self.targets:
            if all(pb in p for pb in t):
                return False
        return True

    def _losses_from(self, p: tuple, x: int, sink) -> None:
        """Evaluate positions extending ``p``: pivot ``x`` wins for Spoiler
        once every color-respecting answer is dead."""
        for u, _ in p:
            if u == x:
                return
        base = self._dead_base(p, x)
        live = self.board.all_live[x] & ~base
        if live == 0:
            sink(p)
            return
        budget = self.k - 1 - len(p)
        if budget <= 0:
            return
        if self.k <= 3:
            self._close_out_fast(p, x, live, budget, sink)
        else:
            self._close_out_general(p, x, budget, sink)

    def _close_out_fast(self, p, x, live, budget, sink):
        coexist = self.board.pebbles_coexist
        doms = {u for u, _ in p}
        bit0 = (live & -live).bit_length() - 1
        anchors = []
        for pb1 in self._killers(x, bit0):
            if pb1[0] in doms:
                continue
            if not all(coexist(pb, pb1) for pb in p):
                continue
            k1 = self._kill_mask(pb1, x)
            if live & ~k1 == 0:
                sink(tuple(sorted(p + (pb1,))))
            elif budget >= 2:
                anchors.append((pb1, live & ~k1))
        if budget < 2:
            return
        for pb1, rest in anchors:
            bit1 = (rest & -rest).bit_length() - 1
            for pb2 in self._killers(x, bit1):
                if pb2 == pb1 or pb2[0] in doms or pb2[0] == pb1[0]:
                    continue
                if rest & ~self._kill_mask(pb2, x) != 0:
                    continue
                if coexist(pb1, pb2) and all(coexist(pb, pb2) for pb in p):
                    sink(tuple(sorted(p + (pb1, pb2))))

    def _close_out_general(self, p, x, budget, sink):
        coexist = self.board.pebbles_coexist

        def extend(cur: tuple, start: int, left: int):
            if self.board.all_live[x] & ~self._dead_base(cur, x) == 0:
                sink(cur)
                return
            if left == 0:
                return
            doms = {u for u, _ in cur}
            for idx in range(start, len(self.all_pebbles)):
                pb = self.all_pebbles[idx]
                if pb[0] in doms or pb[0] == x:
                    continue
                if all(coexist(q, pb) for q in cur):
                    extend(tuple(sorted(cur + (pb,))), idx + 1, left - 1)

        extend(p, 0, budget)

    def _commit(self, p: tuple, rank: int, triggers) -> None:
        self.ranked[p] = rank
        bd = self.board
        for i, (x, v) in enumerate(p):
            pos = bd.answer_pos[x].get(v)
            if pos is None:
                continue
            bit = 1 << pos
            rest = p[:i] + p[i + 1 :]
            if not rest:
                if not self.dead_single[x] & bit:
                    self.dead_single[x] |= bit
                    triggers.append(((), x))
            else:
                key = (rest, x)
                cur = self.dead_dyn.get(key, 0)
                if not cur & bit:
                    self.dead_dyn[key] = cur | bit
                    triggers.append((rest, x))
                    if len(rest) == 1:
                        self._dyn_kill.setdefault((x, pos), []).append(rest[0])

    def run(self, stop_at: tuple | None, threads: int = 1):
        bd = self.board
        triggers: list = [((), x) for x in range(bd.na)]
        rank = 0
        while triggers:
            rank += 1
            todo = sorted(set(triggers))
            found: set = set()

            def evaluate(chunk, out):
                sink = out.add
                for p, x in chunk:
                    self._losses_from(p, x, sink)
                if stop_at is not None:
                    for x in range(bd.na):
                        if all(u != x for u, _ in stop_at):
                            if bd.all_live[x] & ~self._dead_base(stop_at, x) == 0:
                                out.add(stop_at)
                                break

            if threads > 1 and len(todo) > 1:
                chunks = [todo[i::threads] for i in range(threads)]
                outs: list[set] = [set() for _ in chunks]
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    list(pool.map(lambda cw: evaluate(*cw), zip(chunks, outs)))
                for out in outs:
                    found |= out
            else:
                evaluate(todo, found)

            fresh = sorted(p for p in found if self._is_minimal_loss_candidate(p))
            if stop_at is not None and stop_at in found and stop_at not in self.ranked:
                if stop_at not in fresh:
                    fresh.append(stop_at)
            if not fresh:
                break
            triggers = []
            for p in fresh:
                if p not in self.ranked:
                    self._commit(p, rank, triggers)
            self.rounds = rank
            if self.max_positions is not None and len(self.ranked) > self.max_positions:
                raise ResourceLimitError(
                    f"game solver exceeded max positions ({self.max_positions})"
                )
            target = stop_at if stop_at is not None else ()
            if target in self.ranked:
                return self.ranked[target]
        target = stop_at if stop_at is not None else ()
        return self.ranked.get(target)


def spoiler_min_rounds(
    a: Structure,
    b: Structure,
    k: int,
    *,
    start: PartialMap | None = None,
    targets=(),
    max_positions: int | None = None,
    threads: int = 1,
):
    """Minimal number of rounds Spoiler needs to win, or None.

    ``start`` ranks the game from a given position (at most k-1 pebbles)
    instead of the empty one.  Positions extending any map in ``targets``
    count as immediate Spoiler wins, which turns the solver into a
    forced-reachability check.
    """
    solver = _GameSolver(a, b, k, targets=targets, max_positions=max_positions)
    stop_at = None
    if start is not None and len(start) > 0:
        if len(start) > k - 1:
            raise ValueError("start position may hold at most k-1 pebbles")
        pos = solver.board.position_of(start)
        if not solver.board.a.color:  # pragma: no cover - structures always colored
            pass
        bd = solver.board
        hom = all(bd.pebble_ok(u, v) for u, v in pos) and all(
            bd.pebbles_coexist(p1, p2) for p1, p2 in itertools.combinations(pos, 2)
        )
        if not hom:
            return 0
        for t in solver.targets:
            if all(pb in pos for pb in t):
                return 0
        stop_at = pos
    return solver.run(stop_at, threads=max(1, int(threads)))


# -- Duplicator strategies -----------------------------------------------------


def _canon(p: PartialMap) -> tuple:
    return tuple(sorted(p.pairs))


@dataclass(frozen=True, init=False)
class Strategy:
    """Downward-closed family of partial homomorphisms.

    ``maximal`` lists the maximal elements; a map belongs to the family iff
    it is contained in one of them.  ``crit`` is the set of critical
    positions excused from the extension property.
    """

    maximal: tuple
    crit: frozenset

    def __init__(self, maximal, crit=()):
        seen = {}
        for m in maximal:
            if not isinstance(m, PartialMap):
                m = PartialMap(m)
            seen.setdefault(_canon(m), m)
        ordered = tuple(seen[key] for key in sorted(seen))
        cps = frozenset(c if isinstance(c, PartialMap) else PartialMap(c) for c in crit)
        object.__setattr__(self, "maximal", ordered)
        object.__setattr__(self, "crit", cps)

    def member(self, p: PartialMap) -> bool:
        return any(p.pairs <= m.pairs for m in self.maximal)

    def defined_vertices(self) -> frozenset:
        out = set()
        for m in self.maximal:
            out.update(a for a, _ in m.pairs)
        return frozenset(out)


def strategy_of(*maps, crit=()) -> Strategy:
    """The downward closure of the given maps (winning unless crit given)."""
    return Strategy(maps, crit)


class _MemberIndex:
    """Pair-indexed membership queries against a strategy's maximal rows."""

    def __init__(self, h: Strategy):
        self.rows = [m.pairs for m in h.maximal]
        self.by_pair: dict[tuple, set] = {}
        for i, row in enumerate(self.rows):
            for pair in row:
                self.by_pair.setdefault(pair, set()).add(i)

    def rows_containing(self, p: PartialMap):
        pairs = sorted(p.pairs, key=lambda pr: len(self.by_pair.get(pr, ())))
        if not pairs:
            return set(range(len(self.rows)))
        first = self.by_pair.get(pairs[0])
        if not first:
            return set()
        acc = set(first)
        for pair in pairs[1:]:
            acc &= self.by_pair.get(pair, set())
            if not acc:
                break
        return acc

    def member(self, p: PartialMap) -> bool:
        return bool(self.rows_containing(p))


def _strategy_values(h: Strategy) -> dict:
    """Vertex -> set of images over all maximal elements."""
    vals: dict[str, set] = {}
    for m in h.maximal:
        for av, bv in m.pairs:
            vals.setdefault(av, set()).add(bv)
    return vals


def compose(g: Strategy, h: Strategy) -> Strategy:
    """Union every maximal element of ``g`` with every one of ``h``.

    The two families must be connectable: wherever both define a shared
    vertex, all their members must agree on its image.
    """
    gv = _strategy_values(g)
    hv = _strategy_values(h)
    for v in sorted(set(gv) & set(hv)):
        if len(gv[v]) > 1 or len(hv[v]) > 1 or gv[v] != hv[v]:
            raise StructureError(f"strategies are not connectable at vertex {v!r}")
    maximal = [PartialMap(mg.pairs | mh.pairs) for mg in g.maximal for mh in h.maximal]
    return Strategy(maximal, g.crit | h.crit)


def compose_all(parts) -> Strategy:
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to compose")
    acc = parts[0]
    for nxt in parts[1:]:
        acc = compose(acc, nxt)
    return acc


def union_strategies(parts) -> Strategy:
    """Union of strategy families.

    A critical position of one part stops being critical when another part
    contains it as a non-critical member.
    """
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to union")
    maximal = [m for h in parts for m in h.maximal]
    indexes = [_MemberIndex(h) for h in parts]
    crit = []
    for p in {c for h in parts for c in h.crit}:
        excused = any(
            idx.member(p) and p not in h.crit for h, idx in zip(parts, indexes)
        )
        if not excused:
            crit.append(p)
    return Strategy(maximal, crit)


def boundary_function(h: Strategy, boundary) -> dict:
    """Common restriction of all maximal elements to the boundary vertices."""
    out = {}
    vals = _strategy_values(h)
    for v in boundary:
        images = vals.get(v)
        if not images:
            continue
        if len(images) > 1:
            raise StructureError(f"maximal elements disagree on boundary vertex {v!r}")
        out[v] = next(iter(images))
    return out


# -- strategy verification ------------------------------------------------------


def _strategy_arrays(h: Strategy, a: Structure, b: Structure):
    arr = np.full((len(h.maximal), len(a.vertices)), -1, dtype=np.int32)
    for i, m in enumerate(h.maximal):
        for av, bv in m.pairs:
            if av not in a.index:
                raise StructureError(f"unknown vertex id {av!r} in {a.name!r}")
            if bv not in b.index:
                raise StructureError(f"unknown vertex id {bv!r} in {b.name!r}")
            arr[i, a.index[av]] = b.index[bv]
    return arr


def _member_extension_state(h: Strategy, a: Structure, b: Structure, k: int, arr):
    """For every member of size < k (as index pairs), the set of vertices at
    which no maximal element containing the member is defined."""
    na = len(a.vertices)
    defined = arr >= 0
    idx_rows = []
    for i in range(arr.shape[0]):
        cols = np.flatnonzero(defined[i])
        idx_rows.append(tuple((int(u), int(arr[i, u])) for u in cols))
    undef_rows = [frozenset(range(na)) - {u for u, _ in row} for row in idx_rows]
    state: dict[tuple, frozenset] = {}
    for row, undef in zip(idx_rows, undef_rows):
        for size in range(0, k):
            if size > len(row):
                break
            for combo in itertools.combinations(row, size):
                cur = state.get(combo)
                if cur is None:
                    state[combo] = undef
                elif cur:
                    state[combo] = cur & undef
    return state


def extension_gaps(h: Strategy, a: Structure, b: Structure, k: int):
    """Members of size < k that fail the extension property at some vertex.

    Returns a list of (member, vertex) pairs; critical positions are not
    excluded here, callers filter as needed.
    """
    arr = _strategy_arrays(h, a, b)
    state = _member_extension_state(h, a, b, k, arr)
    out = []
    for combo in sorted(state):
        gap = state[combo] - {u for u, _ in combo}
        if gap:
            g = PartialMap((a.vertices[u], b.vertices[v]) for u, v in combo)
            out.append((g, a.vertices[min(gap)]))
    return out


def verify_critical_strategy(h: Strategy, a: Structure, b: Structure, k: int) -> VerifyResult:
    """Check the critical-strategy conditions, reporting the first failure."""
    if not h.maximal:
        return VerifyResult(False, "strategy has no maximal elements")
    arr = _strategy_arrays(h, a, b)
    na = len(a.vertices)

    # every maximal element is a partial homomorphism
    palette: dict = {}

    def cid(c):
        return palette.setdefault(c, len(palette))

    color_a = np.array([cid(a.color[v]) for v in a.vertices], dtype=np.int64)
    color_b = np.array([cid(b.color[v]) for v in b.vertices], dtype=np.int64)
    defined = arr >= 0
    safe = np.where(defined, arr, 0)
    col_bad = defined & (color_b[safe] != color_a[np.newaxis, :])
    if col_bad.any():
        i, u = np.argwhere(col_bad)[0]
        m = h.maximal[int(i)]
        return VerifyResult(
            False,
            f"maximal element {m!r} violates the color of vertex {a.vertices[int(u)]!r}",
        )
    adj = np.zeros((len(b.vertices), len(b.vertices)), dtype=bool)
    for u, v in b.edges:
        adj[b.index[u], b.index[v]] = True
        adj[b.index[v], b.index[u]] = True
    for u, v in a.edges:
        ui, vi = a.index[u], a.index[v]
        both = defined[:, ui] & defined[:, vi]
        if not both.any():
            continue
        ok = adj[arr[both, ui], arr[both, vi]]
        if not ok.all():
            row = int(np.flatnonzero(both)[int(np.argmin(ok))])
            return VerifyResult(
                False,
                f"maximal element {h.maximal[row]!r} maps edge ({u}, {v}) to a non-edge",
            )

    # members of size <= k-1, as subsets of maximal elements, with the
    # intersection of the undefined sets of all rows containing them
    state = _member_extension_state(h, a, b, k, arr)

    crit_keys = set()
    for c in h.crit:
        if len(c) != k - 1:
            return VerifyResult(
                False, f"critical position {c!r} has size {len(c)}, expected {k - 1}"
            )
        key = tuple(sorted((a.index[av], b.index[bv]) for av, bv in c.pairs))
        if key not in state:
            return VerifyResult(False, f"critical position {c!r} is not a member")
        crit_keys.add(key)

    for combo in sorted(state):
        if len(combo) >= k or combo in crit_keys:
            continue
        gap = state[combo] - {u for u, _ in combo}
        if gap:
            x = a.vertices[min(gap)]
            g = PartialMap((a.vertices[u], b.vertices[v]) for u, v in combo)
            return VerifyResult(
                False,
                f"member {g!r} admits no extension at vertex {x!r} and is not critical",
            )
    return VerifyResult(True)


def verify_strategy_sequence(seq, a: Structure, b: Structure, k: int) -> VerifyResult:
    """Check the hand-off property of a strategy sequence.

    A true result certifies that Duplicator survives len(seq) rounds, i.e.
    Spoiler needs at least len(seq)+1 rounds.
    """
    seq = list(seq)
    indexes = [_MemberIndex(h) for h in seq]
    for i, h in enumerate(seq[:-1]):
        for p in h.crit:
            handled = False
            for j in range(0, i + 2):
                if j >= len(seq):
                    break
                if p not in seq[j].crit and indexes[j].member(p):
                    handled = True
                    break
            if not handled:
                return VerifyResult(
                    False,
                    f"critical position {p!r} of strategy {i + 1} is not handed off",
                )
    return VerifyResult(True)


# -- strategy files --------------------------------------------------------------


def write_strategy(h: Strategy, a: Structure) -> str:
    def fmt(p: PartialMap) -> str:
        return "[" + " ".join(f"{u}:{v}" for u, v in sorted_pairs(p, a)) + "]"

    out = ["strategy"]
    out.extend(f"maximal {fmt(m)}" for m in h.maximal)
    out.extend(f"crit {fmt(c)}" for c in sorted(h.crit, key=_canon))
    return "\n".join(out) + "\n"


def read_strategy(text: str) -> Strategy:
    maximal = []
    crit = []
    header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header:
            if line != "strategy":
                raise StructureError(f"line {lineno}: expected 'strategy' header")
            header = True
            continue
        parts = line.split(None, 1)
        if len(parts) != 2 or parts[0] not in ("maximal", "crit"):
            raise StructureError(f"line {lineno}: expected 'maximal [..]' or 'crit [..]'")
        body = parts[1].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise StructureError(f"line {lineno}: expected a [..] map")
        pairs = []
        for item in body[1:-1].split():
            bits = item.split(":")
            if len(bits) != 2:
                raise StructureError(f"line {lineno}: malformed pair {item!r}")
            pairs.append((bits[0], bits[1]))
        (maximal if parts[0] == "maximal" else crit).append(PartialMap(pairs))
    if not header:
        raise StructureError("line 1: missing 'strategy' header")
    return Strategy(maximal, crit)
