"""Bounded-width saturation over partial maps, with derivation extraction.

The inference engine marks partial maps from A to B as inconsistent.  Axioms
are the maps that are not partial homomorphisms.  A map ``p`` of size at most
``k-1`` is derived with pivot ``x`` once, for every target vertex ``b``, some
already-inconsistent map of the shape ``p' | {x: b}`` with ``p' <= p`` is
available (an axiom or a previously derived line).  Derived maps are kept at
size at most ``k-1``; larger extensions are treated as inconsistent lazily by
subset query instead of being materialized.

In ``parallel-rounds`` mode every derivable map is added each round, so the
round label of a map equals its minimal derivation depth; in ``fifo`` mode
labels record a processing order and only the final set of derived maps is
the same.  Rather than rescanning all candidates each round, the engine keeps
one bitmask per (subset, pivot) of target values that are already refutable,
and rechecks only candidates whose masks were touched.
"""

from __future__ import annotations

import itertools
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .structures import (
    EMPTY_MAP,
    PartialMap,
    Structure,
    StructureError,
    VerifyResult,
    is_partial_homomorphism,
    sorted_pairs,
)

PARALLEL = "parallel-rounds"
FIFO = "fifo"


@dataclass(frozen=True)
class DerivationLine:
    id: int
    map: PartialMap
    kind: str  # "axiom" | "propagated"
    pivot: str | None = None
    premises: tuple | None = None  # line ids, one per B-vertex in B's order
    round: int = 0


@dataclass(frozen=True)
class Derivation:
    lines: tuple
    k: int


@dataclass(frozen=True)
class DerivationMetrics:
    width: int
    depth: int
    prop_count: int


@dataclass
class SaturationResult:
    refuted: bool
    mode: str
    k: int
    rounds: int
    inconsistent: dict  # PartialMap -> round (or order index in fifo mode)
    _engine: object = field(repr=False, default=None)


# -- indexed workspace -------------------------------------------------------


class _Workspace:
    """Integer-indexed view of a structure pair for the hot loops."""

    def __init__(self, a: Structure, b: Structure):
        self.a = a
        self.b = b
        self.na = len(a.vertices)
        self.nb = len(b.vertices)
        self.adj_a = [frozenset(a.index[w] for w in a.adj[v]) for v in a.vertices]
        adj_b_bits = [0] * self.nb
        for u, v in b.edges:
            ui, vi = b.index[u], b.index[v]
            adj_b_bits[ui] |= 1 << vi
            adj_b_bits[vi] |= 1 << ui
        self.adj_b_bits = adj_b_bits
        self.loop_a = [v in a.adj[v] for v in a.vertices]
        self.loop_b = [v in b.adj[v] for v in b.vertices]
        self.color_a = [a.color[v] for v in a.vertices]
        self.color_b = [b.color[v] for v in b.vertices]
        by_color: dict[str, list[int]] = {}
        for i, v in enumerate(b.vertices):
            by_color.setdefault(b.color[v], []).append(i)
        # per A-vertex: same-colored B-vertices in B's canonical order
        self.cls = [tuple(by_color.get(c, ())) for c in self.color_a]
        self.cls_pos = [{v: i for i, v in enumerate(cl)} for cl in self.cls]
        self.full = [(1 << len(cl)) - 1 for cl in self.cls]

    def pair_key(self, u: int, v: int) -> int:
        return u * self.nb + v

    def single_hom(self, u: int, v: int) -> bool:
        if self.color_a[u] != self.color_b[v]:
            return False
        return not (self.loop_a[u] and not self.loop_b[v])

    def pair_compat(self, e: int, f: int) -> bool:
        """Can the single-pair maps e and f coexist in one homomorphism?"""
        nb = self.nb
        u, v = divmod(e, nb)
        x, w = divmod(f, nb)
        if u == x:
            return v == w
        if x in self.adj_a[u] and not (self.adj_b_bits[v] >> w) & 1:
            return False
        return True

    def key_is_hom(self, key: tuple) -> bool:
        for i, e in enumerate(key):
            u, v = divmod(e, self.nb)
            if not self.single_hom(u, v):
                return False
            for f in key[i + 1 :]:
                if not self.pair_compat(e, f):
                    return False
        return True

    def key_to_map(self, key: tuple) -> PartialMap:
        nb = self.nb
        return PartialMap(
            (self.a.vertices[e // nb], self.b.vertices[e % nb]) for e in key
        )

    def map_to_key(self, p: PartialMap) -> tuple:
        ids = []
        for av, bv in p.pairs:
            if av not in self.a.index:
                raise StructureError(f"unknown vertex id {av!r} in {self.a.name!r}")
            if bv not in self.b.index:
                raise StructureError(f"unknown vertex id {bv!r} in {self.b.name!r}")
            ids.append(self.pair_key(self.a.index[av], self.b.index[bv]))
        return tuple(sorted(ids))


# -- the saturation engine ---------------------------------------------------


class _Saturation:
    def __init__(self, a: Structure, b: Structure, k: int):
        if k < 2:
            raise ValueError(f"k must be at least 2, got {k}")
        if len(b.vertices) == 0:
            raise ValueError("target structure has no vertices")
        self.ws = _Workspace(a, b)
        self.k = k
        self.k1 = k - 1
        ws = self.ws
        # all single-pair partial homomorphisms, grouped by source vertex
        self.pairs_by_u: list[list[int]] = [
            [ws.pair_key(u, v) for v in ws.cls[u] if ws.single_hom(u, v)]
            for u in range(ws.na)
        ]
        self.allpairs: list[int] = [e for lst in self.pairs_by_u for e in lst]
        self.store: dict[tuple, int] = {}
        self.pivot_rec: dict[tuple, int | None] = {}
        self.blocked: dict[tuple, int] = {}  # (subset key, pivot) -> value mask
        self.base_dyn: list[int] = [0] * ws.na  # stored singletons per pivot
        self._static_e: dict[tuple, int] = {}
        self._static_cov: dict[tuple, list] = {}
        self._dyn_cov: dict[tuple, list] = {}
        self.rounds = 0
        self.refuted = False

    # masks ------------------------------------------------------------

    def static_zero(self, x: int) -> int:
        # values whose singleton map is itself an axiom (self-loop mismatch)
        ws = self.ws
        if not ws.loop_a[x]:
            return 0
        mask = 0
        for pos, v in enumerate(ws.cls[x]):
            if not ws.loop_b[v]:
                mask |= 1 << pos
        return mask

    def static_e(self, e: int, x: int) -> int:
        key = (e, x)
        m = self._static_e.get(key)
        if m is None:
            ws = self.ws
            u, v = divmod(e, ws.nb)
            m = 0
            if x in ws.adj_a[u]:
                bits = ws.adj_b_bits[v]
                for pos, b in enumerate(ws.cls[x]):
                    if not (bits >> b) & 1:
                        m |= 1 << pos
            self._static_e[key] = m
        return m

    def cover(self, e: int, x: int) -> int:
        return self.static_e(e, x) | self.blocked.get(((e,), x), 0)

    def coverers(self, x: int, pos: int):
        """Single pairs whose mask can refute value ``pos`` of pivot ``x``."""
        key = (x, pos)
        static = self._static_cov.get(key)
        if static is None:
            ws = self.ws
            b = ws.cls[x][pos]
            bits = ws.adj_b_bits[b]
            static = [
                e
                for u in sorted(ws.adj_a[x])
                for e in self.pairs_by_u[u]
                if not (bits >> (e % ws.nb)) & 1
            ]
            self._static_cov[key] = static
        dyn = self._dyn_cov.get(key)
        return static if dyn is None else static + dyn

    def base_mask(self, s: tuple, x: int) -> int:
        mask = self.static_zero(x) | self.base_dyn[x]
        for e in s:
            mask |= self.cover(e, x)
        if len(s) >= 2:
            blocked = self.blocked
            for size in range(2, min(len(s), self.k - 2) + 1):
                for sub in itertools.combinations(s, size):
                    mask |= blocked.get((sub, x), 0)
        return mask

    # candidate evaluation ----------------------------------------------

    def _fire_closure(self, p: tuple, x: int, sink):
        """Record a firing of ``p`` with pivot ``x`` and of all compatible
        extensions of ``p`` up to size ``k-1`` (their premises are covered by
        the same masks)."""
        stack = [p]
        store = self.store
        k1 = self.k1
        nb = self.ws.nb
        compat = self.ws.pair_compat
        while stack:
            q = stack.pop()
            if q in store or not sink(q, x):
                continue
            if len(q) < k1:
                doms = {e // nb for e in q}
                doms.add(x)
                for e2 in self.allpairs:
                    if e2 // nb in doms:
                        continue
                    ok = True
                    for e in q:
                        if not compat(e, e2):
                            ok = False
                            break
                    if ok:
                        child = list(q)
                        child.append(e2)
                        child.sort()
                        stack.append(tuple(child))

    def _recheck(self, s: tuple, x: int, sink) -> None:
        """Re-evaluate all candidates extending ``s`` for pivot ``x``."""
        nb = self.ws.nb
        for e in s:
            if e // nb == x:
                return
        base = self.base_mask(s, x)
        residual = self.ws.full[x] & ~base
        if residual == 0:
            self._fire_closure(s, x, sink)
            return
        budget = self.k1 - len(s)
        if budget <= 0:
            return
        if self.k <= 3:
            self._complete_fast(s, x, base, residual, budget, sink)
        else:
            self._complete_general(s, x, base, budget, sink)

    def _complete_fast(self, s, x, base, residual, budget, sink):
        nb = self.ws.nb
        compat = self.ws.pair_compat
        doms = {e // nb for e in s}
        bit0 = (residual & -residual).bit_length() - 1
        anchors = []
        for e1 in self.coverers(x, bit0):
            if e1 // nb in doms:
                continue
            ok = True
            for e in s:
                if not compat(e, e1):
                    ok = False
                    break
            if not ok:
                continue
            c1 = self.cover(e1, x)
            if residual & ~c1 == 0:
                key = tuple(sorted(s + (e1,)))
                self._fire_closure(key, x, sink)
            elif budget >= 2:
                anchors.append((e1, residual & ~c1))
        if budget < 2:
            return
        for e1, rest in anchors:
            bit1 = (rest & -rest).bit_length() - 1
            u1 = e1 // nb
            for e2 in self.coverers(x, bit1):
                if e2 == e1 or e2 // nb in doms or e2 // nb == u1:
                    continue
                if rest & ~self.cover(e2, x) != 0:
                    continue
                if not compat(e1, e2):
                    continue
                ok = True
                for e in s:
                    if not compat(e, e2):
                        ok = False
                        break
                if ok:
                    key = tuple(sorted(s + (e1, e2)))
                    self._fire_closure(key, x, sink)

    def _complete_general(self, s, x, base, budget, sink):
        # k >= 4: no pruning by per-pair covers, since refutations may rely on
        # masks indexed by several of the added pairs jointly.
        nb = self.ws.nb
        compat = self.ws.pair_compat

        def extend(cur: tuple, start: int, left: int):
            mask = self.base_mask(cur, x)
            if self.ws.full[x] & ~mask == 0:
                self._fire_closure(cur, x, sink)
                return
            if left == 0:
                return
            doms = {e // nb for e in cur}
            for idx in range(start, len(self.allpairs)):
                e2 = self.allpairs[idx]
                if e2 // nb in doms or e2 // nb == x:
                    continue
                if all(compat(e, e2) for e in cur):
                    extend(tuple(sorted(cur + (e2,))), idx + 1, left - 1)

        extend(s, 0, budget)

    # bookkeeping --------------------------------------------------------

    def _commit(self, key: tuple, label: int, pivot: int | None, triggers) -> None:
        self.store[key] = label
        self.pivot_rec[key] = pivot
        ws = self.ws
        for i, e in enumerate(key):
            x, v = divmod(e, ws.nb)
            pos = ws.cls_pos[x].get(v)
            if pos is None:
                continue
            bit = 1 << pos
            s = key[:i] + key[i + 1 :]
            if not s:
                if not self.base_dyn[x] & bit:
                    self.base_dyn[x] |= bit
                    triggers.append(((), x))
            else:
                bkey = (s, x)
                cur = self.blocked.get(bkey, 0)
                if not cur & bit:
                    self.blocked[bkey] = cur | bit
                    triggers.append((s, x))
                    if len(s) == 1:
                        self._dyn_cov.setdefault((x, pos), []).append(s[0])

    def _flood_remaining(self, label: int) -> None:
        """After the empty map is derived every partial homomorphism of size
        at most k-1 is derivable with this label; enumerate the rest."""
        store = self.store
        nb = self.ws.nb
        compat = self.ws.pair_compat

        def emit(cur: tuple, start: int):
            if cur and cur not in store:
                store[cur] = label
                self.pivot_rec[cur] = None
            if len(cur) == self.k1:
                return
            for idx in range(start, len(self.allpairs)):
                e2 = self.allpairs[idx]
                ok = True
                for e in cur:
                    if not compat(e, e2):
                        ok = False
                        break
                if ok:
                    emit(cur + (e2,), idx + 1)

        emit((), 0)

    # drivers -------------------------------------------------------------

    def run_parallel(self, threads: int = 1) -> None:
        triggers: list = [((), x) for x in range(self.ws.na)]
        label = 0
        while triggers:
            label += 1
            todo = sorted(set(triggers))
            fires: dict[tuple, int] = {}

            def make_sink(d):
                def sink(q, x):
                    cur = d.get(q)
                    if cur is not None and cur <= x:
                        return False
                    d[q] = x
                    return True

                return sink

            if threads > 1 and len(todo) > 1:
                chunks = [todo[i::threads] for i in range(threads)]
                locals_: list[dict] = [{} for _ in chunks]

                def work(args):
                    chunk, d = args
                    sink = make_sink(d)
                    for s, x in chunk:
                        self._recheck(s, x, sink)

                with ThreadPoolExecutor(max_workers=threads) as pool:
                    list(pool.map(work, zip(chunks, locals_)))
                for d in locals_:
                    for q, x in d.items():
                        if q not in fires or x < fires[q]:
                            fires[q] = x
            else:
                sink = make_sink(fires)
                for s, x in todo:
                    self._recheck(s, x, sink)

            if not fires:
                break
            triggers = []
            for q in sorted(fires):
                self._commit(q, label, fires[q], triggers)
            self.rounds = label
            if () in fires:
                self.refuted = True
                self._flood_remaining(label)
                break

    def run_fifo(self) -> None:
        queue: deque = deque()
        order = 0

        def sink(q, x):
            nonlocal order
            if q in self.store:
                return False
            order += 1
            pending: list = []
            self._commit(q, order, x, pending)
            queue.append(pending)
            return True

        for x in range(self.ws.na):
            self._recheck((), x, sink)
            if () in self.store:
                break
        while queue and () not in self.store:
            for s, x in queue.popleft():
                self._recheck(s, x, sink)
                if () in self.store:
                    break
        self.rounds = order
        if () in self.store:
            self.refuted = True
            self._flood_remaining(self.store[()])

    # premise reconstruction ----------------------------------------------

    def premise_for(self, p: tuple, x: int, b: int, label: int):
        """Lexicographically least valid premise line for value ``b``.

        Returns ``(line key, is_axiom)`` where the line is ``p' | {x: b}``
        for some ``p' <= p`` that is an axiom or was derived before ``label``.
        """
        e_xb = self.ws.pair_key(x, b)
        best = None
        best_ax = False
        for size in range(0, len(p) + 1):
            for sub in itertools.combinations(p, size):
                q = tuple(sorted(sub + (e_xb,)))
                if best is not None and q >= best:
                    continue
                if not self.ws.key_is_hom(q):
                    best, best_ax = q, True
                elif self.store.get(q, label) < label:
                    best, best_ax = q, False
        if best is None:
            raise RuntimeError("no premise available; witness data is inconsistent")
        return best, best_ax


# -- public operations --------------------------------------------------------


def saturate(
    a: Structure,
    b: Structure,
    k: int,
    mode: str = PARALLEL,
    threads: int = 1,
) -> SaturationResult:
    """Run the inference system to its least fixpoint.

    Returns the set of derived maps with round labels (parallel-rounds mode)
    or processing-order labels (fifo mode), plus the refutation flag.
    """
    if mode not in (PARALLEL, FIFO):
        raise ValueError(f"unknown mode {mode!r}")
    eng = _Saturation(a, b, k)
    if mode == PARALLEL:
        eng.run_parallel(threads=max(1, int(threads)))
    else:
        eng.run_fifo()
    inconsistent = {eng.ws.key_to_map(key): lab for key, lab in eng.store.items()}
    return SaturationResult(
        refuted=eng.refuted,
        mode=mode,
        k=k,
        rounds=eng.rounds,
        inconsistent=inconsistent,
        _engine=eng,
    )


def depth_via_saturation(a: Structure, b: Structure, k: int, threads: int = 1):
    """Minimal nested-propagation depth, or None when no refutation exists."""
    result = saturate(a, b, k, mode=PARALLEL, threads=threads)
    if not result.refuted:
        return None
    return result._engine.store[()]


def extract_refutation(result: SaturationResult, a: Structure, b: Structure, k: int) -> Derivation:
    """Materialize a refutation DAG from recorded saturation witnesses.

    For parallel-rounds results the extracted derivation has depth equal to
    the round label of the empty map; fifo results yield a valid derivation
    whose depth may be larger.
    """
    if not result.refuted:
        raise ValueError("cannot extract a refutation from a non-refuted result")
    eng: _Saturation = result._engine
    ws = eng.ws
    nb = ws.nb

    prop: dict[tuple, tuple] = {}
    axioms: set = set()
    todo = [()]
    while todo:
        p = todo.pop()
        if p in prop:
            continue
        x = eng.pivot_rec[p]
        label = eng.store[p]
        prem = []
        for bb in range(nb):
            q, is_ax = eng.premise_for(p, x, bb, label)
            prem.append((q, is_ax))
            if is_ax:
                axioms.add(q)
            elif q not in prop:
                todo.append(q)
        prop[p] = (x, tuple(prem))

    order = sorted(axioms) + sorted(prop, key=lambda key: (eng.store[key], key))
    ids = {key: i + 1 for i, key in enumerate(order)}
    lines = []
    for key in sorted(axioms):
        lines.append(
            DerivationLine(id=ids[key], map=ws.key_to_map(key), kind="axiom", round=0)
        )
    for key in sorted(prop, key=lambda key: (eng.store[key], key)):
        x, prem = prop[key]
        lines.append(
            DerivationLine(
                id=ids[key],
                map=ws.key_to_map(key),
                kind="propagated",
                pivot=ws.a.vertices[x],
                premises=tuple(ids[q] for q, _ in prem),
                round=eng.store[key],
            )
        )
    return Derivation(lines=tuple(lines), k=k)


def verify_derivation(d: Derivation, a: Structure, b: Structure, k: int) -> VerifyResult:
    """Check a derivation line by line against the inference rule."""
    if d.k != k:
        return VerifyResult(False, f"derivation header k={d.k} differs from requested k={k}")
    by_id: dict[int, DerivationLine] = {}
    for pos, line in enumerate(d.lines, start=1):
        if line.id != pos:
            return VerifyResult(False, f"line {line.id}: ids are not dense (expected {pos})")
        by_id[line.id] = line
    nb = len(b.vertices)
    for line in d.lines:
        lid = line.id
        try:
            hom = is_partial_homomorphism(line.map, a, b)
        except StructureError as exc:
            return VerifyResult(False, f"line {lid}: {exc}")
        if line.kind == "axiom":
            if hom:
                return VerifyResult(False, f"line {lid}: axiom is a partial homomorphism")
            continue
        if line.kind != "propagated":
            return VerifyResult(False, f"line {lid}: unknown kind {line.kind!r}")
        if len(line.map) > k - 1:
            return VerifyResult(
                False,
                f"line {lid}: propagated map has size {len(line.map)}, width bound is {k - 1}",
            )
        if not hom:
            return VerifyResult(False, f"line {lid}: propagated map is not a partial homomorphism")
        if line.pivot is None or line.pivot not in a.index:
            return VerifyResult(False, f"line {lid}: missing or unknown pivot")
        if line.premises is None or len(line.premises) != nb:
            found = 0 if line.premises is None else len(line.premises)
            return VerifyResult(
                False,
                f"line {lid}: premise coverage incomplete (expected {nb}, found {found})",
            )
        for j, pid in enumerate(line.premises):
            bv = b.vertices[j]
            if pid not in by_id:
                return VerifyResult(False, f"line {lid}: premise id {pid} does not exist")
            if pid >= lid:
                return VerifyResult(False, f"line {lid}: premise id {pid} is not an earlier line")
            pmap = by_id[pid].map
            if (line.pivot, bv) not in pmap.pairs:
                return VerifyResult(
                    False,
                    f"line {lid}: premise {j + 1} does not map pivot {line.pivot} to {bv}",
                )
            rest = pmap.pairs - {(line.pivot, bv)}
            if not rest <= line.map.pairs:
                return VerifyResult(
                    False,
                    f"line {lid}: premise {j + 1} adds pairs outside the conclusion",
                )
    return VerifyResult(True)


def metrics(d: Derivation) -> DerivationMetrics:
    width = 0
    prop_count = 0
    depth: dict[int, int] = {}
    best = 0
    for line in d.lines:
        if line.kind == "axiom":
            depth[line.id] = 0
            continue
        prop_count += 1
        width = max(width, len(line.map))
        depth[line.id] = 1 + max((depth[p] for p in line.premises), default=0)
        best = max(best, depth[line.id])
    return DerivationMetrics(width=width, depth=best, prop_count=prop_count)


# -- derivation files ---------------------------------------------------------


def _format_map(p: PartialMap, a: Structure) -> str:
    inner = " ".join(f"{u}:{v}" for u, v in sorted_pairs(p, a))
    return f"[{inner}]"


def write_derivation(d: Derivation, a: Structure, b: Structure) -> str:
    out = [f"derivation k={d.k}"]
    for line in d.lines:
        body = _format_map(line.map, a)
        if line.kind == "axiom":
            out.append(f"line {line.id} {body} axiom")
        else:
            prem = " ".join(str(p) for p in line.premises)
            out.append(f"line {line.id} {body} from {line.pivot} {prem}")
    return "\n".join(out) + "\n"


def _parse_map(tokens: list, lineno: int) -> tuple[PartialMap, int]:
    if not tokens or not tokens[0].startswith("["):
        raise StructureError(f"line {lineno}: expected a [..] map")
    buf = []
    consumed = 0
    for tok in tokens:
        consumed += 1
        buf.append(tok)
        if tok.endswith("]"):
            break
    else:
        raise StructureError(f"line {lineno}: unterminated map")
    inner = " ".join(buf)[1:-1].strip()
    pairs = []
    for item in inner.split():
        parts = item.split(":")
        if len(parts) != 2:
            raise StructureError(f"line {lineno}: malformed pair {item!r}")
        pairs.append((parts[0], parts[1]))
    return PartialMap(pairs), consumed


def read_derivation(text: str, a: Structure, b: Structure) -> Derivation:
    k = None
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if k is None:
            if parts[0] != "derivation" or len(parts) != 2 or not parts[1].startswith("k="):
                raise StructureError(f"line {lineno}: expected 'derivation k=<k>'")
            k = int(parts[1][2:])
            continue
        if parts[0] != "line":
            raise StructureError(f"line {lineno}: expected 'line ...'")
        lid = int(parts[1])
        pmap, used = _parse_map(parts[2:], lineno)
        rest = parts[2 + used :]
        if rest == ["axiom"]:
            lines.append(DerivationLine(id=lid, map=pmap, kind="axiom"))
        elif rest and rest[0] == "from":
            if len(rest) < 2:
                raise StructureError(f"line {lineno}: missing pivot")
            pivot = rest[1]
            premises = tuple(int(t) for t in rest[2:])
            lines.append(
                DerivationLine(
                    id=lid, map=pmap, kind="propagated", pivot=pivot, premises=premises
                )
            )
        else:
            raise StructureError(f"line {lineno}: expected 'axiom' or 'from <pivot> <ids>'")
    if k is None:
        raise StructureError("line 1: missing 'derivation k=<k>' header")
    return Derivation(lines=tuple(lines), k=k)
