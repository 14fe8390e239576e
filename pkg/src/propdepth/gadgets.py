"""Configuration arithmetic and the hard-instance gadget constructions.

An instance pair (A, B) is glued together from gadgets whose boundaries are
blocks of vertices ``x.<i>.<j>``: Spoiler's side has columns ``j in 1..n``,
Duplicator's side has columns ``j in 0..m`` where column 0 is the hollow
fallback vertex of the block.  Role names double as vertex names, so
generated structures are debuggable by eye; when gadgets are glued, boundary
roles become aliases for the merged block vertices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .structures import PartialMap, Structure, StructureError


# -- configurations -----------------------------------------------------------


@dataclass(frozen=True, init=False)
class Configuration:
    """Pebble-position index on the x-blocks: column picks plus blocked set."""

    a: tuple
    b: tuple
    blocked: frozenset
    n: int
    m: int

    def __init__(self, a, b, blocked=(), n=None, m=None):
        a = tuple(int(v) for v in a)
        b = tuple(int(v) for v in b)
        if len(a) != len(b) or not a:
            raise ValueError("component maps must have equal positive length")
        n = max(a) if n is None else int(n)
        m = max(b) if m is None else int(m)
        for v in a:
            if not 1 <= v <= n:
                raise ValueError(f"left component {v} out of range 1..{n}")
        for v in b:
            if not 1 <= v <= m:
                raise ValueError(f"right component {v} out of range 1..{m}")
        t = frozenset(int(i) for i in blocked)
        for i in t:
            if not 1 <= i <= len(a):
                raise ValueError(f"blocked index {i} out of range 1..{len(a)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "blocked", t)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)

    @property
    def kk(self) -> int:
        return len(self.a)

    @property
    def valid(self) -> bool:
        return not self.blocked

    def with_blocked(self, blocked) -> "Configuration":
        return Configuration(self.a, self.b, blocked, self.n, self.m)

    def __repr__(self) -> str:
        t = "" if not self.blocked else f" T={sorted(self.blocked)}"
        return f"Config(a={self.a}, b={self.b}{t})"


def start_config(kk: int, n: int, m: int) -> Configuration:
    return Configuration((1,) * kk, (1,) * kk, (), n, m)


def max_config(kk: int, n: int, m: int) -> Configuration:
    return Configuration((n,) * kk, (m,) * kk, (), n, m)


def hollow_config(kk: int, n: int, m: int) -> Configuration:
    return Configuration((1,) * kk, (1,) * kk, range(1, kk + 1), n, m)


def alpha(q: Configuration) -> int:
    """Lexicographic rank of a valid configuration, 0-based."""
    if not q.valid:
        raise ValueError("rank is defined for valid configurations only")
    kk, n, m = q.kk, q.n, q.m
    left = sum((q.a[i] - 1) * n ** (kk - 1 - i) for i in range(kk))
    right = sum((q.b[i] - 1) * m ** (kk - 1 - i) for i in range(kk))
    return m**kk * left + right


def alpha_inverse(rank: int, kk: int, n: int, m: int) -> Configuration:
    total = n**kk * m**kk
    if not 0 <= rank < total:
        raise ValueError(f"rank {rank} out of range 0..{total - 1}")
    left, right = divmod(rank, m**kk)
    # mixed-radix decode, most significant digit first
    a = []
    for i in range(kk):
        base = n ** (kk - 1 - i)
        a.append(left // base + 1)
        left %= base
    b = []
    for i in range(kk):
        base = m ** (kk - 1 - i)
        b.append(right // base + 1)
        right %= base
    return Configuration(a, b, (), n, m)


def successor(q: Configuration) -> Configuration:
    """The unique valid configuration of rank alpha(q)+1."""
    r = alpha(q)
    total = q.n ** q.kk * q.m ** q.kk
    if r + 1 >= total:
        raise ValueError("configuration has maximal rank; no successor exists")
    return alpha_inverse(r + 1, q.kk, q.n, q.m)


def t_right(ell: int, q: Configuration) -> frozenset:
    """Blocks contradicting applicability of the right increment at ``ell``."""
    out = set(q.blocked)
    if q.b[ell - 1] == q.m:
        out.add(ell)
    for i in range(ell + 1, q.kk + 1):
        if q.b[i - 1] != q.m:
            out.add(i)
    return frozenset(out)


def t_left(ell: int, q: Configuration) -> frozenset:
    """Blocks contradicting applicability of the left increment at ``ell``."""
    out = set(q.blocked)
    if q.a[ell - 1] == q.n:
        out.add(ell)
    for i in range(ell + 1, q.kk + 1):
        if q.a[i - 1] != q.n:
            out.add(i)
    for i in range(1, q.kk + 1):
        if q.b[i - 1] != q.m:
            out.add(i)
    return frozenset(out)


def applicability(q: Configuration):
    """Id of the unique applicable increment gadget, or None."""
    if not q.valid:
        return None
    for ell in range(1, q.kk + 1):
        if not t_right(ell, q):
            return f"incR{ell}"
    for ell in range(1, q.kk + 1):
        if not t_left(ell, q):
            return f"incL{ell}"
    return None


# -- gadget prototypes ---------------------------------------------------------


@dataclass
class _Proto:
    va: list
    ea: list
    vb: list
    eb: list


def _block_proto(kk: int, n: int, m: int, prefix: str) -> _Proto:
    va = [(f"{prefix}.{i}.{j}", f"P.{prefix}.{i}") for i in range(1, kk + 1) for j in range(1, n + 1)]
    vb = [(f"{prefix}.{i}.{s}", f"P.{prefix}.{i}") for i in range(1, kk + 1) for s in range(0, m + 1)]
    return _Proto(va, [], vb, [])


def _merge(*protos: _Proto) -> _Proto:
    out = _Proto([], [], [], [])
    for p in protos:
        out.va += p.va
        out.ea += p.ea
        out.vb += p.vb
        out.eb += p.eb
    return out


def _win_proto(kk: int, n: int, m: int) -> _Proto:
    p = _block_proto(kk, n, m, "x")
    p.va.append(("a", "P.a"))
    p.ea += [("a", f"x.{i}.{n}") for i in range(1, kk + 1)]
    p.vb += [(f"a.{i}", "P.a") for i in range(1, kk + 1)]
    for i in range(1, kk + 1):
        for i2 in range(1, kk + 1):
            for s in range(0, m + 1):
                if i2 == i and s == m:
                    continue
                p.eb.append((f"a.{i}", f"x.{i2}.{s}"))
    return p


def _inc_right_proto(ell: int, kk: int, n: int, m: int) -> _Proto:
    p = _merge(_block_proto(kk, n, m, "x"), _block_proto(kk, n, m, "y"))
    p.ea += [(f"x.{i}.{j}", f"y.{i}.{j}") for i in range(1, kk + 1) for j in range(1, n + 1)]
    for i in range(1, kk + 1):
        if i < ell:
            p.eb += [(f"x.{i}.{s}", f"y.{i}.{s}") for s in range(0, m + 1)]
        elif i == ell:
            p.eb += [(f"x.{i}.{s}", f"y.{i}.{s + 1}") for s in range(1, m)]
            p.eb.append((f"x.{i}.{m}", f"y.{i}.0"))
            p.eb.append((f"x.{i}.0", f"y.{i}.0"))
        else:
            p.eb.append((f"x.{i}.{m}", f"y.{i}.1"))
            p.eb += [(f"x.{i}.{s}", f"y.{i}.0") for s in range(0, m)]
    return p


def _inc_left_proto(ell: int, kk: int, n: int, m: int) -> _Proto:
    p = _merge(_block_proto(kk, n, m, "x"), _block_proto(kk, n, m, "y"))
    for i in range(1, kk + 1):
        if i < ell:
            p.ea += [(f"x.{i}.{j}", f"y.{i}.{j}") for j in range(1, n + 1)]
        elif i == ell:
            p.ea += [(f"x.{i}.{j}", f"y.{i}.{j + 1}") for j in range(1, n)]
        else:
            p.ea.append((f"x.{i}.{n}", f"y.{i}.1"))
    for i in range(1, kk + 1):
        p.eb.append((f"x.{i}.{m}", f"y.{i}.1"))
        p.eb += [(f"x.{i}.{s}", f"y.{i}.0") for s in range(0, m)]
    return p


def _switch_proto(kk: int, n: int, m: int) -> _Proto:
    p = _merge(_block_proto(kk, n, m, "x"))
    ks = range(1, kk + 1)
    for i in ks:
        p.va += [(f"a.{i}.{j}", f"P.a.{i}") for j in range(1, n + 1)]
    for i in ks:
        p.va += [(f"b.{i}.{j}", f"P.b.{i}") for j in range(1, n + 1)]
    yp = _block_proto(kk, n, m, "y")
    p.va += yp.va
    for i in ks:
        for j in range(1, n + 1):
            p.ea.append((f"x.{i}.{j}", f"a.{i}.{j}"))
            p.ea.append((f"a.{i}.{j}", f"b.{i}.{j}"))
            p.ea.append((f"b.{i}.{j}", f"y.{i}.{j}"))
    for i, i2 in itertools.combinations(ks, 2):
        for j in range(1, n + 1):
            for j2 in range(1, n + 1):
                p.ea.append((f"a.{i}.{j}", f"a.{i2}.{j2}"))
                p.ea.append((f"b.{i}.{j}", f"b.{i2}.{j2}"))
                p.ea.append((f"a.{i}.{j}", f"b.{i2}.{j2}"))
                p.ea.append((f"b.{i}.{j}", f"a.{i2}.{j2}"))

    # Duplicator's side: hollow rows plus (column, tag)-indexed rows
    for i in ks:
        p.vb.append((f"a.{i}.0", f"P.a.{i}"))
        p.vb += [(f"a.{i}.{s}.{l}", f"P.a.{i}") for s in range(1, m + 1) for l in ks]
    for i in ks:
        p.vb += [(f"b.{i}.0.{l}", f"P.b.{i}") for l in ks]
        p.vb += [(f"b.{i}.{s}.{l}", f"P.b.{i}") for s in range(1, m + 1) for l in ks]
    p.vb += yp.vb

    def a_all(i):
        return [f"a.{i}.0"] + [f"a.{i}.{s}.{l}" for s in range(1, m + 1) for l in ks]

    def b_all(i):
        return [f"b.{i}.0.{l}" for l in ks] + [
            f"b.{i}.{s}.{l}" for s in range(1, m + 1) for l in ks
        ]

    for i in ks:
        p.eb += [(f"x.{i}.0", v) for v in a_all(i)]
        p.eb += [
            (f"x.{i}.{s}", f"a.{i}.{s}.{l}") for s in range(1, m + 1) for l in ks
        ]
        p.eb += [(f"a.{i}.0", v) for v in b_all(i)]
        p.eb += [
            (f"a.{i}.{s}.{l}", f"b.{i}.{s}.{l}") for s in range(1, m + 1) for l in ks
        ]
        p.eb += [
            (f"a.{i}.{s}.{l}", f"b.{i}.0.{l2}")
            for s in range(1, m + 1)
            for l in ks
            for l2 in ks
            if l2 != l
        ]
        p.eb += [
            (f"b.{i}.{s}.{l}", f"y.{i}.{s}") for s in range(1, m + 1) for l in ks
        ]
        p.eb += [
            (f"b.{i}.0.{l}", f"y.{i}.{s}") for l in ks for s in range(0, m + 1)
        ]
    for i, i2 in itertools.permutations(ks, 2):
        if i < i2:
            p.eb += [
                (f"a.{i}.{s}.{l}", f"a.{i2}.{s2}.{l2}")
                for s in range(1, m + 1)
                for s2 in range(1, m + 1)
                for l in ks
                for l2 in ks
                if l != l2
            ]
            p.eb += [
                (f"b.{i}.0.{l}", f"b.{i2}.0.{l2}") for l in ks for l2 in ks
            ]
            p.eb.append((f"a.{i}.0", f"a.{i2}.0"))
        p.eb += [
            (f"b.{i}.{s}.{l}", b2)
            for s in range(1, m + 1)
            for l in ks
            for l2 in ks
            if l2 != l
            for b2 in ([f"b.{i2}.0.{l2}"] + [f"b.{i2}.{s2}.{l2}" for s2 in range(1, m + 1)])
        ]
        p.eb += [
            (f"a.{i}.{s}.{l}", b2)
            for s in range(1, m + 1)
            for l in ks
            for l2 in ks
            if l2 != l
            for b2 in ([f"b.{i2}.0.{l2}"] + [f"b.{i2}.{s2}.{l2}" for s2 in range(1, m + 1)])
        ]
        p.eb += [
            (f"a.{i}.0", f"a.{i2}.{s}.{l}") for s in range(1, m + 1) for l in ks
        ]
        p.eb += [
            (f"a.{i}.0", b2)
            for b2 in (
                [f"b.{i2}.0.{l}" for l in ks]
                + [f"b.{i2}.{s}.{l}" for s in range(1, m + 1) for l in ks]
            )
        ]
    return p


def _prefix_proto(p: _Proto, role_prefix: str, color_prefix: str) -> _Proto:
    def rr(role):
        return role_prefix + role

    def rc(crole):
        return "P." + color_prefix + crole[2:]

    return _Proto(
        [(rr(r), rc(c)) for r, c in p.va],
        [(rr(u), rr(v)) for u, v in p.ea],
        [(rr(r), rc(c)) for r, c in p.vb],
        [(rr(u), rr(v)) for u, v in p.eb],
    )


def _init_proto(q0: Configuration, kk: int, n: int, m: int) -> _Proto:
    if not q0.valid:
        raise ValueError("the initialization gadget needs a valid configuration")
    sw1 = _prefix_proto(_switch_proto(kk, n, m), "M1.", "M1.")
    sw2 = _prefix_proto(_switch_proto(kk, n, m), "M2.", "M2.")
    out = _block_proto(kk, n, m, "y")
    p = _Proto([("z", "P.z")], [], [("z1", "P.z"), ("z2", "P.z")], [])
    p = _merge(p, sw1, sw2, out)
    for i in range(1, kk + 1):
        ai, bi = q0.a[i - 1], q0.b[i - 1]
        p.ea.append(("z", f"M1.x.{i}.{ai}"))
        p.ea.append(("z", f"M2.x.{i}.{ai}"))
        p.eb.append(("z1", f"M1.x.{i}.{bi}"))
        p.eb.append(("z1", f"M2.x.{i}.0"))
        p.eb.append(("z1", f"M2.x.{i}.{bi}"))
        p.eb.append(("z2", f"M2.x.{i}.{bi}"))
        p.eb.append(("z2", f"M1.x.{i}.0"))
        p.eb.append(("z2", f"M1.x.{i}.{bi}"))
    for sw in ("M1", "M2"):
        for i in range(1, kk + 1):
            for j in range(1, n + 1):
                p.ea.append((f"{sw}.y.{i}.{j}", f"y.{i}.{j}"))
            for s in range(0, m + 1):
                p.eb.append((f"{sw}.y.{i}.0", f"y.{i}.{s}"))
            for s in range(1, m + 1):
                p.eb.append((f"{sw}.y.{i}.{s}", f"y.{i}.{s}"))
    return p


# -- assembling structures -------------------------------------------------------


class _Assembler:
    def __init__(self):
        self.order: list = []
        self.color: dict = {}
        self.edges: set = set()

    def vertex(self, name: str, color: str) -> None:
        cur = self.color.get(name)
        if cur is None:
            self.order.append(name)
            self.color[name] = color
        elif cur != color:
            raise StructureError(f"vertex {name!r} merged with conflicting colors {cur!r}/{color!r}")

    def edge(self, u: str, v: str) -> None:
        self.edges.add((u, v))

    def structure(self, name: str) -> Structure:
        return Structure(name, self.order, self.color, sorted(self.edges))


class GadgetView:
    """Resolves gadget-local role names to vertex ids on both sides."""

    def __init__(self, kk: int, n: int, m: int, roles_a: dict, roles_b: dict, prefix: str = ""):
        self.kk = kk
        self.n = n
        self.m = m
        self._ra = roles_a
        self._rb = roles_b
        self.prefix = prefix

    def ra(self, role: str) -> str:
        try:
            return self._ra[self.prefix + role]
        except KeyError:
            raise StructureError(f"unknown role {self.prefix + role!r}") from None

    def rb(self, role: str) -> str:
        try:
            return self._rb[self.prefix + role]
        except KeyError:
            raise StructureError(f"unknown role {self.prefix + role!r}") from None

    def sub(self, prefix: str) -> "GadgetView":
        return GadgetView(self.kk, self.n, self.m, self._ra, self._rb, self.prefix + prefix)


@dataclass(frozen=True)
class GadgetPair:
    kind: str
    ell: int | None
    spoiler: Structure
    duplicator: Structure
    kk: int
    n: int
    m: int
    roles_a: dict
    roles_b: dict

    def view(self, prefix: str = "") -> GadgetView:
        return GadgetView(self.kk, self.n, self.m, self.roles_a, self.roles_b, prefix)


@dataclass(frozen=True)
class InstancePair:
    a: Structure
    b: Structure
    k: int
    n: int
    m: int
    roles_a: dict
    roles_b: dict

    @property
    def kk(self) -> int:
        return self.k - 1

    def view(self, prefix: str = "") -> GadgetView:
        pfx = prefix + "." if prefix and not prefix.endswith(".") else prefix
        return GadgetView(self.kk, self.n, self.m, self.roles_a, self.roles_b, pfx)

    def inc_gadgets(self) -> list:
        out = [("right", ell, f"incR{ell}", f"swR{ell}") for ell in range(1, self.kk + 1)]
        out += [("left", ell, f"incL{ell}", f"swL{ell}") for ell in range(1, self.kk + 1)]
        return out


def _build_standalone(kind: str, ell, proto: _Proto, kk, n, m, name: str) -> GadgetPair:
    asm_a, asm_b = _Assembler(), _Assembler()
    for r, c in proto.va:
        asm_a.vertex(r, c)
    for u, v in proto.ea:
        asm_a.edge(u, v)
    for r, c in proto.vb:
        asm_b.vertex(r, c)
    for u, v in proto.eb:
        asm_b.edge(u, v)
    roles_a = {r: r for r, _ in proto.va}
    roles_b = {r: r for r, _ in proto.vb}
    return GadgetPair(
        kind,
        ell,
        asm_a.structure(f"{name}-S"),
        asm_b.structure(f"{name}-D"),
        kk,
        n,
        m,
        roles_a,
        roles_b,
    )


def build_win(kk: int, n: int, m: int) -> GadgetPair:
    return _build_standalone("win", None, _win_proto(kk, n, m), kk, n, m, "win")


def build_inc_right(ell: int, kk: int, n: int, m: int) -> GadgetPair:
    if not 1 <= ell <= kk:
        raise ValueError(f"block index {ell} out of range 1..{kk}")
    return _build_standalone(
        "inc-right", ell, _inc_right_proto(ell, kk, n, m), kk, n, m, f"incR{ell}"
    )


def build_inc_left(ell: int, kk: int, n: int, m: int) -> GadgetPair:
    if not 1 <= ell <= kk:
        raise ValueError(f"block index {ell} out of range 1..{kk}")
    return _build_standalone(
        "inc-left", ell, _inc_left_proto(ell, kk, n, m), kk, n, m, f"incL{ell}"
    )


def build_switch(kk: int, n: int, m: int) -> GadgetPair:
    return _build_standalone("switch", None, _switch_proto(kk, n, m), kk, n, m, "switch")


def build_init(q0: Configuration, kk: int, n: int, m: int) -> GadgetPair:
    return _build_standalone("init", None, _init_proto(q0, kk, n, m), kk, n, m, "init")


# -- block response maps -----------------------------------------------------------


def h_block(view: GadgetView, prefix: str, q: Configuration) -> PartialMap:
    """Duplicator's intended response on one block row under configuration q:
    the picked column answers the picked column, everything else goes hollow."""
    pairs = []
    for i in range(1, view.kk + 1):
        for j in range(1, view.n + 1):
            if j == q.a[i - 1] and i not in q.blocked:
                img = q.b[i - 1]
            else:
                img = 0
            pairs.append((view.ra(f"{prefix}.{i}.{j}"), view.rb(f"{prefix}.{i}.{img}")))
    return PartialMap(pairs)


def h_zero(view: GadgetView, prefix: str) -> PartialMap:
    """The all-hollow response on one block row."""
    pairs = []
    for i in range(1, view.kk + 1):
        for j in range(1, view.n + 1):
            pairs.append((view.ra(f"{prefix}.{i}.{j}"), view.rb(f"{prefix}.{i}.0")))
    return PartialMap(pairs)


def valid_position(view: GadgetView, prefix: str, q: Configuration) -> PartialMap:
    """The pebble position 'q on the block': one pair per block."""
    if not q.valid:
        raise ValueError("positions are defined for valid configurations")
    return PartialMap(
        (
            view.ra(f"{prefix}.{i}.{q.a[i - 1]}"),
            view.rb(f"{prefix}.{i}.{q.b[i - 1]}"),
        )
        for i in range(1, view.kk + 1)
    )


# -- the glued instance -------------------------------------------------------------


def _place(proto: _Proto, asm_a, asm_b, roles_a, roles_b, gname, rule_roles, rule_colors):
    def final(role):
        for src, dst in rule_roles:
            if role.startswith(src):
                return dst + role[len(src):]
        return f"{gname}.{role}"

    def final_color(crole):
        for src, dst in rule_colors:
            if crole.startswith(src):
                return dst + crole[len(src):]
        return f"P.{gname}.{crole[2:]}"

    for r, c in proto.va:
        name = final(r)
        asm_a.vertex(name, final_color(c))
        roles_a[f"{gname}.{r}"] = name
        roles_a.setdefault(name, name)
    for u, v in proto.ea:
        asm_a.edge(final(u), final(v))
    for r, c in proto.vb:
        name = final(r)
        asm_b.vertex(name, final_color(c))
        roles_b[f"{gname}.{r}"] = name
        roles_b.setdefault(name, name)
    for u, v in proto.eb:
        asm_b.edge(final(u), final(v))


def build_instance(k: int, n: int, m: int) -> InstancePair:
    """Glue the full instance pair for the (k = kk+1)-pebble game.

    The initialization gadget feeds the x-block; the x-block feeds the
    winning gadget and all 2*kk increment gadgets; each increment gadget
    feeds its own switch; all those switches feed the y-block; and one last
    switch feeds the y-block back into the x-block.
    """
    if k < 3:
        raise ValueError(f"instances need k >= 3, got {k}")
    if n < 1 or m < 1:
        raise ValueError("block widths n and m must be at least 1")
    kk = k - 1
    asm_a, asm_b = _Assembler(), _Assembler()
    roles_a: dict = {}
    roles_b: dict = {}

    def place(proto, gname, rule_roles, rule_colors):
        _place(proto, asm_a, asm_b, roles_a, roles_b, gname, rule_roles, rule_colors)

    keep_x = [("x.", "x.")]
    keep_x_c = [("P.x.", "P.x.")]
    place(_block_proto(kk, n, m, "x"), "blocks", keep_x, keep_x_c)
    place(_block_proto(kk, n, m, "y"), "blocks", [("y.", "y.")], [("P.y.", "P.y.")])

    place(_win_proto(kk, n, m), "win", keep_x, keep_x_c)
    for ell in range(1, kk + 1):
        g = f"incR{ell}"
        place(
            _inc_right_proto(ell, kk, n, m),
            g,
            keep_x + [("y.", f"{g}.y.")],
            keep_x_c + [("P.y.", f"P.{g}.y.")],
        )
        place(
            _switch_proto(kk, n, m),
            f"swR{ell}",
            [("x.", f"{g}.y."), ("y.", "y.")],
            [("P.x.", f"P.{g}.y."), ("P.y.", "P.y.")],
        )
    for ell in range(1, kk + 1):
        g = f"incL{ell}"
        place(
            _inc_left_proto(ell, kk, n, m),
            g,
            keep_x + [("y.", f"{g}.y.")],
            keep_x_c + [("P.y.", f"P.{g}.y.")],
        )
        place(
            _switch_proto(kk, n, m),
            f"swL{ell}",
            [("x.", f"{g}.y."), ("y.", "y.")],
            [("P.x.", f"P.{g}.y."), ("P.y.", "P.y.")],
        )
    place(
        _switch_proto(kk, n, m),
        "swS",
        [("x.", "y."), ("y.", "x.")],
        [("P.x.", "P.y."), ("P.y.", "P.x.")],
    )
    q0 = start_config(kk, n, m)
    place(_init_proto(q0, kk, n, m), "init", [("y.", "x.")], [("P.y.", "P.x.")])

    a = asm_a.structure(f"A-k{k}-n{n}-m{m}")
    b = asm_b.structure(f"B-k{k}-n{n}-m{m}")
    return InstancePair(a, b, k, n, m, roles_a, roles_b)
