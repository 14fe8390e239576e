"""Explicit Duplicator strategy families on the gadgets.

Each builder emits a Strategy over a gadget view: a family of partial
homomorphisms given by maximal elements, plus critical positions where the
family hands control to another strategy.  The global sequence builder
assembles, for the full generated instance, the chain of critical strategies
whose length certifies the propagation-depth lower bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .gadgets import (
    Configuration,
    GadgetView,
    InstancePair,
    alpha_inverse,
    applicability,
    build_instance,
    h_block,
    hollow_config,
    max_config,
    start_config,
    successor,
    t_left,
    t_right,
)
from .pebblegame import (
    ResourceLimitError,
    Strategy,
    compose_all,
    strategy_of,
    union_strategies,
)
from .structures import PartialMap


def _resolve(v: GadgetView, mapping: dict) -> PartialMap:
    return PartialMap((v.ra(r), v.rb(img)) for r, img in mapping.items())


def _x_roles(v: GadgetView, q: Configuration, prefix: str = "x") -> dict:
    out = {}
    for i in range(1, v.kk + 1):
        for j in range(1, v.n + 1):
            img = q.b[i - 1] if (j == q.a[i - 1] and i not in q.blocked) else 0
            out[f"{prefix}.{i}.{j}"] = f"{prefix}.{i}.{img}"
    return out


def _wrap(j: int, kk: int) -> int:
    return (j - 1) % kk + 1


# -- winning gadget -------------------------------------------------------------


def win_strategy(v: GadgetView, q: Configuration) -> Strategy:
    """Duplicator's answer on the winning gadget for any non-final position."""
    top = max_config(v.kk, v.n, v.m)
    if q.valid and q.a == top.a and q.b == top.b:
        raise ValueError("no winning-gadget strategy exists for the final configuration")
    pick = None
    for j in range(1, v.kk + 1):
        if not (q.a[j - 1] == v.n and j not in q.blocked and q.b[j - 1] == v.m):
            pick = j
            break
    mapping = _x_roles(v, q)
    mapping["a"] = f"a.{pick}"
    return strategy_of(_resolve(v, mapping))


# -- increment gadgets -----------------------------------------------------------


def inc_output_config(kind: str, ell: int, q: Configuration) -> Configuration:
    """Configuration on the increment gadget's output under Duplicator's
    intended play: the successor when applicable, an invalid configuration
    following the unique-neighbor rule otherwise."""
    if kind == "right":
        blocked = t_right(ell, q)
        if not blocked:
            return successor(q)
        b = []
        for i in range(1, q.kk + 1):
            if i in blocked:
                b.append(1)
            elif i < ell:
                b.append(q.b[i - 1])
            elif i == ell:
                b.append(q.b[i - 1] + 1)
            else:
                b.append(1)
        return Configuration(q.a, b, blocked, q.n, q.m)
    if kind == "left":
        blocked = t_left(ell, q)
        if not blocked:
            return successor(q)
        a = []
        for i in range(1, q.kk + 1):
            if i in blocked:
                a.append(1)
            elif i < ell:
                a.append(q.a[i - 1])
            elif i == ell:
                a.append(q.a[i - 1] + 1)
            else:
                a.append(1)
        return Configuration(a, (1,) * q.kk, blocked, q.n, q.m)
    raise ValueError(f"unknown increment kind {kind!r}")


def inc_strategy(v: GadgetView, kind: str, ell: int, q: Configuration) -> Strategy:
    """The winning strategy on one increment gadget for input configuration q."""
    out_cfg = inc_output_config(kind, ell, q)
    mapping = _x_roles(v, q, "x")
    mapping.update(_x_roles(v, out_cfg, "y"))
    return strategy_of(_resolve(v, mapping))


# -- the switch -------------------------------------------------------------------


@dataclass(frozen=True)
class SwitchStrategies:
    out: Strategy
    restart: Strategy | None
    inp: Strategy | None
    out_crit: frozenset
    restart_crit: dict  # t -> frozenset of critical positions


def _out_plain(v: GadgetView, q: Configuration) -> dict:
    mapping = {}
    for i in range(1, v.kk + 1):
        for j in range(1, v.n + 1):
            mapping[f"x.{i}.{j}"] = f"x.{i}.0"
            mapping[f"a.{i}.{j}"] = f"a.{i}.0"
            mapping[f"b.{i}.{j}"] = f"b.{i}.0.{_wrap(j, v.kk)}"
    mapping.update(_x_roles(v, q, "y"))
    return mapping


def _out_sigma(v: GadgetView, q: Configuration, sigma: dict) -> dict:
    mapping = {}
    for i in range(1, v.kk + 1):
        ai, bi = q.a[i - 1], q.b[i - 1]
        for j in range(1, v.n + 1):
            mapping[f"x.{i}.{j}"] = f"x.{i}.0"
            if j == ai:
                mapping[f"a.{i}.{j}"] = f"a.{i}.{bi}.{sigma[i]}"
                mapping[f"b.{i}.{j}"] = f"b.{i}.{bi}.{sigma[i]}"
            else:
                mapping[f"a.{i}.{j}"] = f"a.{i}.0"
                mapping[f"b.{i}.{j}"] = f"b.{i}.0.{sigma[i]}"
    mapping.update(_x_roles(v, q, "y"))
    return mapping


def _restart_maps(v: GadgetView, q: Configuration):
    """Total homomorphisms pinning the input to q and the output to hollow.

    One map per choice of pairwise-distinct tags for the unblocked input
    rows plus one leftover tag shared by all hollow b-rows.
    """
    free = [i for i in range(1, v.kk + 1) if i not in q.blocked]
    out = []
    for image in itertools.permutations(range(1, v.kk + 1), len(free)):
        sigma = dict(zip(free, image))
        for t in sorted(set(range(1, v.kk + 1)) - set(image)):
            mapping = _x_roles(v, q, "x")
            for i in range(1, v.kk + 1):
                ai, bi = q.a[i - 1], q.b[i - 1]
                for j in range(1, v.n + 1):
                    if j == ai and i not in q.blocked:
                        mapping[f"a.{i}.{j}"] = f"a.{i}.{bi}.{sigma[i]}"
                    else:
                        mapping[f"a.{i}.{j}"] = f"a.{i}.0"
                    mapping[f"b.{i}.{j}"] = f"b.{i}.0.{t}"
                    mapping[f"y.{i}.{j}"] = f"y.{i}.0"
            out.append(mapping)
    return out


def _in_sigma(v: GadgetView, q: Configuration, sigma: dict) -> dict:
    mapping = _x_roles(v, q, "x")
    for i in range(1, v.kk + 1):
        ai, bi = q.a[i - 1], q.b[i - 1]
        for j in range(1, v.n + 1):
            if j == ai:
                mapping[f"a.{i}.{j}"] = f"a.{i}.{bi}.{sigma[i]}"
            else:
                mapping[f"a.{i}.{j}"] = f"a.{i}.0"
            mapping[f"y.{i}.{j}"] = f"y.{i}.0"
    return mapping


def _in_sigma_hole(v: GadgetView, q: Configuration, sigma: dict, ell: int) -> dict:
    hole = next(i for i in range(1, v.kk + 1) if sigma[i] == ell)
    mapping = _x_roles(v, q, "x")
    for i in range(1, v.kk + 1):
        ai, bi = q.a[i - 1], q.b[i - 1]
        for j in range(1, v.n + 1):
            if j == ai:
                if i != hole:
                    mapping[f"a.{i}.{j}"] = f"a.{i}.{bi}.{sigma[i]}"
            else:
                mapping[f"a.{i}.{j}"] = f"a.{i}.0"
            mapping[f"b.{i}.{j}"] = f"b.{i}.0.{ell}"
            mapping[f"y.{i}.{j}"] = f"y.{i}.0"
    return mapping


def switch_strategies(v: GadgetView, q: Configuration) -> SwitchStrategies:
    """The output, restart, and critical input strategies on one switch."""
    sigmas = [
        dict(zip(range(1, v.kk + 1), perm))
        for perm in itertools.permutations(range(1, v.kk + 1))
    ]
    out_maps = [_out_plain(v, q)]
    if q.valid:
        out_maps += [_out_sigma(v, q, s) for s in sigmas]
    out = strategy_of(*(_resolve(v, m) for m in out_maps))

    restart = None
    if not q.valid:
        restart = strategy_of(*(_resolve(v, m) for m in _restart_maps(v, q)))

    inp = None
    out_crit: frozenset = frozenset()
    restart_crit: dict = {}
    if q.valid:
        out_crit = frozenset(
            PartialMap(
                (
                    v.ra(f"a.{i}.{q.a[i - 1]}"),
                    v.rb(f"a.{i}.{q.b[i - 1]}.{s[i]}"),
                )
                for i in range(1, v.kk + 1)
            )
            for s in sigmas
        )
        for t in range(1, v.kk + 1):
            crits = set()
            for s in sigmas:
                core = [
                    (
                        v.ra(f"a.{i}.{q.a[i - 1]}"),
                        v.rb(f"a.{i}.{q.b[i - 1]}.{s[i]}"),
                    )
                    for i in range(1, v.kk + 1)
                    if i != t
                ]
                for u in range(1, v.kk + 1):
                    for col in range(1, v.n + 1):
                        crits.add(
                            PartialMap(
                                core + [(v.ra(f"b.{u}.{col}"), v.rb(f"b.{u}.0.{s[t]}"))]
                            )
                        )
            restart_crit[t] = frozenset(crits)
        maps = [_in_sigma(v, q, s) for s in sigmas]
        maps += [_in_sigma_hole(v, q, s, ell) for s in sigmas for ell in range(1, v.kk + 1)]
        crit = set(out_crit)
        for t in restart_crit:
            crit |= restart_crit[t]
        inp = Strategy([_resolve(v, m) for m in maps], crit)

    return SwitchStrategies(out, restart, inp, out_crit, restart_crit)


# -- the initialization gadget ------------------------------------------------------


@dataclass(frozen=True)
class InitStrategies:
    winning: Strategy
    critical: Strategy


def init_strategies(v: GadgetView, q0: Configuration, q_prime: Configuration) -> InitStrategies:
    """Strategies on the initialization gadget built with start configuration q0."""
    if not q0.valid:
        raise ValueError("the initialization gadget requires a valid start configuration")
    m1, m2 = v.sub("M1."), v.sub("M2.")
    z1 = strategy_of(PartialMap([(v.ra("z"), v.rb("z1"))]))
    z2 = strategy_of(PartialMap([(v.ra("z"), v.rb("z2"))]))
    sw1 = switch_strategies(m1, q0)
    sw2 = switch_strategies(m2, q0)

    def y_part(cfg):
        return strategy_of(_resolve(v, _x_roles(v, cfg, "y")))

    def in_branch(side: int, t: int, cfg):
        blocked_q = q0.with_blocked({t})
        r1 = switch_strategies(m1, blocked_q).restart
        r2 = switch_strategies(m2, blocked_q).restart
        if side == 1:
            return compose_all([z1, sw1.inp, r2, y_part(cfg)])
        return compose_all([z2, r1, sw2.inp, y_part(cfg)])

    def critical_for(cfg) -> Strategy:
        return union_strategies(
            [in_branch(side, t, cfg) for t in range(1, v.kk + 1) for side in (1, 2)]
        )

    init1 = compose_all([z2, sw1.out, sw2.inp, y_part(q0)])
    init2 = compose_all([z1, sw1.inp, sw2.out, y_part(q0)])
    winning = union_strategies([init1, init2, critical_for(q0)])
    return InitStrategies(winning=winning, critical=critical_for(q_prime))


# -- the global hand-off sequence -----------------------------------------------------


def _one_round_strategy(inst: InstancePair, k: int, limit_bytes: int) -> Strategy:
    """Fallback for single-configuration instances (n = m = 1).

    With only one valid configuration the start position is already the
    final one, so no gadget strategy can cover the winning gadget and the
    hand-off recipe degenerates.  The family of all partial homomorphisms of
    size up to k-1, with every size-(k-1) member critical, is still a valid
    critical strategy and certifies the trivial two-round bound.
    """
    a, b = inst.a, inst.b
    by_color: dict = {}
    for w in b.vertices:
        by_color.setdefault(b.color[w], []).append(w)
    avs = a.vertices

    def compatible(pairs, u, w):
        if u in a.adj[u] and w not in b.adj[w]:
            return False
        for u2, w2 in pairs:
            if u2 in a.adj[u] and w2 not in b.adj[w]:
                return False
        return True

    def extendable(pairs):
        dom = {u for u, _ in pairs}
        for u in avs:
            if u in dom:
                continue
            if any(compatible(pairs, u, w) for w in by_color.get(a.color[u], ())):
                return True
        return False

    layers = [[()]]
    count = 0
    for _ in range(1, k):
        nxt = []
        for pairs in layers[-1]:
            start = a.index[pairs[-1][0]] + 1 if pairs else 0
            for ui in range(start, len(avs)):
                u = avs[ui]
                for w in by_color.get(a.color[u], ()):
                    if compatible(pairs, u, w):
                        nxt.append(pairs + ((u, w),))
                        count += 1
                        if count * 120 > limit_bytes:
                            raise ResourceLimitError(
                                "one-round fallback family exceeds the memory limit"
                            )
        if not nxt:
            break
        layers.append(nxt)
    maximal = [PartialMap(pairs) for pairs in layers[-1]]
    for layer in layers[:-1]:
        maximal.extend(PartialMap(pairs) for pairs in layer if pairs and not extendable(pairs))
    crit = [PartialMap(pairs) for pairs in layers[-1] if len(pairs) == k - 1]
    return Strategy(maximal, crit)


def _estimate_guard(parts, limit_bytes: int) -> None:
    total = 1
    for p in parts:
        total *= max(1, len(p.maximal))
    pairs = sum(len(m) for p in parts for m in p.maximal[:1])
    approx = total * max(pairs, 1) * 120
    if approx > limit_bytes:
        raise ResourceLimitError(
            f"strategy composition would need about {approx} bytes; "
            f"limit is {limit_bytes}"
        )


def build_duplicator_sequence(
    k: int,
    n: int,
    m: int,
    instance: InstancePair | None = None,
    memory_limit_bytes: int = 4 << 30,
):
    """The chain of critical strategies certifying the depth lower bound.

    Returns a list of strategies over the generated instance such that every
    critical position of one strategy is a non-critical member of a strategy
    at most one step later; its length plus one bounds Spoiler's rounds from
    below.  Intended for desk-scale parameters; the builder fails fast when
    the estimated footprint exceeds ``memory_limit_bytes``.
    """
    inst = instance if instance is not None else build_instance(k, n, m)
    kk = inst.kk
    q0 = start_config(kk, n, m)
    total = n**kk * m**kk
    v_init = inst.view("init")
    v_win = inst.view("win")
    v_single = inst.view("swS")

    def gadget_parts(q, init_part):
        """Shared shape of the G-type strategies: q sits on the x-block."""
        parts = [init_part]
        app = applicability(q)
        for kind, ell, inc_name, sw_name in inst.inc_gadgets():
            vi, vs = inst.view(inc_name), inst.view(sw_name)
            parts.append(inc_strategy(vi, kind, ell, q))
            if inc_name == app:
                parts.append(switch_strategies(vs, successor(q)).inp)
            else:
                parts.append(switch_strategies(vs, inc_output_config(kind, ell, q)).restart)
        parts.append(switch_strategies(v_single, q).out)
        parts.append(win_strategy(v_win, q))
        _estimate_guard(parts, memory_limit_bytes)
        return compose_all(parts)

    def g_strategy(i):
        q = alpha_inverse(i, kk, n, m)
        return gadget_parts(q, init_strategies(v_init, q0, q).critical)

    def g_init():
        return gadget_parts(q0, init_strategies(v_init, q0, q0).winning)

    def g_restart(i, t):
        q_t = alpha_inverse(i, kk, n, m).with_blocked({t})
        parts = [init_strategies(v_init, q0, q_t).critical]
        for kind, ell, inc_name, sw_name in inst.inc_gadgets():
            vi, vs = inst.view(inc_name), inst.view(sw_name)
            parts.append(inc_strategy(vi, kind, ell, q_t))
            parts.append(switch_strategies(vs, inc_output_config(kind, ell, q_t)).restart)
        parts.append(switch_strategies(v_single, q_t).out)
        parts.append(win_strategy(v_win, q_t))
        _estimate_guard(parts, memory_limit_bytes)
        return compose_all(parts)

    def f_strategy(i):
        q = alpha_inverse(i, kk, n, m)
        hollow = hollow_config(kk, n, m)
        parts = [init_strategies(v_init, q0, hollow).critical]
        for kind, ell, inc_name, sw_name in inst.inc_gadgets():
            vi, vs = inst.view(inc_name), inst.view(sw_name)
            parts.append(inc_strategy(vi, kind, ell, hollow))
            parts.append(switch_strategies(vs, q).out)
        parts.append(switch_strategies(v_single, q).inp)
        parts.append(win_strategy(v_win, hollow))
        _estimate_guard(parts, memory_limit_bytes)
        return compose_all(parts)

    def f_restart(i, t):
        q_t = alpha_inverse(i, kk, n, m).with_blocked({t})
        hollow = hollow_config(kk, n, m)
        parts = [init_strategies(v_init, q0, hollow).critical]
        for kind, ell, inc_name, sw_name in inst.inc_gadgets():
            vi, vs = inst.view(inc_name), inst.view(sw_name)
            parts.append(inc_strategy(vi, kind, ell, hollow))
            parts.append(switch_strategies(vs, q_t).out)
        parts.append(switch_strategies(v_single, q_t).restart)
        parts.append(win_strategy(v_win, hollow))
        _estimate_guard(parts, memory_limit_bytes)
        return compose_all(parts)

    if total == 1:
        return [_one_round_strategy(inst, k, memory_limit_bytes)]

    start_parts = [g_init()]
    for i in range(0, total - 1):
        for t in range(1, kk + 1):
            start_parts.append(g_restart(i, t))
    for i in range(1, total - 1):
        for t in range(1, kk + 1):
            start_parts.append(f_restart(i, t))
    sequence = [union_strategies(start_parts)]
    for i in range(1, total):
        sequence.append(f_strategy(i))
        if i <= total - 2:
            sequence.append(g_strategy(i))
    return sequence
