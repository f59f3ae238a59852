"""Systems of gadgets: reachability, boundary languages, simulation checks,
substitution, and the two checkable-gadget constructions (serial check
wiring and the checking-path builder).

A system is a set of gadget instances with initial states plus a
connection graph over instance locations (written ``"id.loc"``) and branch
nodes (written ``"@name"``).  An agent moves freely inside a connected
component of the connection graph and crosses gadgets via transitions.
"""

from __future__ import annotations

import itertools
import json
import os
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .core import (
    DEAD,
    Gadget,
    PostselectSpec,
    Step,
    TraversalDfa,
    check_broken_preservation,
    post_select,
    reflexive_closure,
    step_states,
    transitive_closure,
    traversal_language_dfa,
    dfa_equal,
)
from .errors import InputError, ResourceError
from .library import library_gadget
from .planar import check_planar as _check_planar_impl

DEFAULT_CAP = 1 << 20


def configured_cap(cap: Optional[int] = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get("GADGETFORGE_CAP")
    return int(env) if env else DEFAULT_CAP


@dataclass(frozen=True)
class Instance:
    id: str
    gadget: str
    state: str
    orient: str = "identity"


@dataclass(frozen=True)
class GadgetSystem:
    instances: tuple[Instance, ...]
    connections: frozenset[frozenset[str]]
    start: Optional[str] = None
    target: Optional[str] = None
    defs: Mapping[str, Gadget] = field(default_factory=dict)
    embedding: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        ids = [i.id for i in self.instances]
        if len(set(ids)) != len(ids):
            raise InputError("duplicate instance ids")
        for inst in self.instances:
            g = self.gadget_of(inst)
            if inst.state not in g.states:
                raise InputError(f"{inst.id}: initial state {inst.state!r} not in {g.name}")
        known = set(self.all_endpoints())
        for pair in self.connections:
            for e in pair:
                if not e.startswith("@") and e not in known:
                    raise InputError(f"connection endpoint {e!r} does not exist")
        for e in (self.start, self.target):
            if e is not None and not e.startswith("@") and e not in known:
                raise InputError(f"endpoint {e!r} does not exist")

    # -- structure ---------------------------------------------------------

    def gadget_of(self, inst: Instance) -> Gadget:
        if inst.gadget in self.defs:
            base = self.defs[inst.gadget]
            if inst.orient != "identity":
                base = _orient(base, inst.orient)
            return base
        return library_gadget(inst.gadget, inst.orient)

    def instance(self, iid: str) -> Instance:
        for inst in self.instances:
            if inst.id == iid:
                return inst
        raise InputError(f"unknown instance {iid!r}")

    def all_endpoints(self) -> list[str]:
        eps = []
        for inst in self.instances:
            for l in self.gadget_of(inst).locations:
                eps.append(f"{inst.id}.{l}")
        for pair in self.connections:
            for e in pair:
                if e.startswith("@") and e not in eps:
                    eps.append(e)
        for e in (self.start, self.target):
            if e is not None and e.startswith("@") and e not in eps:
                eps.append(e)
        return eps

    def connection_pairs(self) -> list[tuple[str, str]]:
        out = []
        for pair in self.connections:
            items = sorted(pair)
            if len(items) == 1:
                out.append((items[0], items[0]))
            else:
                out.append((items[0], items[1]))
        return sorted(out)

    def components(self) -> dict[str, str]:
        """Endpoint -> canonical component representative (min endpoint)."""
        parent: dict[str, str] = {e: e for e in self.all_endpoints()}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a: str, b: str) -> None:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

        for u, v in self.connection_pairs():
            union(u, v)
        return {e: find(e) for e in parent}

    def initial_vector(self) -> tuple[str, ...]:
        return tuple(i.state for i in self.instances)

    # -- edits -------------------------------------------------------------

    def with_connection(self, a: str, b: str) -> "GadgetSystem":
        return replace(self, connections=self.connections | {frozenset((a, b))})

    def with_instance(self, inst: Instance, gadget: Optional[Gadget] = None) -> "GadgetSystem":
        defs = dict(self.defs)
        if gadget is not None:
            defs[inst.gadget] = gadget
        return replace(self, instances=self.instances + (inst,), defs=defs)

    def with_states(self, assignment: Mapping[str, str]) -> "GadgetSystem":
        insts = tuple(
            replace(i, state=assignment.get(i.id, i.state)) for i in self.instances
        )
        return replace(self, instances=insts)


def _orient(g: Gadget, orientation: str) -> Gadget:
    from .library import ORIENTATIONS

    if orientation not in ORIENTATIONS:
        raise InputError(f"unknown orientation {orientation!r}")
    k = int(orientation[1:]) if orientation != "identity" else 0
    locs = list(g.locations)
    if k >= 4:
        locs = locs[::-1]
        k -= 4
    locs = locs[k:] + locs[:k]
    return Gadget(g.name, tuple(locs), g.states, g.transitions, g.initial)


# -- reachability ----------------------------------------------------------


def solve_reachability(
    system: GadgetSystem,
    start: Optional[str] = None,
    target: Optional[str] = None,
    cap: Optional[int] = None,
) -> Optional[list[dict]]:
    """Shortest legal system traversal start -> target, or None.

    The witness is a list of ``{"id", "from", "to", "state_after"}`` dicts;
    free moves are implicit.  Deterministic: BFS with sorted expansion.
    Raises ResourceError when the configuration cap is hit.
    """
    cap = configured_cap(cap)
    start = start if start is not None else system.start
    target = target if target is not None else system.target
    if start is None or target is None:
        raise InputError("system has no start/target")
    comp = system.components()
    if start not in comp or target not in comp:
        raise InputError("start/target endpoint missing")
    gadgets = [system.gadget_of(i) for i in system.instances]
    ids = [i.id for i in system.instances]

    init = (system.initial_vector(), comp[start])
    goal_comp = comp[target]
    seen = {init}
    parent: dict = {init: None}
    queue = deque([init])
    while queue:
        cur = queue.popleft()
        vec, at = cur
        if at == goal_comp:
            moves = []
            node = cur
            while parent[node] is not None:
                node, move = parent[node]
                moves.append(move)
            return list(reversed(moves))
        steps = []
        for idx, gadget in enumerate(gadgets):
            q = vec[idx]
            for q2, a, r, b in sorted(gadget.transitions):
                if q2 == q and comp[f"{ids[idx]}.{a}"] == at:
                    steps.append((ids[idx], a, b, r, idx))
        for iid, a, b, r, idx in sorted(steps):
            vec2 = vec[:idx] + (r,) + vec[idx + 1 :]
            nxt = (vec2, comp[f"{iid}.{b}"])
            if nxt not in seen:
                if len(seen) >= cap:
                    raise ResourceError(f"configuration cap {cap} exceeded")
                seen.add(nxt)
                parent[nxt] = (cur, {"id": iid, "from": a, "to": b, "state_after": r})
                queue.append(nxt)
    return None


def replay_witness(system: GadgetSystem, start: str, witness: Sequence[Mapping]) -> bool:
    """Re-execute a witness step by step; True iff every step is legal."""
    comp = system.components()
    vec = dict(zip([i.id for i in system.instances], system.initial_vector()))
    at = comp[start]
    for move in witness:
        inst = system.instance(move["id"])
        gadget = system.gadget_of(inst)
        if comp[f"{inst.id}.{move['from']}"] != at:
            return False
        nxt = step_states(gadget, vec[inst.id], move["from"], move["to"])
        if move["state_after"] not in nxt:
            return False
        vec[inst.id] = move["state_after"]
        at = comp[f"{inst.id}.{move['to']}"]
    return True


# -- planarity -------------------------------------------------------------


def check_planar_system(system: GadgetSystem, outer_cycle: Optional[list[str]] = None):
    return _check_planar_impl(system, outer_cycle)


# -- boundary languages and simulation --------------------------------------


@dataclass(frozen=True)
class SimulationMap:
    """m: target-gadget location -> system endpoint; f: target state ->
    per-instance initial-state assignment."""

    m: Mapping[str, str]
    f: Mapping[str, Mapping[str, str]]

    def __post_init__(self):
        if len(set(self.m.values())) != len(self.m):
            raise InputError("simulation map m is not injective")


def boundary_relation(
    system: GadgetSystem,
    m: Mapping[str, str],
    initial: Optional[Mapping[str, str]] = None,
    cap: Optional[int] = None,
) -> TraversalDfa:
    """Deterministic automaton of the induced boundary traversal language.

    States are subsets of reachable state vectors; an (a, b) step relates
    vectors v -> v' when an agent entering at m(a) with vector v can leave
    at m(b) having produced v'.  The agent is assumed to wait outside
    between steps, so only vectors matter.
    """
    cap = configured_cap(cap)
    comp = system.components()
    for loc, ref in m.items():
        if ref not in comp:
            raise InputError(f"mapped endpoint {ref!r} missing for location {loc!r}")
    sys0 = system.with_states(dict(initial)) if initial else system
    gadgets = [sys0.gadget_of(i) for i in sys0.instances]
    ids = [i.id for i in sys0.instances]
    locs = sorted(m)
    alphabet = frozenset((a, b) for a in locs for b in locs)

    def explore(vec: tuple[str, ...], entry_comp: str) -> set[tuple[tuple[str, ...], str]]:
        seen = {(vec, entry_comp)}
        queue = deque([(vec, entry_comp)])
        while queue:
            v, at = queue.popleft()
            for idx, gadget in enumerate(gadgets):
                q = v[idx]
                for q2, a, r, b in gadget.transitions:
                    if q2 == q and comp[f"{ids[idx]}.{a}"] == at:
                        v2 = v[:idx] + (r,) + v[idx + 1 :]
                        nxt = (v2, comp[f"{ids[idx]}.{b}"])
                        if nxt not in seen:
                            if len(seen) > cap:
                                raise ResourceError(f"configuration cap {cap} exceeded")
                            seen.add(nxt)
                            queue.append(nxt)
        return seen

    # edge map on vectors, computed lazily over reachable vectors
    edges: dict[tuple[tuple[str, ...], Step], frozenset[tuple[str, ...]]] = {}
    vec0 = sys0.initial_vector()
    vec_seen = {vec0}
    vec_queue = deque([vec0])
    explored: dict[tuple[tuple[str, ...], str], set] = {}
    while vec_queue:
        vec = vec_queue.popleft()
        for a in locs:
            key = (vec, comp[m[a]])
            if key not in explored:
                explored[key] = explore(vec, comp[m[a]])
            reach = explored[key]
            for b in locs:
                outs = frozenset(v for v, at in reach if at == comp[m[b]])
                edges[(vec, (a, b))] = outs
                for v in outs:
                    if v not in vec_seen:
                        if len(vec_seen) > cap:
                            raise ResourceError(f"configuration cap {cap} exceeded")
                        vec_seen.add(v)
                        vec_queue.append(v)

    # subset construction to a deterministic automaton
    initial_set = frozenset([vec0])
    states = {initial_set, DEAD}
    delta: dict = {}
    work = [initial_set]
    while work:
        cur = work.pop()
        for sym in sorted(alphabet):
            nxt = frozenset(v2 for v in cur for v2 in edges.get((v, sym), ()))
            delta[(cur, sym)] = nxt
            if nxt not in states:
                states.add(nxt)
                work.append(nxt)
    for sym in sorted(alphabet):
        delta[(DEAD, sym)] = DEAD
    return TraversalDfa(alphabet, frozenset(states), initial_set, delta)


def verify_simulation(
    system: GadgetSystem,
    sim: SimulationMap,
    target: Gadget,
    planar: bool = False,
    cap: Optional[int] = None,
) -> bool:
    """Exact language equality between the system's boundary behavior and
    the target gadget, state by state.

    Comparison is modulo null bounces: a system always lets the agent enter
    an endpoint and leave again without doing anything, which no abstract
    diagram draws.  In planar mode the system must additionally be planar
    with the mapped locations on a common face in the target's cyclic
    order.
    """
    if set(sim.m.keys()) != set(target.locations):
        raise InputError("simulation map does not cover the target's locations")
    if set(sim.f.keys()) != set(target.states):
        raise InputError("simulation map does not cover the target's states")
    ref = reflexive_closure(target)
    identity = {l: l for l in target.locations}
    for q in sorted(target.states):
        dfa_sys = boundary_relation(system, sim.m, sim.f[q], cap=cap)
        dfa_tgt = traversal_language_dfa(ref, q)
        if not dfa_equal(dfa_tgt, dfa_sys, identity):
            return False
    if planar:
        cycle = [sim.m[l] for l in target.locations]
        ok, _ = check_planar_system(system, cycle)
        if not ok:
            return False
    return True


def boundary_gadget(
    system: GadgetSystem,
    m: Mapping[str, str],
    initials: Mapping[str, Mapping[str, str]],
    name: str = "boundary",
    cap: Optional[int] = None,
) -> Gadget:
    """Materialize the boundary behavior of a system as a Gadget.

    ``initials`` names the exposed states: state name -> per-instance
    assignment.  States of the result are reachable state vectors (plus the
    named seeds); transitions are the boundary (a, b) edges.  Null bounces
    are dropped.
    """
    comp = system.components()
    locs = sorted(m)
    seeds = {}
    for sname, assign in initials.items():
        seeds[sname] = system.with_states(dict(assign)).initial_vector()

    gadgets = [system.gadget_of(i) for i in system.instances]
    ids = [i.id for i in system.instances]

    def explore(vec, entry_comp):
        seen = {(vec, entry_comp)}
        queue = deque([(vec, entry_comp)])
        while queue:
            v, at = queue.popleft()
            for idx, gadget in enumerate(gadgets):
                q = v[idx]
                for q2, a, r, b in gadget.transitions:
                    if q2 == q and comp[f"{ids[idx]}.{a}"] == at:
                        v2 = v[:idx] + (r,) + v[idx + 1 :]
                        nxt = (v2, comp[f"{ids[idx]}.{b}"])
                        if nxt not in seen:
                            if len(seen) > configured_cap(cap):
                                raise ResourceError("configuration cap exceeded")
                            seen.add(nxt)
                            queue.append(nxt)
        return seen

    vec_names: dict[tuple[str, ...], str] = {}
    for sname in sorted(seeds):
        vec_names.setdefault(seeds[sname], sname)

    def name_of(vec) -> str:
        if vec not in vec_names:
            vec_names[vec] = "s" + str(len(vec_names))
        return vec_names[vec]

    transitions = set()
    seen_vecs = set(seeds.values())
    queue = deque(sorted(seeds.values()))
    while queue:
        vec = queue.popleft()
        for a in locs:
            reach = explore(vec, comp[m[a]])
            for v2, at in reach:
                for b in locs:
                    if at == comp[m[b]]:
                        if v2 == vec and a == b:
                            continue
                        transitions.add((name_of(vec), a, name_of(v2), b))
                        if v2 not in seen_vecs:
                            seen_vecs.add(v2)
                            queue.append(v2)
    states = frozenset(name_of(v) for v in seen_vecs) | frozenset(seeds)
    return Gadget(name, tuple(locs), states, frozenset(transitions), None)


# -- substitution ------------------------------------------------------------


def substitute(
    system: GadgetSystem, iid: str, sub: GadgetSystem, sim: SimulationMap
) -> GadgetSystem:
    """Replace instance ``iid`` by the simulating subsystem ``sub``.

    Sub-instance ids are namespaced ``iid/subid``; connections incident to
    the replaced instance's locations are spliced via ``sim.m``; initial
    states follow ``sim.f`` applied to the instance's current state.
    """
    inst = system.instance(iid)
    if inst.state not in sim.f:
        raise InputError(f"substitution does not cover initial state {inst.state!r}")
    assign = sim.f[inst.state]

    def ns(ref: str) -> str:
        if ref.startswith("@"):
            return f"@{iid}/{ref[1:]}"
        return f"{iid}/{ref}"

    new_insts = [i for i in system.instances if i.id != iid]
    defs = dict(system.defs)
    for si in sub.instances:
        state = assign.get(si.id, si.state)
        gadget = sub.gadget_of(si)
        gname = f"{iid}/{si.gadget}" if si.gadget in sub.defs else si.gadget
        if si.gadget in sub.defs:
            defs[gname] = sub.defs[si.gadget]
        new_insts.append(Instance(ns(si.id), gname, state, si.orient))

    conns = set()
    mapped = {f"{iid}.{loc}": ns(ref) for loc, ref in sim.m.items()}

    def rewrite(e: str) -> str:
        return mapped.get(e, e)

    for pair in system.connections:
        items = sorted(pair)
        a = rewrite(items[0])
        b = rewrite(items[-1])
        conns.add(frozenset((a, b)))
    for pair in sub.connections:
        items = sorted(pair)
        conns.add(frozenset((ns(items[0]), ns(items[-1]))))

    start = rewrite(system.start) if system.start else None
    target = rewrite(system.target) if system.target else None
    return GadgetSystem(tuple(new_insts), frozenset(conns), start, target, defs)


# -- checkable wiring (serial check chain) -----------------------------------


@dataclass(frozen=True)
class CheckableDescriptor:
    """A simply-checkable instance and its two check locations."""

    instance: str
    c_in: str
    c_out: str
    role: str = "checked"

    def __post_init__(self):
        if self.c_in == self.c_out:
            raise InputError("cIn and cOut must differ")


def wire_postselection(
    system: GadgetSystem,
    target: str,
    checkables: Sequence[CheckableDescriptor],
    planar: bool = False,
    chx: Optional[str] = None,
) -> tuple[GadgetSystem, str]:
    """Serial checking chain: target -> cIn_1, cOut_i -> cIn_{i+1}; the new
    target is cOut_n.  Preserves the reachability answer.

    In planar mode each added connection that breaks planarity is realized
    by inserting copies of the checkable hallway crossover ``chx`` on
    crossed hallway edges, check line along the new connection.
    """
    if not checkables:
        return system, target
    for d in checkables:
        inst = system.instance(d.instance)
        g = system.gadget_of(inst)
        for l in (d.c_in, d.c_out):
            if l not in g.locations:
                raise InputError(f"{d.instance}: no location {l!r}")
    if planar and chx is None:
        raise InputError("planar mode requires a CHX gadget name")

    out = system
    counter = itertools.count()
    prev = target
    for d in checkables:
        out = _connect_with_repair(out, prev, f"{d.instance}.{d.c_in}", planar, chx, counter)
        prev = f"{d.instance}.{d.c_out}"
    new_target = prev
    return replace(out, target=new_target), new_target


def _connect_with_repair(
    system: GadgetSystem,
    u: str,
    v: str,
    planar: bool,
    chx: Optional[str],
    counter,
) -> GadgetSystem:
    """Add connection u-v; in planar mode repair crossings with CHX copies.

    The CHX check line is oriented along the new u -> v connection (bottom
    toward u); the crossed hallway edge is re-routed through the CHX's
    left/right tunnel.
    """
    cand = system.with_connection(u, v)
    if not planar:
        return cand
    ok, _ = check_planar_system(cand)
    if ok:
        return cand
    # try to cross one existing hallway edge; cascade if needed
    for pair in sorted(system.connections, key=sorted):
        items = sorted(pair)
        if len(items) != 2:
            continue
        x, y = items
        if {x, y} & {u, v}:
            continue
        cid = f"chx{next(counter)}"
        g = library_gadget(chx)
        attempt = replace(system, connections=system.connections - {pair})
        attempt = attempt.with_instance(Instance(cid, chx, g.initial or sorted(g.states)[0]))
        attempt = attempt.with_connection(x, f"{cid}.left")
        attempt = attempt.with_connection(f"{cid}.right", y)
        attempt = attempt.with_connection(u, f"{cid}.bottom")
        result = _connect_with_repair(attempt, f"{cid}.top", v, planar, chx, counter)
        ok, _ = check_planar_system(result)
        if ok:
            return result
    raise InputError(f"could not planarize connection {u} - {v}")


# -- the checking-path builder ----------------------------------------------


def build_simply_checkable(
    gadget: Gadget,
    spec: PostselectSpec,
    planar_repair: bool = True,
) -> tuple[GadgetSystem, SimulationMap, CheckableDescriptor, Gadget]:
    """Construct a system over {G, SO, SD, SX, WCX} that locally simulates a
    simply checkable PostSelect(G, C, L').

    Layout: each retained location l gets a vertical edge out of G crossed
    twice by the checking path (two WCX delimiters); each check a_i -> b_i
    is enforced by an opening gadget O_i and a dicrumbler D_i; the checking
    path runs cIn -> delimiters -> O_1 ... O_k -> cOut.  Self-crossings of
    the checking path in the canonical drawing are realized by SX copies,
    oriented so the earlier-traversed strand is its first tunnel.

    Returns (system, simulation map, checkable descriptor, the postselected
    gadget the construction is checkable for).
    """
    if not check_broken_preservation(gadget, spec):
        raise InputError("broken states are not preserved on the retained locations")
    target = post_select(gadget, spec)
    if not target.states:
        raise InputError("postselection has no states; nothing to build")
    g_t = transitive_closure(gadget)
    retained = [l for l in gadget.locations if l in spec.retained]
    checks = list(spec.checks)

    defs = {"G": g_t}
    instances = [Instance("G", "G", sorted(g_t.states)[0])]
    conns: set[frozenset[str]] = set()

    def connect(a: str, b: str):
        conns.add(frozenset((a, b)))

    # e_l chains: outer node  - WCXtop -  - WCXbot - G.l
    for l in retained:
        top, bot = f"wt_{l}", f"wb_{l}"
        instances.append(Instance(top, "WCX", "1"))
        instances.append(Instance(bot, "WCX", "1"))
        connect(f"@out_{l}", f"{top}.left")
        connect(f"{top}.right", f"{bot}.left")
        connect(f"{bot}.right", f"G.{l}")

    # checking path: cIn, top delimiter (left to right), bottom delimiter
    # (right to left), then O_i / D_i stages, then cOut.
    prev = "@cIn"
    for l in retained:
        connect(prev, f"wt_{l}.bottom")
        prev = f"wt_{l}.top"
    for l in reversed(retained):
        connect(prev, f"wb_{l}.bottom")
        prev = f"wb_{l}.top"
    for i, (a, b) in enumerate(checks):
        oi, di = f"O{i}", f"D{i}"
        instances.append(Instance(oi, "SO", "1"))
        instances.append(Instance(di, "SD", "1"))
        connect(prev, f"{oi}.opening")
        connect(f"{oi}.opening", f"{di}.in")
        connect(f"{di}.out", f"G.{a}")
        connect(f"G.{b}", f"{oi}.in")
        prev = f"{oi}.out"
    connect(prev, "@cOut")

    system = GadgetSystem(tuple(instances), frozenset(conns), "@cIn", "@cOut", defs)
    if planar_repair:
        system = _planarize_checking_path(system, retained, len(checks))

    m = {l: f"@out_{l}" for l in retained}
    m["cIn"] = "@cIn"
    m["cOut"] = "@cOut"
    f = {}
    for q in sorted(target.states):
        f[q] = {"G": q}
    sim = SimulationMap(m, f)
    desc = CheckableDescriptor("G'", "cIn", "cOut")
    return system, sim, desc, target


def _planarize_checking_path(
    system: GadgetSystem, retained: Sequence[str], k: int
) -> GadgetSystem:
    """Insert SX / WCX copies on crossings until the wheel graph is planar.

    Two checking-path edges that must cross are replaced by an SX; the
    earlier-traversed edge takes the left->right tunnel, the later one
    top->bottom (the documented first-horizontal-then-vertical order).  A
    checking-path edge crossing an e_l chain edge uses a WCX instead, with
    the reusable hallway along e_l and the check line along the path.
    Crossing pairs are taken from Kuratowski witnesses of the current
    graph, so only genuinely entangled edges are rerouted.
    """
    rank = _endpoint_ranks(retained, k)
    counter = itertools.count()
    current = system
    for _ in range(200):
        ok, _ = check_planar_system(current)
        if ok:
            return current
        current = _insert_one_crossing(current, rank, counter)
    raise InputError("could not planarize checking path")


def _endpoint_ranks(retained, k) -> dict[str, int]:
    """Traversal time of checking-path endpoints (lower = earlier)."""
    rank: dict[str, int] = {}
    t = 1
    rank["@cIn"] = t
    for l in retained:
        t += 1
        rank[f"wt_{l}.bottom"] = t
        rank[f"wt_{l}.top"] = t + 1
    for l in reversed(retained):
        t += 2
        rank[f"wb_{l}.bottom"] = t
        rank[f"wb_{l}.top"] = t + 1
    for i in range(k):
        t += 2
        rank[f"O{i}.opening"] = t
        rank[f"D{i}.in"] = t + 1
        rank[f"D{i}.out"] = t + 2
        rank[f"O{i}.in"] = t + 3
        rank[f"O{i}.out"] = t + 4
        t += 4
    rank["@cOut"] = t + 1
    return rank


def _edge_rank(pair: frozenset, rank: Mapping[str, int]) -> Optional[int]:
    rs = [rank[e] for e in pair if e in rank]
    return min(rs) if rs else None


def _kuratowski_connection_edges(system: GadgetSystem) -> list[frozenset]:
    import networkx as nx
    from .planar import wheel_graph_of

    g = wheel_graph_of(system)
    ok, cert = nx.check_planarity(g, counterexample=True)
    if ok:
        return []
    bad = set()
    conn = {frozenset(p) for p in system.connections if len(p) == 2}
    for u, v in cert.edges():
        if frozenset((u, v)) in conn:
            bad.add(frozenset((u, v)))
    return sorted(bad, key=sorted)


def _insert_one_crossing(system: GadgetSystem, rank, counter) -> GadgetSystem:
    suspects = _kuratowski_connection_edges(system)
    if not suspects:
        raise InputError("nonplanar core (no reroutable connection edges)")
    candidates = []
    for p1, p2 in itertools.combinations(suspects, 2):
        if set(p1) & set(p2):
            continue
        r1, r2 = _edge_rank(p1, rank), _edge_rank(p2, rank)
        if r1 is None and r2 is None:
            continue  # two e_l chain edges never cross in the drawing
        candidates.append((p1, p2, r1, r2))
    # prefer path x path crossings in traversal order, then path x e_l
    candidates.sort(key=lambda c: (c[2] is None or c[3] is None, c[2] or 0, c[3] or 0,
                                   sorted(c[0]), sorted(c[1])))
    best_fallback = None
    for p1, p2, r1, r2 in candidates:
        attempt = _cross_edges(system, p1, p2, r1, r2, rank, counter)
        ok, _ = check_planar_system(attempt)
        if ok:
            return attempt
        if best_fallback is None:
            best_fallback = attempt
    if best_fallback is not None:
        return best_fallback
    raise InputError("no crossing insertion found")


def _cross_edges(system, p1, p2, r1, r2, rank, counter) -> GadgetSystem:
    if r1 is None or r2 is None:
        # path edge x e_l chain edge -> WCX, hallway along the chain edge
        chain, path = (p1, p2) if r1 is None else (p2, p1)
        cid = f"wx{next(counter)}"
        cu, cv = sorted(chain)
        pu, pv = _directed_by_rank(path, rank)
        out = replace(system, connections=system.connections - {p1, p2})
        out = out.with_instance(Instance(cid, "WCX", "1"))
        out = out.with_connection(cu, f"{cid}.left")
        out = out.with_connection(f"{cid}.right", cv)
        out = out.with_connection(pu, f"{cid}.bottom")
        out = out.with_connection(f"{cid}.top", pv)
        return out
    early, late = (p1, p2) if r1 <= r2 else (p2, p1)
    sid = f"sx{next(counter)}"
    eu, ev = _directed_by_rank(early, rank)
    lu, lv = _directed_by_rank(late, rank)
    out = replace(system, connections=system.connections - {early, late})
    out = out.with_instance(Instance(sid, "SX", "1"))
    out = out.with_connection(eu, f"{sid}.left")
    out = out.with_connection(f"{sid}.right", ev)
    out = out.with_connection(lu, f"{sid}.top")
    out = out.with_connection(f"{sid}.bottom", lv)
    return out


def _directed_by_rank(pair: frozenset, rank: Mapping[str, int]) -> tuple[str, str]:
    """Orient an edge from the earlier-visited endpoint to the later one."""
    items = sorted(pair)
    if len(items) == 1:
        return items[0], items[0]
    u, v = items
    ru = rank.get(u, 10 ** 9)
    rv = rank.get(v, 10 ** 9)
    return (u, v) if ru <= rv else (v, u)


# -- file format --------------------------------------------------------------


def system_to_json(system: GadgetSystem) -> str:
    obj = {
        "instances": [
            {"id": i.id, "gadget": i.gadget, "state": i.state, "orient": i.orient}
            for i in system.instances
        ],
        "connections": [list(sorted(p)) if len(p) == 2 else [min(p), min(p)]
                        for p in sorted(system.connections, key=sorted)],
        "start": system.start,
        "target": system.target,
    }
    if system.embedding is not None:
        obj["embedding"] = system.embedding
    return json.dumps(obj, indent=2) + "\n"


def system_from_json(text: str, defs: Optional[Mapping[str, Gadget]] = None) -> GadgetSystem:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"bad system JSON: {e}") from e
    insts = tuple(
        Instance(d["id"], d["gadget"], d["state"], d.get("orient", "identity"))
        for d in obj.get("instances", [])
    )
    conns = frozenset(frozenset(p) for p in obj.get("connections", []))
    return GadgetSystem(
        insts,
        conns,
        obj.get("start"),
        obj.get("target"),
        defs or {},
        obj.get("embedding"),
    )
