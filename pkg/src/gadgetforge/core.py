"""Abstract gadget algebra.

A gadget is a finite state machine over boundary locations: an agent in
state ``q`` may enter at location ``a`` and leave at ``b``, moving the
gadget to state ``r``, whenever ``(q, a, r, b)`` is a transition.
Nondeterminism is allowed (several ``r`` for the same ``(q, a, b)``) and is
resolved angelically: a traversal sequence is legal if *some* branch works.

Everything in this module is a pure function over immutable values.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InputError

Step = tuple[str, str]
Traversal = tuple[Step, ...]

Transition = tuple[str, str, str, str]  # (state, entry, state', exit)


def traversal(*steps: Iterable[str]) -> Traversal:
    """Convenience constructor: traversal("a", "b") or traversal(("a","b"), ...)."""
    if len(steps) == 2 and all(isinstance(s, str) for s in steps):
        return ((steps[0], steps[1]),)
    return tuple((a, b) for a, b in steps)


@dataclass(frozen=True)
class Gadget:
    """A gadget: states, locations in cyclic planar order, and transitions.

    ``locations`` is ordered; the order is the cyclic order used by the
    planarity checker.  ``states`` may be empty only for the result of
    postselecting an all-broken gadget; such a gadget cannot be placed in a
    system.  ``initial`` is optional bookkeeping used by file round-trips.
    """

    name: str
    locations: tuple[str, ...]
    states: frozenset[str]
    transitions: frozenset[Transition]
    initial: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if len(set(self.locations)) != len(self.locations):
            raise InputError(f"{self.name}: duplicate locations")
        for q, a, r, b in self.transitions:
            if q not in self.states or r not in self.states:
                raise InputError(f"{self.name}: transition {q, a, r, b} uses unknown state")
            if a not in self.locations or b not in self.locations:
                raise InputError(f"{self.name}: transition {q, a, r, b} uses unknown location")
        if self.initial is not None and self.initial not in self.states:
            raise InputError(f"{self.name}: initial state {self.initial!r} unknown")

    # -- small helpers ----------------------------------------------------

    def require_state(self, q: str) -> None:
        if q not in self.states:
            raise InputError(f"{self.name}: unknown state {q!r}")

    def require_location(self, a: str) -> None:
        if a not in self.locations:
            raise InputError(f"{self.name}: unknown location {a!r}")

    def sorted_states(self) -> list[str]:
        return sorted(self.states)

    def out_map(self) -> dict[tuple[str, str, str], frozenset[str]]:
        """(q, a, b) -> set of successor states."""
        acc: dict[tuple[str, str, str], set[str]] = {}
        for q, a, r, b in self.transitions:
            acc.setdefault((q, a, b), set()).add(r)
        return {k: frozenset(v) for k, v in acc.items()}

    def renamed(self, name: str) -> "Gadget":
        return Gadget(name, self.locations, self.states, self.transitions, self.initial)

    def with_initial(self, q: Optional[str]) -> "Gadget":
        return Gadget(self.name, self.locations, self.states, self.transitions, q)


@dataclass(frozen=True)
class PostselectSpec:
    """A checking traversal sequence and the set of retained locations."""

    checks: Traversal
    retained: frozenset[str]

    @staticmethod
    def of(checks: Iterable[Step], retained: Iterable[str]) -> "PostselectSpec":
        return PostselectSpec(tuple((a, b) for a, b in checks), frozenset(retained))


# -- legality ------------------------------------------------------------


def step_states(gadget: Gadget, q: str, a: str, b: str) -> frozenset[str]:
    """States reachable by one a->b traversal from state q (empty = illegal)."""
    gadget.require_state(q)
    gadget.require_location(a)
    gadget.require_location(b)
    return frozenset(r for (q2, a2, r, b2) in gadget.transitions if (q2, a2, b2) == (q, a, b))


def legal_from(gadget: Gadget, q: str, steps: Sequence[Step]) -> frozenset[str]:
    """Set of states reachable by executing the whole sequence from q.

    The sequence is legal from q iff the result is nonempty; the empty
    sequence yields {q}.
    """
    gadget.require_state(q)
    current = {q}
    for a, b in steps:
        gadget.require_location(a)
        gadget.require_location(b)
        current = {r for s in current for r in step_states(gadget, s, a, b)}
        if not current:
            return frozenset()
    return frozenset(current)


def is_legal(gadget: Gadget, q: str, steps: Sequence[Step]) -> bool:
    return bool(legal_from(gadget, q, steps))


# -- algebraic operations ------------------------------------------------


def transitive_closure(gadget: Gadget) -> Gadget:
    """Smallest transition superset closed under chaining exits into entries.

    (q1,l1)->(q2,l2) and (q2,l2)->(q3,l3) imply (q1,l1)->(q3,l3): an agent
    exiting at l2 may always turn around and re-enter there.
    """
    trans = set(gadget.transitions)
    changed = True
    while changed:
        changed = False
        by_entry: dict[tuple[str, str], set[tuple[str, str]]] = {}
        for q, a, r, b in trans:
            by_entry.setdefault((q, a), set()).add((r, b))
        new = set()
        for q, a, r, b in trans:
            for r2, b2 in by_entry.get((r, b), ()):
                t = (q, a, r2, b2)
                if t not in trans:
                    new.add(t)
        if new:
            trans |= new
            changed = True
    return Gadget(gadget.name, gadget.locations, gadget.states, frozenset(trans), gadget.initial)


def restrict(gadget: Gadget, retained: Iterable[str]) -> Gadget:
    """Keep only transitions with both endpoints in ``retained``."""
    keep = frozenset(retained)
    extra = keep - set(gadget.locations)
    if extra:
        raise InputError(f"{gadget.name}: restriction to unknown locations {sorted(extra)}")
    locs = tuple(l for l in gadget.locations if l in keep)
    trans = frozenset(t for t in gadget.transitions if t[1] in keep and t[3] in keep)
    return Gadget(gadget.name, locs, gadget.states, trans, gadget.initial)


def broken_states(gadget: Gadget, checks: Sequence[Step]) -> frozenset[str]:
    """States from which the checking sequence is illegal."""
    return frozenset(q for q in gadget.states if not legal_from(gadget, q, checks))


def check_broken_preservation(gadget: Gadget, spec: PostselectSpec) -> bool:
    """True iff no retained transition escapes a broken state."""
    if not spec.retained <= set(gadget.locations):
        raise InputError(f"{gadget.name}: retained locations not a subset of L(G)")
    broken = broken_states(gadget, spec.checks)
    for q, a, r, b in gadget.transitions:
        if q in broken and a in spec.retained and b in spec.retained and r not in broken:
            return False
    return True


def post_select(gadget: Gadget, spec: PostselectSpec) -> Gadget:
    """The idealized gadget: nonbroken states, transitions restricted to L'.

    Requires the broken-preservation assumption.  If every state is broken
    the result has no states (and cannot be used in a system); a warning is
    emitted in that case rather than an error.
    """
    if not check_broken_preservation(gadget, spec):
        raise InputError(f"{gadget.name}: broken states are not preserved by retained transitions")
    broken = broken_states(gadget, spec.checks)
    states = frozenset(gadget.states - broken)
    if not states:
        warnings.warn(f"{gadget.name}: postselection left no states; unusable in systems")
    locs = tuple(l for l in gadget.locations if l in spec.retained)
    trans = frozenset(
        (q, a, r, b)
        for q, a, r, b in gadget.transitions
        if q in states and r in states and a in spec.retained and b in spec.retained
    )
    initial = gadget.initial if gadget.initial in states else None
    return Gadget(f"postselect({gadget.name})", locs, states, trans, initial)


# -- traversal-language automata ------------------------------------------

DEAD = frozenset()


@dataclass(frozen=True)
class TraversalDfa:
    """Deterministic, complete automaton over (entry, exit) steps.

    All live states accept (traversal languages are prefix-closed); the
    single dead state ``frozenset()`` absorbs illegal steps.
    """

    alphabet: frozenset[Step]
    states: frozenset[frozenset]
    initial: frozenset
    delta: Mapping[tuple[frozenset, Step], frozenset]

    def accepts(self, steps: Sequence[Step]) -> bool:
        cur = self.initial
        for s in steps:
            if s not in self.alphabet:
                return False
            cur = self.delta[(cur, s)]
        return cur != DEAD


def traversal_language_dfa(gadget: Gadget, q: str) -> TraversalDfa:
    """Subset construction for the language of legal sequences from q."""
    gadget.require_state(q)
    alphabet = frozenset(product(gadget.locations, gadget.locations))
    out = gadget.out_map()
    initial = frozenset([q])
    states = {initial, DEAD}
    delta: dict[tuple[frozenset, Step], frozenset] = {}
    work = [initial]
    while work:
        cur = work.pop()
        for a, b in sorted(alphabet):
            nxt = frozenset(r for s in cur for r in out.get((s, a, b), ()))
            delta[(cur, (a, b))] = nxt
            if nxt not in states:
                states.add(nxt)
                work.append(nxt)
    for sym in sorted(alphabet):
        delta[(DEAD, sym)] = DEAD
    return TraversalDfa(alphabet, frozenset(states), initial, delta)


def dfa_equal(d1: TraversalDfa, d2: TraversalDfa, locmap: Mapping[str, str]) -> bool:
    """Language equality under a location bijection (product walk)."""
    pairs = {(d1.initial, d2.initial)}
    work = [(d1.initial, d2.initial)]
    while work:
        s1, s2 = work.pop()
        if (s1 != DEAD) != (s2 != DEAD):
            return False
        if s1 == DEAD:
            continue
        for a, b in d1.alphabet:
            n1 = d1.delta[(s1, (a, b))]
            n2 = d2.delta[(s2, (locmap[a], locmap[b]))]
            if (n1, n2) not in pairs:
                pairs.add((n1, n2))
                work.append((n1, n2))
    return True


def equivalent(
    g1: Gadget,
    q1: str,
    g2: Gadget,
    q2: str,
    locmap: Optional[Mapping[str, str]] = None,
    *,
    mod_bounce: bool = False,
) -> bool:
    """Traversal-language equality of (g1, q1) and (g2, q2) under locmap.

    ``locmap`` must be a bijection L(g1) -> L(g2); identity by default.
    With ``mod_bounce=True`` both gadgets are compared after adding every
    null bounce (q,a)->(q,a): in any physical realization an agent can
    always enter a location and immediately leave without effect, so
    grid-extracted gadgets match abstract diagrams only modulo bounces.
    Reflexive closure never changes reachability semantics.
    """
    if locmap is None:
        if set(g1.locations) != set(g2.locations):
            raise InputError("location sets differ and no locmap given")
        locmap = {l: l for l in g1.locations}
    if set(locmap.keys()) != set(g1.locations) or set(locmap.values()) != set(g2.locations):
        raise InputError("locmap is not a bijection between the location sets")
    if len(set(locmap.values())) != len(locmap):
        raise InputError("locmap is not injective")
    if mod_bounce:
        g1, g2 = reflexive_closure(g1), reflexive_closure(g2)
    return dfa_equal(traversal_language_dfa(g1, q1), traversal_language_dfa(g2, q2), locmap)


def reflexive_closure(gadget: Gadget) -> Gadget:
    """Add every null bounce (q,a)->(q,a)."""
    extra = {(q, a, q, a) for q in gadget.states for a in gadget.locations}
    return Gadget(
        gadget.name, gadget.locations, gadget.states, gadget.transitions | extra, gadget.initial
    )


def drop_null_loops(gadget: Gadget) -> Gadget:
    """Remove null bounces (q,a)->(q,a); inverse normalization of the above."""
    trans = frozenset(t for t in gadget.transitions if not (t[0] == t[2] and t[1] == t[3]))
    return Gadget(gadget.name, gadget.locations, gadget.states, trans, gadget.initial)


def minimize_gadget(gadget: Gadget) -> Gadget:
    """Merge states with identical traversal languages.

    Determinizes once from all singleton seeds, minimizes the resulting DFA
    by partition refinement, then quotients gadget states by the class of
    their singleton subset-state.  Language-preserving and idempotent.
    """
    if not gadget.states:
        return gadget
    alphabet = sorted(product(gadget.locations, gadget.locations))
    out = gadget.out_map()

    subsets = {DEAD}
    delta: dict[tuple[frozenset, Step], frozenset] = {}
    work = []
    for q in gadget.sorted_states():
        s = frozenset([q])
        if s not in subsets:
            subsets.add(s)
            work.append(s)
    while work:
        cur = work.pop()
        for a, b in alphabet:
            nxt = frozenset(r for s in cur for r in out.get((s, a, b), ()))
            delta[(cur, (a, b))] = nxt
            if nxt not in subsets:
                subsets.add(nxt)
                work.append(nxt)
    for sym in alphabet:
        delta[(DEAD, sym)] = DEAD

    # Moore-style refinement: initial split live/dead.
    block: dict[frozenset, int] = {s: (0 if s == DEAD else 1) for s in subsets}
    while True:
        signature = {
            s: (block[s], tuple(block[delta[(s, sym)]] for sym in alphabet)) for s in subsets
        }
        ids: dict[tuple, int] = {}
        new_block = {}
        for s in sorted(subsets, key=sorted):
            new_block[s] = ids.setdefault(signature[s], len(ids))
        if len(set(new_block.values())) == len(set(block.values())):
            block = new_block
            break
        block = new_block

    cls = {q: block[frozenset([q])] for q in gadget.states}
    rep: dict[int, str] = {}
    for q in gadget.sorted_states():
        rep.setdefault(cls[q], q)
    states = frozenset(rep.values())
    trans = frozenset((rep[cls[q]], a, rep[cls[r]], b) for q, a, r, b in gadget.transitions)
    initial = rep[cls[gadget.initial]] if gadget.initial in gadget.states else None
    return Gadget(gadget.name, gadget.locations, states, trans, initial)


def reachable_part(gadget: Gadget, q: str) -> Gadget:
    """Restrict to states reachable from q through transitions."""
    gadget.require_state(q)
    seen = {q}
    work = [q]
    while work:
        cur = work.pop()
        for q2, _, r, _ in gadget.transitions:
            if q2 == cur and r not in seen:
                seen.add(r)
                work.append(r)
    trans = frozenset(t for t in gadget.transitions if t[0] in seen)
    return Gadget(gadget.name, gadget.locations, frozenset(seen), trans, q)


# -- file format ----------------------------------------------------------


def gadget_to_json(gadget: Gadget) -> str:
    """Stable JSON encoding: keys in fixed order, LF newline, sorted members."""
    obj = {
        "name": gadget.name,
        "locations": list(gadget.locations),
        "states": gadget.sorted_states(),
        "initial": gadget.initial,
        "transitions": sorted([list(t) for t in gadget.transitions]),
    }
    if obj["initial"] is None:
        del obj["initial"]
    return json.dumps(obj, indent=2) + "\n"


def gadget_from_json(text: str) -> Gadget:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"bad gadget JSON: {e}") from e
    try:
        return Gadget(
            name=obj["name"],
            locations=tuple(obj["locations"]),
            states=frozenset(obj["states"]),
            transitions=frozenset(tuple(t) for t in obj["transitions"]),
            initial=obj.get("initial"),
        )
    except KeyError as e:
        raise InputError(f"gadget JSON missing key {e}") from e
