"""Brute-force derivation of the gadget realized by a grid template.

A template is a level fragment with a cell mask and named boundary ports.
States of the extracted gadget are reachable block configurations inside
the mask; a transition (c, a) -> (c', b) exists whenever an agent entering
at port a with configuration c can exit at port b leaving c', moving only
inside the mask.  Extracted gadgets are transitive by construction: a
single visit may realize several pushes.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .core import (
    Gadget,
    PostselectSpec,
    Step,
    minimize_gadget,
    post_select,
    reflexive_closure,
    transitive_closure,
    traversal_language_dfa,
    dfa_equal,
    DEAD,
)
from .errors import InputError, ResourceError
from .puzzles import Cell, Level, PuzzleState, settle_gravity, successors
from .systems import configured_cap

CARRY_SUFFIX = "!carry"


@dataclass(frozen=True)
class Template:
    """Level fragment, region mask, and ordered boundary ports.

    Port order is the claimed cyclic order.  ``carry_through`` exposes each
    port additionally in a carrying mode named ``<port>!carry`` (BlockDude
    family only): the agent may enter or leave the template carrying a
    block through such ports.
    """

    level: Level
    mask: frozenset[Cell]
    ports: tuple[tuple[str, Cell], ...]
    carry_through: bool = False

    def __post_init__(self):
        for name, cell in self.ports:
            if cell not in self.mask:
                raise InputError(f"port {name} not inside the mask")
        if len({c for _, c in self.ports}) != len(self.ports):
            raise InputError("ports must sit on distinct cells")
        for cell in self.mask:
            if not self.level.in_bounds(cell):
                raise InputError("mask leaves the grid")

    def port_cell(self, name: str) -> Cell:
        for n, c in self.ports:
            if n == name:
                return c
        raise InputError(f"unknown port {name!r}")

    def location_names(self) -> tuple[str, ...]:
        names = [n for n, _ in self.ports]
        if self.carry_through:
            names += [n + CARRY_SUFFIX for n, _ in self.ports]
        return tuple(names)


def template_from_level(
    level: Level, carry_through: bool = False, mask: Optional[frozenset[Cell]] = None
) -> Template:
    """Template straight from a level whose lowercase letters mark ports.

    Port cyclic order is alphabetical; the mask defaults to every non-fixed
    cell.  This is the common fixture idiom."""
    if mask is None:
        mask = frozenset(
            (r, c)
            for r in range(level.height)
            for c in range(level.width)
            if (r, c) not in level.fixed
        )
    return Template(level, mask, tuple(level.ports), carry_through)


def template_from_files(level_text: str, sidecar_text: str) -> Template:
    from .puzzles import level_from_text

    level = level_from_text(level_text)
    try:
        side = json.loads(sidecar_text)
    except json.JSONDecodeError as e:
        raise InputError(f"bad template sidecar: {e}") from e
    if "mask" in side and side["mask"] is not None:
        mask = frozenset((r, c) for r, c in side["mask"])
    else:
        mask = frozenset(
            (r, c)
            for r in range(level.height)
            for c in range(level.width)
            if (r, c) not in level.fixed
        )
    ports = tuple((p["name"], tuple(p["cell"])) for p in side["ports"])
    return Template(level, mask, ports, bool(side.get("carry_through", False)))


def template_to_sidecar(t: Template) -> str:
    obj = {
        "mask": sorted([list(c) for c in t.mask]),
        "ports": [{"name": n, "cell": list(c)} for n, c in t.ports],
        "carry_through": t.carry_through,
    }
    return json.dumps(obj, indent=2) + "\n"


@dataclass(frozen=True)
class ExtractionReport:
    gadget: Gadget
    labeling: Mapping[str, frozenset[Cell]]
    ok: bool
    distinguishing: Optional[tuple[Step, ...]] = None
    detail: str = ""


class _MaskedLevel:
    """View of a level that forbids any motion outside the mask."""

    def __init__(self, template: Template):
        self.t = template
        base = template.level
        extra_walls = frozenset(
            (r, c)
            for r in range(base.height)
            for c in range(base.width)
            if (r, c) not in template.mask
        )
        self.level = Level(
            variant=base.variant,
            width=base.width,
            height=base.height,
            fixed=base.fixed | extra_walls,
            blocks=frozenset(b for b in base.blocks if b in template.mask),
            agent=None,
            goal=None,
            ports=(),
            k=base.k,
        )
        if any(b not in template.mask for b in base.blocks):
            raise InputError("template has blocks outside its mask")

    def guard_escape(self, state: PuzzleState) -> None:
        if any(b not in self.t.mask for b in state.blocks):
            raise InputError("template rejected: a block can leave the mask")


def _settle_blocks(level: Level, blocks: frozenset[Cell]) -> frozenset[Cell]:
    if not level.gravity():
        return blocks
    out = set(blocks)
    moved = True
    while moved:
        moved = False
        for cell in sorted(out, key=lambda c: -c[0]):
            below = (cell[0] + 1, cell[1])
            if not level.in_bounds(below):
                raise InputError("block fell out of the template")
            if not level.is_fixed(below) and below not in out:
                out.discard(cell)
                out.add(below)
                moved = True
    return frozenset(out)


def extract_gadget(
    template: Template, cap: Optional[int] = None, name: str = "extracted"
) -> tuple[Gadget, dict[str, frozenset[Cell]]]:
    """Exhaustive configuration-space search of the template.

    Returns the extracted gadget plus a state -> block-configuration
    labeling.  Deterministic: configurations are named in discovery order
    over a canonical BFS.  Raises ResourceError past the configuration cap
    and InputError if a block can escape the mask.
    """
    cap = configured_cap(cap)
    masked = _MaskedLevel(template)
    level = masked.level
    if template.carry_through and level.variant not in ("blockdude", "bloxdude"):
        raise InputError("carry_through requires a lifting variant")

    def canon(blocks: frozenset[Cell]) -> frozenset[Cell]:
        return _settle_blocks(level, blocks)

    init = canon(level.blocks)
    entry_modes = [False, True] if template.carry_through else [False]

    config_names: dict[frozenset[Cell], str] = {}
    order: list[frozenset[Cell]] = []

    def name_of(cfg: frozenset[Cell]) -> str:
        if cfg not in config_names:
            config_names[cfg] = f"c{len(config_names)}"
            order.append(cfg)
        return config_names[cfg]

    name_of(init)
    transitions: set[tuple[str, str, str, str]] = set()
    done: set[tuple[frozenset[Cell], str, bool]] = set()
    work = deque([init])
    queued = {init}
    while work:
        cfg = work.popleft()
        for pname, pcell in template.ports:
            for carry_in in entry_modes:
                key = (cfg, pname, carry_in)
                if key in done:
                    continue
                done.add(key)
                if pcell in cfg or level.is_fixed(pcell):
                    continue  # entry blocked outright
                start = PuzzleState(cfg, pcell, carry_in)
                if level.gravity():
                    try:
                        start = settle_gravity(level, start)
                    except InputError:
                        continue
                seen = {start}
                bfs = deque([start])
                while bfs:
                    cur = bfs.popleft()
                    masked.guard_escape(cur)
                    # exits: standing on a port cell, optionally carrying
                    for qname, qcell in template.ports:
                        if cur.agent == qcell:
                            if cur.carried and not template.carry_through:
                                continue
                            out_cfg = canon(cur.blocks)
                            in_name = pname + (CARRY_SUFFIX if carry_in else "")
                            out_name = qname + (CARRY_SUFFIX if cur.carried else "")
                            if out_cfg == cfg and in_name == out_name:
                                continue  # null bounce
                            transitions.add(
                                (name_of(cfg), in_name, name_of(out_cfg), out_name)
                            )
                            if out_cfg not in queued:
                                if len(queued) >= cap:
                                    raise ResourceError("configuration cap exceeded")
                                queued.add(out_cfg)
                                work.append(out_cfg)
                    for _, nxt in successors(level, cur):
                        if nxt not in seen:
                            if len(seen) > cap:
                                raise ResourceError("configuration cap exceeded")
                            seen.add(nxt)
                            bfs.append(nxt)

    states = frozenset(config_names.values())
    gadget = Gadget(
        name,
        template.location_names(),
        states,
        frozenset(transitions),
        config_names[init],
    )
    labeling = {config_names[cfg]: cfg for cfg in order}
    return gadget, labeling


def distinguishing_sequence(
    g1: Gadget, q1: str, g2: Gadget, q2: str, locmap: Mapping[str, str]
) -> Optional[tuple[Step, ...]]:
    """Shortest step sequence legal for exactly one side, or None."""
    d1 = traversal_language_dfa(reflexive_closure(g1), q1)
    d2 = traversal_language_dfa(reflexive_closure(g2), q2)
    start = (d1.initial, d2.initial)
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        (s1, s2), word = queue.popleft()
        if (s1 != DEAD) != (s2 != DEAD):
            return word
        if s1 == DEAD:
            continue
        for a, b in sorted(d1.alphabet):
            n1 = d1.delta[(s1, (a, b))]
            n2 = d2.delta[(s2, (locmap[a], locmap[b]))]
            if (n1, n2) not in seen:
                seen.add((n1, n2))
                queue.append(((n1, n2), word + ((a, b),)))
    return None


def verify_template(
    template: Template,
    claimed: Gadget,
    state_map: Mapping[str, str],
    postselect_spec: Optional[PostselectSpec] = None,
    cap: Optional[int] = None,
    locmap: Optional[Mapping[str, str]] = None,
) -> ExtractionReport:
    """Compare the extracted gadget against a claimed one.

    ``state_map`` sends claimed states to extracted configuration labels
    (every mapped pair is compared).  In postselect mode the extracted
    gadget is postselected first.  Ports are matched to claimed locations
    by name unless ``locmap`` (claimed loc -> port name) is given.  The
    claimed side is compared after transitive closure, both sides modulo
    null bounces: any grid realization admits enter-and-back-out no-ops and
    multi-push visits, neither of which a state diagram draws.
    """
    extracted, labeling = extract_gadget(template, cap=cap)
    subject = extracted
    if postselect_spec is not None:
        subject = post_select(extracted, postselect_spec)
    subject = minimize_gadget(subject)
    reference = transitive_closure(claimed)
    if locmap is None:
        locmap = {l: l for l in claimed.locations}
    if sorted(locmap.values()) != sorted(subject.locations):
        return ExtractionReport(
            extracted, labeling, False, None,
            f"location mismatch: claimed {sorted(locmap.values())} vs "
            f"extracted {sorted(subject.locations)}",
        )

    minimized_label = {}
    for q in subject.states:
        minimized_label[q] = q
    for cq, xq in state_map.items():
        if cq not in reference.states:
            raise InputError(f"claimed state {cq!r} unknown")
        rep = _minimized_rep(subject, extracted, xq, postselect_spec)
        if rep is None:
            return ExtractionReport(
                extracted, labeling, False, None,
                f"extracted state {xq!r} was removed by postselection",
            )
        word = distinguishing_sequence(reference, cq, subject, rep, locmap)
        if word is not None:
            return ExtractionReport(
                extracted, labeling, False, word,
                f"claimed state {cq!r} vs extracted {xq!r}",
            )
    return ExtractionReport(extracted, labeling, True)


def _minimized_rep(subject, extracted, xq, spec) -> Optional[str]:
    """Representative of configuration label xq in the minimized subject."""
    if xq in subject.states:
        return xq
    base = extracted if spec is None else post_select(extracted, spec)
    if xq not in base.states:
        return None
    ref = reflexive_closure(base)
    seq = traversal_language_dfa(ref, xq)
    for cand in sorted(subject.states):
        if dfa_equal(seq, traversal_language_dfa(reflexive_closure(subject), cand),
                     {l: l for l in base.locations}):
            return cand
    return None
