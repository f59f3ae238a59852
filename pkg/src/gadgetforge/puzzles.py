"""Exact move semantics and solvers for the block-puzzle families.

Variants: ``push-k`` / ``push-k-f`` (push up to k consecutive blocks, -f
adds fixed blocks), ``push-star`` / ``push-star-f`` (no limit on pushed
row length), and the gravity trio ``boxdude`` (horizontal pushes of one
box plus climbing), ``blockdude`` (lift/carry/drop, no pushes) and
``bloxdude`` (both).  Cells are (row, col) with row 0 on top; gravity
pulls toward larger rows.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .errors import InputError, ResourceError
from .systems import configured_cap

Cell = tuple[int, int]

PUSH_VARIANTS = {"push-k", "push-k-f", "push-star", "push-star-f"}
GRAVITY_VARIANTS = {"boxdude", "blockdude", "bloxdude"}
VARIANTS = PUSH_VARIANTS | GRAVITY_VARIANTS

LEFT, RIGHT, UP, DOWN = (0, -1), (0, 1), (-1, 0), (1, 0)
DIR_NAMES = {LEFT: "left", RIGHT: "right", UP: "up", DOWN: "down"}
NAMED_DIRS = {v: k for k, v in DIR_NAMES.items()}


@dataclass(frozen=True)
class Move:
    kind: str  # walk, push, climb, lift, drop
    direction: str

    @property
    def code(self) -> str:
        return f"{self.kind}-{self.direction}"

    @staticmethod
    def parse(code: str) -> "Move":
        kind, _, direction = code.partition("-")
        if direction not in NAMED_DIRS:
            raise InputError(f"bad move code {code!r}")
        return Move(kind, direction)


@dataclass(frozen=True)
class PuzzleState:
    blocks: frozenset[Cell]
    agent: Cell
    carried: bool = False


@dataclass(frozen=True)
class Level:
    variant: str
    width: int
    height: int
    fixed: frozenset[Cell]
    blocks: frozenset[Cell]
    agent: Optional[Cell]
    goal: Optional[Cell]
    ports: tuple[tuple[str, Cell], ...] = ()
    k: Optional[int] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InputError(f"unknown variant {self.variant!r}")
        if self.variant in ("push-k", "push-k-f") and not self.k:
            raise InputError("push-k variants need k >= 1")
        if self.variant in ("push-star", "push-star-f", "boxdude", "blockdude", "bloxdude"):
            if self.k is not None:
                raise InputError(f"variant {self.variant} does not take k")

    # -- geometry -----------------------------------------------------------

    def in_bounds(self, cell: Cell) -> bool:
        r, c = cell
        return 0 <= r < self.height and 0 <= c < self.width

    def is_fixed(self, cell: Cell) -> bool:
        # outside the grid counts as fixed for the push family; gravity
        # grids must be enclosed by explicit walls.
        if not self.in_bounds(cell):
            return True
        return cell in self.fixed

    def gravity(self) -> bool:
        return self.variant in GRAVITY_VARIANTS

    def can_push(self) -> bool:
        return self.variant != "blockdude"

    def can_lift(self) -> bool:
        return self.variant in ("blockdude", "bloxdude")

    def initial_state(self) -> PuzzleState:
        if self.agent is None:
            raise InputError("level has no agent")
        s = PuzzleState(self.blocks, self.agent, False)
        if self.gravity():
            settled = settle_gravity(self, s)
            if settled != s:
                raise InputError("gravity level must start settled")
        return s


def _occupied(level: Level, s: PuzzleState, cell: Cell) -> bool:
    return level.is_fixed(cell) or cell in s.blocks


def settle_gravity(level: Level, s: PuzzleState) -> PuzzleState:
    """Fixpoint of unit falls: blocks bottom-up, then the agent (a carried
    block rides along above the agent).  Raises if anything leaves the grid."""
    blocks = set(s.blocks)
    moved = True
    while moved:
        moved = False
        for cell in sorted(blocks, key=lambda c: -c[0]):
            below = (cell[0] + 1, cell[1])
            if not level.in_bounds(below):
                raise InputError("block fell out of the grid; enclose the level")
            if not level.is_fixed(below) and below not in blocks:
                blocks.discard(cell)
                blocks.add(below)
                moved = True
    agent = s.agent
    while True:
        below = (agent[0] + 1, agent[1])
        if not level.in_bounds(below):
            raise InputError("agent fell out of the grid; enclose the level")
        if level.is_fixed(below) or below in blocks:
            break
        agent = below
    if agent in blocks:
        raise InputError("agent overlaps a block after settling")
    return PuzzleState(frozenset(blocks), agent, s.carried)


def _push_successors(level: Level, s: PuzzleState) -> Iterable[tuple[Move, PuzzleState]]:
    limit = level.k if level.variant in ("push-k", "push-k-f") else None
    for d in (LEFT, RIGHT, UP, DOWN):
        target = (s.agent[0] + d[0], s.agent[1] + d[1])
        if level.is_fixed(target):
            continue
        if target not in s.blocks:
            yield Move("walk", DIR_NAMES[d]), replace(s, agent=target)
            continue
        run = [target]
        while True:
            nxt = (run[-1][0] + d[0], run[-1][1] + d[1])
            if nxt in s.blocks:
                run.append(nxt)
            else:
                break
        beyond = (run[-1][0] + d[0], run[-1][1] + d[1])
        if limit is not None and len(run) > limit:
            continue
        if level.is_fixed(beyond) or beyond in s.blocks:
            continue
        blocks = set(s.blocks)
        blocks.discard(target)
        blocks.add(beyond)
        yield Move("push", DIR_NAMES[d]), PuzzleState(frozenset(blocks), target, False)


def _gravity_successors(level: Level, s: PuzzleState) -> Iterable[tuple[Move, PuzzleState]]:
    above = (s.agent[0] - 1, s.agent[1])
    for d in (LEFT, RIGHT):
        target = (s.agent[0] + d[0], s.agent[1] + d[1])
        diag = (target[0] - 1, target[1])
        if not _occupied(level, s, target):
            if s.carried and _occupied(level, s, diag):
                # low ceiling: the move completes, the block stays behind
                dropped = settle_gravity(
                    level, PuzzleState(s.blocks | {above}, target, False)
                )
                yield Move("walk", DIR_NAMES[d]), dropped
            else:
                yield Move("walk", DIR_NAMES[d]), settle_gravity(level, replace(s, agent=target))
            continue
        # pushing one box horizontally (boxdude / bloxdude, not carrying)
        if level.can_push() and not s.carried and target in s.blocks:
            beyond = (target[0] + d[0], target[1] + d[1])
            if not _occupied(level, s, beyond):
                blocks = set(s.blocks)
                blocks.discard(target)
                blocks.add(beyond)
                yield Move("push", DIR_NAMES[d]), settle_gravity(
                    level, PuzzleState(frozenset(blocks), target, False)
                )
        # climbing onto a block or fixed step
        if _occupied(level, s, target):
            dest = (s.agent[0] - 1, target[1])
            if _occupied(level, s, dest):
                continue
            if not s.carried:
                if not _occupied(level, s, above):
                    yield Move("climb", DIR_NAMES[d]), settle_gravity(level, replace(s, agent=dest))
            else:
                dest_above = (dest[0] - 1, dest[1])
                if _occupied(level, s, dest_above):
                    dropped = settle_gravity(
                        level, PuzzleState(s.blocks | {above}, dest, False)
                    )
                    yield Move("climb", DIR_NAMES[d]), dropped
                else:
                    yield Move("climb", DIR_NAMES[d]), settle_gravity(level, replace(s, agent=dest))
    if level.can_lift():
        for d in (LEFT, RIGHT):
            side = (s.agent[0] + d[0], s.agent[1] + d[1])
            diag = (side[0] - 1, side[1])
            if not s.carried and side in s.blocks:
                if not _occupied(level, s, above) and not _occupied(level, s, diag):
                    blocks = s.blocks - {side}
                    yield Move("lift", DIR_NAMES[d]), PuzzleState(blocks, s.agent, True)
            if s.carried:
                drop_at = (s.agent[0] - 1 + d[0], s.agent[1] + d[1])
                if not _occupied(level, s, drop_at):
                    yield Move("drop", DIR_NAMES[d]), settle_gravity(
                        level, PuzzleState(s.blocks | {drop_at}, s.agent, False)
                    )


def successors(level: Level, s: PuzzleState) -> list[tuple[Move, PuzzleState]]:
    """All legal moves with their resulting (settled) states."""
    if s.agent in s.blocks or level.is_fixed(s.agent):
        raise InputError("inconsistent state: agent inside a block or wall")
    if s.carried and not level.can_lift():
        raise InputError("carried flag outside a lifting variant")
    if level.gravity():
        out = list(_gravity_successors(level, s))
    else:
        out = list(_push_successors(level, s))
    return sorted(out, key=lambda ms: (ms[0].kind, ms[0].direction))


def _walk_graph_reach(level: Level, s: PuzzleState) -> dict[Cell, set[Cell]]:
    """Forward edges of block-preserving moves (walks, climbs, falls)."""
    edges: dict[Cell, set[Cell]] = {}
    seen = {s.agent}
    queue = deque([s.agent])
    while queue:
        cur = queue.popleft()
        edges.setdefault(cur, set())
        here = replace(s, agent=cur)
        for move, nxt in successors(level, here):
            if move.kind in ("walk", "climb") and nxt.blocks == s.blocks and nxt.carried == s.carried:
                edges[cur].add(nxt.agent)
                if nxt.agent not in seen:
                    seen.add(nxt.agent)
                    queue.append(nxt.agent)
    return edges


def normalize(level: Level, s: PuzzleState) -> PuzzleState:
    """Replace the agent cell by the least cell mutually walk-reachable with
    it (blocks and carried flag untouched).  A congruence for solvability:
    only positions the agent can leave *and* return to are identified."""
    edges = _walk_graph_reach(level, s)
    if not level.gravity():
        return replace(s, agent=min(edges))
    # gravity walks are not reversible; identify only mutually reachable cells
    mutual = {u for u in edges if _reaches(edges, u, s.agent)}
    return replace(s, agent=min(mutual))


def _reaches(edges: dict[Cell, set[Cell]], src: Cell, dst: Cell) -> bool:
    if src == dst:
        return True
    seen = {src}
    queue = deque([src])
    while queue:
        cur = queue.popleft()
        for nxt in edges.get(cur, ()):
            if nxt == dst:
                return True
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def _walk_paths(level: Level, s: PuzzleState) -> dict[Cell, list[str]]:
    """Shortest block-preserving move sequences from the agent to every
    walk-reachable cell."""
    paths: dict[Cell, list[str]] = {s.agent: []}
    queue = deque([s.agent])
    while queue:
        cur = queue.popleft()
        here = replace(s, agent=cur)
        for move, nxt in successors(level, here):
            if (
                move.kind in ("walk", "climb")
                and nxt.blocks == s.blocks
                and nxt.carried == s.carried
                and nxt.agent not in paths
            ):
                paths[nxt.agent] = paths[cur] + [move.code]
                queue.append(nxt.agent)
    return paths


def solve_puzzle(
    level: Level, cap: Optional[int] = None, state: Optional[PuzzleState] = None
) -> Optional[list[str]]:
    """Move list reaching the goal cell, or None; deterministic.

    Search is over macro states (blocks, carried, canonical agent cell):
    from every walk-reachable cell, each block-changing move spawns a
    successor.  Within a macro state walks are free, so the returned
    solution is shortest in block-changing moves with walks filled in.
    """
    if level.goal is None:
        raise InputError("level has no goal")
    cap = configured_cap(cap)
    start = state or level.initial_state()

    def key(st: PuzzleState):
        n = normalize(level, st)
        return (n.blocks, n.agent, n.carried)

    seen = {key(start)}
    queue = deque([(start, [])])
    while queue:
        cur, path = queue.popleft()
        walks = _walk_paths(level, cur)
        if level.goal in walks:
            return path + walks[level.goal]
        for cell in sorted(walks):
            here = replace(cur, agent=cell)
            for move, nxt in successors(level, here):
                if move.kind in ("walk", "climb") and nxt.blocks == cur.blocks and nxt.carried == cur.carried:
                    continue
                k = key(nxt)
                if k not in seen:
                    if len(seen) >= cap:
                        raise ResourceError(f"node cap {cap} exceeded")
                    seen.add(k)
                    queue.append((nxt, path + walks[cell] + [move.code]))
    return None


def immobile_cells(level: Level) -> frozenset[Cell]:
    """Block cells inside some (k+1)x(k+1) all-blocked square (fixed cells
    count toward the square).  Sound for pruning/rendering only."""
    if level.variant not in PUSH_VARIANTS:
        raise InputError("immobile_cells applies to push variants")
    if level.variant in ("push-star", "push-star-f"):
        return frozenset()
    size = (level.k or 1) + 1
    solid = level.blocks | level.fixed
    out = set()
    for r in range(level.height - size + 1):
        for c in range(level.width - size + 1):
            cells = [(r + i, c + j) for i in range(size) for j in range(size)]
            if all(cell in solid for cell in cells):
                out.update(cell for cell in cells if cell in level.blocks)
    return frozenset(out)


# -- level file format --------------------------------------------------------

_CHARS = {"#", "$", ".", "@", "+", "*"}


def level_to_text(level: Level) -> str:
    grid = [["." for _ in range(level.width)] for _ in range(level.height)]
    for r, c in level.fixed:
        grid[r][c] = "#"
    for r, c in level.blocks:
        grid[r][c] = "$"
    for name, (r, c) in level.ports:
        grid[r][c] = name
    if level.goal:
        r, c = level.goal
        grid[r][c] = "+"
    if level.agent:
        r, c = level.agent
        grid[r][c] = "*" if level.agent == level.goal else "@"
    header = f"variant={level.variant}"
    if level.k is not None:
        header += f" k={level.k}"
    return "\n".join([header] + ["".join(row) for row in grid]) + "\n"


def level_from_text(text: str) -> Level:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("variant="):
        raise InputError("level file must start with a variant= header")
    header = lines[0].split()
    variant = header[0].split("=", 1)[1]
    k = None
    for tok in header[1:]:
        if tok.startswith("k="):
            k = int(tok.split("=", 1)[1])
        else:
            raise InputError(f"unknown header token {tok!r}")
    rows = [l for l in lines[1:] if l != ""]
    if not rows:
        raise InputError("level has no grid rows")
    width = max(len(r) for r in rows)
    rows = [r.ljust(width, "#") for r in rows]
    fixed, blocks, ports = set(), set(), []
    agent = goal = None
    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            cell = (r, c)
            if ch == "#":
                fixed.add(cell)
            elif ch == "$":
                blocks.add(cell)
            elif ch == "@":
                agent = cell
            elif ch == "+":
                goal = cell
            elif ch == "*":
                agent = goal = cell
            elif ch == ".":
                pass
            elif ch.islower() and ch.isalpha():
                ports.append((ch, cell))
            else:
                raise InputError(f"bad level character {ch!r} at {cell}")
    return Level(
        variant=variant,
        width=width,
        height=len(rows),
        fixed=frozenset(fixed),
        blocks=frozenset(blocks),
        agent=agent,
        goal=goal,
        ports=tuple(sorted(ports)),
        k=k,
    )
