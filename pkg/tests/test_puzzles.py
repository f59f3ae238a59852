import random

import pytest

from gadgetforge.errors import InputError, ResourceError
from gadgetforge.puzzles import (
    Level,
    Move,
    PuzzleState,
    immobile_cells,
    level_from_text,
    level_to_text,
    normalize,
    settle_gravity,
    solve_puzzle,
    successors,
)

# A small Push-1F puzzle in the spirit of the introduction's sample: the
# agent must route around fixed walls, and pushing a block against a wall
# (twice here) would wedge it.
SAMPLE_PUSH1F = """\
variant=push-k-f k=1
#####
#.@.#
##$##
#...#
#+..#
#####
"""


def lv(text: str) -> Level:
    return level_from_text(text)


def test_level_roundtrip_bit_exact():
    level = lv(SAMPLE_PUSH1F)
    assert level_to_text(level) == SAMPLE_PUSH1F
    assert level.variant == "push-k-f" and level.k == 1


def test_sample_puzzle_solvable():
    moves = solve_puzzle(lv(SAMPLE_PUSH1F))
    assert moves is not None


def test_push_blocked_by_fixed():
    level = lv("variant=push-k-f k=1\n#####\n#@$##\n#####\n")
    out = successors(level, level.initial_state())
    # the block sits against a wall: no push right is possible
    assert all(m.code != "push-right" for m, _ in out)


def test_push2_row_limits():
    level2 = lv("variant=push-k k=2\n......\n.@$$..\n......\n")
    codes = [m.code for m, _ in successors(level2, level2.initial_state())]
    assert "push-right" in codes
    level3 = lv("variant=push-k k=2\n.......\n.@$$$..\n.......\n")
    codes3 = [m.code for m, _ in successors(level3, level3.initial_state())]
    assert "push-right" not in codes3


def test_push_star_long_row():
    level = lv("variant=push-star\n.........\n.@$$$$$..\n.........\n")
    codes = [m.code for m, _ in successors(level, level.initial_state())]
    assert "push-right" in codes


def test_overpush_impossible_exhaustive():
    for k in (1, 2, 3):
        row = "$" * (k + 1)
        level = lv(f"variant=push-k k={k}\n" + "." * (k + 5) + f"\n.@{row}.\n" + "." * (k + 5) + "\n")
        for move, nxt in successors(level, level.initial_state()):
            assert move.kind != "push" or len(level.blocks - nxt.blocks) <= 1
        codes = [m.code for m, _ in successors(level, level.initial_state())]
        assert "push-right" not in codes


def test_block_conservation_random_walks():
    rng = random.Random(7)
    level = lv(SAMPLE_PUSH1F)
    s = level.initial_state()
    for _ in range(60):
        opts = successors(level, s)
        if not opts:
            break
        _, s = rng.choice(opts)
        assert len(s.blocks) == len(level.blocks)


def test_settle_gravity_pit_and_idempotence():
    level = lv("variant=boxdude\n#####\n#.$.#\n#...#\n#...#\n#####\n")
    raw = PuzzleState(level.blocks, (3, 3), False)
    settled = settle_gravity(level, raw)
    assert (3, 2) in settled.blocks
    assert settle_gravity(level, settled) == settled


def test_boxdude_height2_drop_is_diode():
    level = lv(
        "variant=boxdude\n"
        "#######\n"
        "#@....#\n"
        "###...#\n"
        "###..+#\n"
        "#######\n"
    )
    assert solve_puzzle(level) is not None
    back = lv(
        "variant=boxdude\n"
        "#######\n"
        "#+....#\n"
        "###...#\n"
        "###..@#\n"
        "#######\n"
    )
    assert solve_puzzle(back) is None


def test_boxdude_climb_requires_headroom():
    level = lv("variant=boxdude\n#####\n#...#\n#@$.#\n#####\n")
    codes = [m.code for m, _ in successors(level, level.initial_state())]
    assert "climb-right" in codes
    low = lv("variant=boxdude\n#####\n##..#\n#@$.#\n#####\n")
    codes = [m.code for m, _ in successors(low, low.initial_state())]
    assert "climb-right" not in codes


def test_blockdude_lift_and_clearance():
    level = lv("variant=blockdude\n#####\n#...#\n#@$.#\n#####\n")
    codes = [m.code for m, _ in successors(level, level.initial_state())]
    assert "lift-right" in codes
    # diagonal (above the block) occupied: no lift
    blocked = lv("variant=blockdude\n#####\n#.###\n#@$.#\n#####\n")
    codes = [m.code for m, _ in successors(blocked, blocked.initial_state())]
    assert "lift-right" not in codes


def test_blockdude_carry_low_ceiling_drop_behind():
    level = lv(
        "variant=blockdude\n"
        "######\n"
        "#..###\n"
        "#@$..#\n"
        "######\n"
    )
    s = level.initial_state()
    lifted = [n for m, n in successors(level, s) if m.code == "lift-right"]
    assert lifted and lifted[0].carried
    carried = lifted[0]
    step1 = [n for m, n in successors(level, carried) if m.code == "walk-right"][0]
    assert step1.carried and step1.agent == (2, 2)
    # low ceiling ahead of the next step: the block stays behind and falls
    step2 = [n for m, n in successors(level, step1) if m.code == "walk-right"][0]
    assert not step2.carried and step2.agent == (2, 3)
    assert (2, 2) in step2.blocks


def test_blockdude_stacking():
    level = lv("variant=blockdude\n#####\n#...#\n#...#\n#@$$#\n#####\n")
    s = level.initial_state()
    lifted = [n for m, n in successors(level, s) if m.code == "lift-right"][0]
    moved = [n for m, n in successors(level, lifted) if m.code == "walk-right"][0]
    stacked = [n for m, n in successors(level, moved) if m.code == "drop-right"]
    assert stacked and (2, 3) in stacked[0].blocks


def test_gravity_states_are_settled():
    level = lv("variant=bloxdude\n######\n#....#\n#@$..#\n###..#\n#....#\n######\n")
    s = level.initial_state()
    frontier = [s]
    for _ in range(3):
        nxt = []
        for st in frontier:
            for _, n in successors(level, st):
                assert settle_gravity(level, n) == n
                nxt.append(n)
        frontier = nxt[:8]


def test_fixed_cells_never_move():
    level = lv(SAMPLE_PUSH1F)
    s = level.initial_state()
    for _, n in successors(level, s):
        assert n.blocks.isdisjoint(level.fixed)


def test_goal_in_sealed_chamber_unsolvable():
    level = lv("variant=push-k k=1\n......\n.@.##.\n...#+#\n...###\n")
    assert solve_puzzle(level) is None


def test_immobile_cells_square():
    level = lv("variant=push-k k=2\n.......\n.$$$...\n.$$$...\n.$$$..@\n.......\n")
    cells = immobile_cells(level)
    assert len(cells) == 9
    single = lv("variant=push-k k=1\n....\n.$.@\n....\n")
    assert immobile_cells(single) == frozenset()
    square1 = lv("variant=push-k k=1\n.....\n.$$.@\n.$$..\n.....\n")
    assert len(immobile_cells(square1)) == 4


def test_immobile_soundness_exhaustive():
    level = lv("variant=push-k k=1\n......\n.$$..@\n.$$...\n......\n")
    immobile = immobile_cells(level)
    seen = set()
    stack = [level.initial_state()]
    while stack:
        s = stack.pop()
        key = (s.blocks, s.agent)
        if key in seen:
            continue
        seen.add(key)
        assert immobile <= s.blocks
        for _, n in successors(level, s):
            stack.append(n)


def test_normalize_congruence_random_levels():
    rng = random.Random(11)
    for trial in range(25):
        cells = [(r, c) for r in range(1, 5) for c in range(1, 5)]
        rng.shuffle(cells)
        blocks = cells[:2]
        agent = cells[2]
        goal = cells[3]
        fixed = {(r, c) for r in range(6) for c in range(6)
                 if r in (0, 5) or c in (0, 5)}
        fixed |= set(cells[4:6])
        level = Level(
            variant="push-k-f",
            width=6,
            height=6,
            fixed=frozenset(fixed),
            blocks=frozenset(blocks),
            agent=agent,
            goal=goal,
            k=1,
        )
        direct = _solve_unnormalized(level)
        assert (solve_puzzle(level) is None) == (direct is None)


def _solve_unnormalized(level):
    from collections import deque

    start = level.initial_state()
    if start.agent == level.goal:
        return []
    seen = {(start.blocks, start.agent)}
    queue = deque([(start, [])])
    while queue:
        cur, path = queue.popleft()
        for move, nxt in successors(level, cur):
            if nxt.agent == level.goal:
                return path + [move.code]
            k = (nxt.blocks, nxt.agent)
            if k not in seen:
                seen.add(k)
                queue.append((nxt, path + [move.code]))
    return None


def test_solver_cap():
    with pytest.raises(ResourceError):
        solve_puzzle(lv(SAMPLE_PUSH1F), cap=1)


def test_bad_level_rejected():
    with pytest.raises(InputError):
        lv("no header\n###\n")
    with pytest.raises(InputError):
        lv("variant=push-k k=1\n#?#\n")
