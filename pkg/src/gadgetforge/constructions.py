"""Hand-wired gadget simulations: systems over small base-gadget sets whose
boundary behavior equals a named library gadget.  Each returns a
``(GadgetSystem, SimulationMap)`` pair ready for ``verify_simulation``.
"""

from __future__ import annotations

from .systems import GadgetSystem, Instance, SimulationMap


def _sys(instances, connections, **kw) -> GadgetSystem:
    return GadgetSystem(
        tuple(Instance(*i) for i in instances),
        frozenset(frozenset(c) for c in connections),
        kw.get("start"),
        kw.get("target"),
        kw.get("defs", {}),
    )


def sx_construction() -> tuple[GadgetSystem, SimulationMap]:
    """Single-use crossover from SO and SD gadgets.

    The left->right strand is two dicrumblers in series; using them lets the
    agent arm the top opening gadget from the right side, enabling the one
    top->bottom traversal, whose exit is guarded by a second opening gadget
    armed midway along the strand.
    """
    system = _sys(
        [
            ("sd1", "SD", "1"),
            ("sd2", "SD", "1"),
            ("so_top", "SO", "1"),
            ("so_bot", "SO", "1"),
        ],
        [
            ("@L", "sd1.in"),
            ("sd1.out", "sd2.in"),
            ("sd1.out", "so_bot.opening"),
            ("sd2.out", "@R"),
            ("so_top.opening", "@R"),
            ("@T", "so_top.in"),
            ("so_top.out", "so_bot.in"),
            ("so_bot.out", "@B"),
        ],
    )
    m = {"left": "@L", "top": "@T", "right": "@R", "bottom": "@B"}
    f = {
        "1": {"sd1": "1", "sd2": "1", "so_top": "1", "so_bot": "1"},
        "2": {"sd1": "2", "sd2": "2", "so_top": "2", "so_bot": "2"},
        "3": {"sd1": "2", "sd2": "2", "so_top": "3", "so_bot": "3"},
    }
    return system, SimulationMap(m, f)


def wcx_construction() -> tuple[GadgetSystem, SimulationMap]:
    """Weak closing crossover from SO, MSC, and SD gadgets.

    The hallway runs through two merged-closing tunnels.  A bottom visitor
    burns two dicrumblers, arms the top opening gadget, and must close one
    of the tunnels on the way out; the top exit is reachable from either
    hallway end through a one-shot dicrumbler once the opening gadget is
    armed.
    """
    system = _sys(
        [
            ("msc_l", "MSC", "1"),
            ("msc_m", "MSC", "1"),
            ("sd1", "SD", "1"),
            ("sd2", "SD", "1"),
            ("sd_l", "SD", "1"),
            ("sd_r", "SD", "1"),
            ("so_t", "SO", "1"),
        ],
        [
            # hallway: L -(msc_l)- a -(msc_m)- R, closing exits outward
            ("msc_l.left", "@a"),
            ("msc_l.right", "@L"),
            ("msc_m.left", "@a"),
            ("msc_m.right", "@R"),
            # check chain from the bottom
            ("@B", "sd1.in"),
            ("sd1.out", "@c1"),
            ("so_t.opening", "@c1"),
            ("sd2.in", "@c1"),
            ("sd2.out", "@c2"),
            ("msc_l.top", "@c2"),
            ("msc_m.top", "@c2"),
            # the guarded top exit
            ("sd_l.in", "@L"),
            ("sd_r.in", "@R"),
            ("sd_l.out", "@nin"),
            ("sd_r.out", "@nin"),
            ("so_t.in", "@nin"),
            ("so_t.out", "@T"),
        ],
    )
    m = {"left": "@L", "top": "@T", "right": "@R", "bottom": "@B"}
    fresh = {
        "msc_l": "1",
        "msc_m": "1",
        "sd1": "1",
        "sd2": "1",
        "sd_l": "1",
        "sd_r": "1",
        "so_t": "1",
    }
    leaked = dict(fresh, sd1="2", sd2="2", so_t="2", msc_l="2")
    dead = dict(fresh, sd1="2", sd2="2", so_t="3", msc_m="2", sd_r="2")
    f = {"1": fresh, "2": leaked, "3": dead}
    return system, SimulationMap(m, f)
