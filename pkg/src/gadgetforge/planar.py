"""Planarity of gadget systems via the wheel-graph construction.

Each gadget instance is replaced by a wheel: a cycle through its locations
in their fixed cyclic order plus a hub adjacent to every location.  Branch
nodes and connection edges are added on top, and the result is tested with
a standard linear-time planarity algorithm.  Rotations and reflections of
gadgets are allowed; they are already baked into the instance orientation.
"""

from __future__ import annotations

from typing import Optional

import networkx as nx


def wheel_graph_of(system) -> "nx.Graph":
    g = nx.Graph()
    for inst in system.instances:
        gadget = system.gadget_of(inst)
        locs = [f"{inst.id}.{l}" for l in gadget.locations]
        hub = f"{inst.id}#hub"
        g.add_node(hub)
        for v in locs:
            g.add_node(v)
            g.add_edge(hub, v)
        if len(locs) > 1:
            for i, v in enumerate(locs):
                g.add_edge(v, locs[(i + 1) % len(locs)])
    for u, v in system.connection_pairs():
        if u != v:
            g.add_edge(u, v)
    return g


def check_planar(system, outer_cycle: Optional[list[str]] = None):
    """Planarity of the wheel-graph construction.

    ``outer_cycle``, when given, is a list of system endpoints that must
    additionally lie on a common face in this cyclic order; this is checked
    by attaching an extra wheel through them, which is drawable iff such a
    face exists.

    Returns ``(ok, embedding)`` where embedding is a node -> neighbor
    rotation mapping for the wheel graph (None when nonplanar).
    """
    g = wheel_graph_of(system)
    if outer_cycle:
        hub = "#outer-hub"
        g.add_node(hub)
        for v in outer_cycle:
            g.add_edge(hub, v)
        if len(outer_cycle) > 2:
            for i, v in enumerate(outer_cycle):
                g.add_edge(v, outer_cycle[(i + 1) % len(outer_cycle)])
    ok, cert = nx.check_planarity(g, counterexample=False)
    if not ok:
        return False, None
    embedding = {str(n): [str(w) for w in cert.neighbors_cw_order(n)] for n in cert.nodes}
    return True, embedding
