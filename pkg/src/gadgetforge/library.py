"""Named gadget library.

Each entry encodes a state diagram exactly as described in the source
material for this toolkit; locations are listed in cyclic planar order.
``library_gadget`` applies rotations/reflections of that cyclic order.

Conventions: tunnel gadgets use locations ``Lt,Rt,Rb,Lb`` (top-left,
top-right, bottom-right, bottom-left); crossover-shaped gadgets use
``left,top,right,bottom``; door-like gadgets use ``opening,entrance,exit``.
"""

from __future__ import annotations

from .core import Gadget
from .errors import InputError


def _g(name: str, locations, states, transitions, initial=None) -> Gadget:
    return Gadget(
        name=name,
        locations=tuple(locations),
        states=frozenset(states),
        transitions=frozenset(tuple(t) for t in transitions),
        initial=initial,
    )


def _hallway() -> Gadget:
    return _g("hallway", ["L", "R"], ["1"], [("1", "L", "1", "R"), ("1", "R", "1", "L")], "1")


def _branching_hallway() -> Gadget:
    locs = ["A", "B", "C"]
    trans = [("1", a, "1", b) for a in locs for b in locs if a != b]
    return _g("branching-hallway", locs, ["1"], trans, "1")


def _diode() -> Gadget:
    return _g("diode", ["L", "R"], ["1"], [("1", "L", "1", "R")], "1")


def _one_toggle() -> Gadget:
    # Leftwards and rightwards traversals must alternate.
    return _g("1-toggle", ["L", "R"], ["1", "2"], [("1", "L", "2", "R"), ("2", "R", "1", "L")], "1")


def _locking_2_toggle() -> Gadget:
    # Central state 2; traversing either tunnel downward locks both until
    # that traversal is reversed.
    trans = [
        ("2", "Lt", "1", "Lb"),
        ("1", "Lb", "2", "Lt"),
        ("2", "Rt", "3", "Rb"),
        ("3", "Rb", "2", "Rt"),
    ]
    return _g("locking-2-toggle", ["Lt", "Rt", "Rb", "Lb"], ["1", "2", "3"], trans, "2")


def _nondeterministic_locking_2_toggle() -> Gadget:
    # From state 1 the left tunnel can be traversed downward so as to leave
    # the gadget in either state 2 or state 4; states 3/4 mirror 1/2.
    trans = [
        ("1", "Lt", "2", "Lb"),
        ("1", "Lt", "4", "Lb"),
        ("2", "Lb", "1", "Lt"),
        ("3", "Rt", "4", "Rb"),
        ("3", "Rt", "2", "Rb"),
        ("4", "Rb", "3", "Rt"),
    ]
    return _g("nd-locking-2-toggle", ["Lt", "Rt", "Rb", "Lb"], ["1", "2", "3", "4"], trans, "1")


def _self_closing_door() -> Gadget:
    # Directed open-optional self-closing door: the door must be opened by
    # visiting its opening location before every entrance->exit traversal.
    trans = [
        ("closed", "opening", "open", "opening"),
        ("open", "opening", "open", "opening"),
        ("open", "entrance", "closed", "exit"),
    ]
    return _g(
        "self-closing-door", ["opening", "entrance", "exit"], ["open", "closed"], trans, "closed"
    )


def _single_use_opening() -> Gadget:
    # SO: a self-loop at the opening location arms a single traversal
    # between the other two locations.
    trans = [("1", "opening", "2", "opening"), ("2", "in", "3", "out")]
    return _g("SO", ["opening", "in", "out"], ["1", "2", "3"], trans, "1")


def _merged_single_use_closing() -> Gadget:
    # MSC: free horizontal traversals until the top->right closing
    # traversal, after which nothing is possible.
    trans = [
        ("1", "left", "1", "right"),
        ("1", "right", "1", "left"),
        ("1", "top", "2", "right"),
    ]
    return _g("MSC", ["left", "top", "right"], ["1", "2"], trans, "1")


def _dicrumbler() -> Gadget:
    # SD: one directed traversal, then permanently closed.
    return _g("SD", ["in", "out"], ["1", "2"], [("1", "in", "2", "out")], "1")


def _single_use_crossover() -> Gadget:
    # SX: one left->right traversal, then one top->bottom traversal.
    trans = [("1", "left", "2", "right"), ("2", "top", "3", "bottom")]
    return _g("SX", ["left", "top", "right", "bottom"], ["1", "2", "3"], trans, "1")


def _weak_closing_crossover() -> Gadget:
    # WCX: free horizontal hallway; entering the bottom moves to state 2 and
    # may leak out left or right, which opens up left->top or right->top;
    # exiting the top moves to state 3 where nothing is possible.
    trans = [
        ("1", "left", "1", "right"),
        ("1", "right", "1", "left"),
        ("1", "bottom", "3", "top"),
        ("1", "bottom", "2", "left"),
        ("1", "bottom", "2", "right"),
        ("2", "left", "3", "top"),
        ("2", "right", "3", "top"),
    ]
    return _g("WCX", ["left", "top", "right", "bottom"], ["1", "2", "3"], trans, "1")


def _leaky_door() -> Gadget:
    # Like a self-closing door, but when open the agent may leak from the
    # entrance to the opening location, and the opening location can always
    # reach the exit (closing the door).
    trans = [
        ("open", "entrance", "closed", "exit"),
        ("open", "entrance", "open", "opening"),
        ("closed", "opening", "open", "opening"),
        ("open", "opening", "closed", "exit"),
        ("closed", "opening", "closed", "exit"),
    ]
    return _g("leaky-door", ["opening", "entrance", "exit"], ["open", "closed"], trans, "closed")


def _weak_merged_closing() -> Gadget:
    # Acts like the MSC except that the closing traversal can be performed
    # multiple times; a closing visitor may also retreat the way it came.
    trans = [
        ("1", "left", "1", "right"),
        ("1", "right", "1", "left"),
        ("1", "top", "2", "right"),
        ("1", "top", "2", "top"),
        ("2", "top", "2", "right"),
        ("2", "top", "2", "top"),
    ]
    return _g("weak-merged-closing", ["left", "top", "right"], ["1", "2"], trans, "1")


def _no_return() -> Gadget:
    # One safe left->right traversal; an immediate return is impossible, but
    # traversing left->right twice, or initially entering from the right,
    # breaks the gadget into a fully traversable state.
    trans = [
        ("1", "L", "2", "R"),
        ("1", "R", "B", "L"),
        ("2", "L", "B", "R"),
        ("B", "L", "B", "R"),
        ("B", "R", "B", "L"),
    ]
    return _g("no-return", ["L", "R"], ["1", "2", "B"], trans, "1")


def _weak_opening() -> Gadget:
    # The exit is unusable until both input locations have been visited
    # separately; afterwards the exit connects freely to both inputs.
    # States record which inputs have been visited.
    trans = [
        ("00", "in1", "10", "in1"),
        ("00", "in2", "01", "in2"),
        ("10", "in2", "11", "in2"),
        ("01", "in1", "11", "in1"),
        ("10", "in1", "11", "exit"),
        ("01", "in2", "11", "exit"),
        ("00", "in1", "11", "exit"),
        ("00", "in2", "11", "exit"),
        ("11", "in1", "11", "exit"),
        ("11", "in2", "11", "exit"),
        ("11", "exit", "11", "in1"),
        ("11", "exit", "11", "in2"),
        ("11", "in1", "11", "in2"),
        ("11", "in2", "11", "in1"),
    ]
    return _g("weak-opening", ["in1", "exit", "in2"], ["00", "10", "01", "11"], trans, "00")


def _precursor() -> Gadget:
    # Door-like three-location gadget: entrance/exit traversals alternate
    # like a 1-toggle, and a visit to the top location resets the gadget to
    # the open state (it can also leak onward to F).
    trans = [
        ("o", "E", "c", "F"),
        ("c", "F", "o", "E"),
        ("c", "T", "o", "T"),
        ("o", "T", "o", "T"),
        ("c", "T", "c", "F"),
        ("o", "T", "c", "F"),
    ]
    return _g("precursor", ["T", "E", "F"], ["o", "c"], trans, "o")


def _directed_crossover() -> Gadget:
    # One-state crossover traversable bottom-left to top-right and
    # bottom-right to top-left only.
    trans = [("1", "BL", "1", "TR"), ("1", "BR", "1", "TL")]
    return _g("directed-crossover", ["TL", "TR", "BR", "BL"], ["1"], trans, "1")


def _crossover() -> Gadget:
    # Undirected crossover: both diagonals, both ways.
    trans = [
        ("1", "BL", "1", "TR"),
        ("1", "TR", "1", "BL"),
        ("1", "BR", "1", "TL"),
        ("1", "TL", "1", "BR"),
    ]
    return _g("crossover", ["TL", "TR", "BR", "BL"], ["1"], trans, "1")


_BUILDERS = {
    "hallway": _hallway,
    "branching-hallway": _branching_hallway,
    "diode": _diode,
    "1-toggle": _one_toggle,
    "locking-2-toggle": _locking_2_toggle,
    "nd-locking-2-toggle": _nondeterministic_locking_2_toggle,
    "self-closing-door": _self_closing_door,
    "SO": _single_use_opening,
    "MSC": _merged_single_use_closing,
    "SD": _dicrumbler,
    "SX": _single_use_crossover,
    "WCX": _weak_closing_crossover,
    "leaky-door": _leaky_door,
    "weak-merged-closing": _weak_merged_closing,
    "no-return": _no_return,
    "weak-opening": _weak_opening,
    "precursor": _precursor,
    "directed-crossover": _directed_crossover,
    "crossover": _crossover,
}

_ALIASES = {
    "L2T": "locking-2-toggle",
    "nL2T": "nd-locking-2-toggle",
    "SCD": "self-closing-door",
    "WMC": "weak-merged-closing",
    "NR": "no-return",
    "WO": "weak-opening",
}

ORIENTATIONS = ("identity",) + tuple(f"r{k}" for k in range(1, 8))


def library_names() -> list[str]:
    return sorted(_BUILDERS)


def library_gadget(name: str, orientation: str = "identity") -> Gadget:
    """Return a library gadget with its cyclic location order transformed.

    Orientations: ``identity``, ``r1``..``r3`` (rotations of the cyclic
    order), ``r4`` (reflection) and ``r5``..``r7`` (reflection followed by
    rotation).  Rotations and reflections act on the cyclic order only; the
    transition structure is untouched.
    """
    key = _ALIASES.get(name, name)
    if key not in _BUILDERS:
        raise InputError(f"unknown library gadget {name!r}")
    g = _BUILDERS[key]()
    if orientation == "identity":
        return g
    if orientation not in ORIENTATIONS:
        raise InputError(f"unknown orientation {orientation!r}")
    k = int(orientation[1:])
    locs = list(g.locations)
    if k >= 4:
        locs = locs[::-1]
        k -= 4
    locs = locs[k:] + locs[:k]
    return Gadget(g.name, tuple(locs), g.states, g.transitions, g.initial)
