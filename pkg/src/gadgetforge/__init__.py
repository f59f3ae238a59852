"""gadgetforge: motion-planning gadget algebra, puzzle engines, brute-force
gadget extraction, and a gadget-system-to-level compiler."""

from .core import (
    Gadget,
    PostselectSpec,
    TraversalDfa,
    broken_states,
    check_broken_preservation,
    equivalent,
    legal_from,
    minimize_gadget,
    post_select,
    restrict,
    step_states,
    transitive_closure,
    traversal_language_dfa,
)
from .library import library_gadget, library_names

__all__ = [
    "Gadget",
    "PostselectSpec",
    "TraversalDfa",
    "broken_states",
    "check_broken_preservation",
    "equivalent",
    "legal_from",
    "library_gadget",
    "library_names",
    "minimize_gadget",
    "post_select",
    "restrict",
    "step_states",
    "transitive_closure",
    "traversal_language_dfa",
]
