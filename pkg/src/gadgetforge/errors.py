"""Exception types shared across the toolkit.

Exit-code mapping used by the CLI: InputError -> 2, ResourceError -> 3.
"""


class InputError(ValueError):
    """Malformed or inconsistent input (unknown identifiers, bad files)."""


class ResourceError(RuntimeError):
    """A configurable budget (node cap, configuration cap) was exceeded.

    Deliberately distinct from a negative answer: callers must treat this
    as *inconclusive*, never as "unreachable" or "not equivalent".
    """


class LayoutError(RuntimeError):
    """The compiler could not place or route a system under the given mode."""
