"""Reversing Petri nets: execution and reversal of cyclic nets whose
named tokens bond into molecules, with backtracking, causal-order and
out-of-causal-order undo, plus exploration and property checking."""

from importlib import resources

from .net import (
    Bond,
    Label,
    Marking,
    Net,
    ValidationReport,
    Violation,
    check_well_formed,
    connected_component,
    transition_sets,
)
from .semantics import (
    Action,
    ExecState,
    NotEnabledError,
    Occurrence,
    Trace,
    enabled_actions,
    fire_forward,
    fire_reverse,
    forward_enabled,
    initial_state,
    last_place,
    last_transition,
    reference_reverse,
    reverse_enabled,
    step,
)
from .causality import (
    EquivalenceVerdict,
    ReplayError,
    actions_concurrent,
    causal_paths,
    histories_equivalent,
    recompute_causes,
    replay,
    rewrite_equivalent,
    states_equivalent,
    traces_equivalent,
)
from .dsl import (
    NetDocument,
    ParseError,
    export_dot,
    parse_net,
    parse_state,
    parse_trace,
    serialize_net,
    serialize_state,
    serialize_trace,
)

__all__ = [name for name in dir() if not name.startswith("_")]


def bundled_net_text(name: str) -> str:
    """Source text of a bundled ``.rpn``/``.rtr`` file, e.g. ``catalysis.rpn``."""
    return resources.files(__name__).joinpath("nets", name).read_text()


def bundled_net(name: str) -> NetDocument:
    """Parse a bundled net by file name (``.rpn`` may be omitted)."""
    if not name.endswith(".rpn"):
        name += ".rpn"
    return parse_net(bundled_net_text(name))


def bundled_trace(name: str) -> Trace:
    """Parse a bundled trace by file name (``.rtr`` may be omitted)."""
    if not name.endswith(".rtr"):
        name += ".rtr"
    return parse_trace(bundled_net_text(name))
