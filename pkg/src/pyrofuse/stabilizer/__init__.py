"""Exact graph-state and stabilizer simulation for fusion-rule checks."""

from .clifford import CLIFFORDS, LocalCliffordLayer, SingleQubitClifford
from .graphs import DEFAULT_LC_GUARD, GraphState, lc_equivalent, lc_equivalent_by_component, lc_orbit
from .pauli import PauliOperator
from .state import (
    BRANCHES,
    EntangledQubitError,
    FusionOutcome,
    OutcomeConflictError,
    PairResidual,
    StabilizerError,
    StabilizerState,
    graph_state,
    to_graph_form,
)

__all__ = [
    "BRANCHES",
    "CLIFFORDS",
    "DEFAULT_LC_GUARD",
    "EntangledQubitError",
    "FusionOutcome",
    "GraphState",
    "LocalCliffordLayer",
    "OutcomeConflictError",
    "PairResidual",
    "PauliOperator",
    "SingleQubitClifford",
    "StabilizerError",
    "StabilizerState",
    "graph_state",
    "lc_equivalent",
    "lc_equivalent_by_component",
    "lc_orbit",
    "to_graph_form",
]
