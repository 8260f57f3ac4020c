"""Belief propagation on Markov trees.

Evidence is expressed as mass functions over configuration sets,
combined by Dempster's rule, and propagated through a Markov tree by
two cached sweeps so that every node marginal costs far fewer
combinations than combining everything globally.  Incremental
re-propagation keeps the caches honest across evidence edits.
"""
from .frames import (
    ConfigSet,
    FrameCapError,
    Scope,
    ScopeError,
    Variable,
    scope_label,
)
from .mass import (
    InvalidMassError,
    MassFunction,
    focal_close,
    mass_from_pairs,
    require_valid,
    vacuous,
    validate_mass,
)
from .dempster import (
    CombinationResult,
    TotalConflictError,
    combine,
    extend_mass,
    marginalize,
)
from .markov import (
    Hypergraph,
    HypergraphError,
    MarkovTree,
    NotATreeError,
    RootedTree,
    build_tree,
    default_root,
    root_at,
    running_intersection_holds,
    verify_markov,
)
from .network import (
    BeliefDecl,
    Network,
    NetworkFormatError,
    network_from_doc,
    network_hypergraph,
    network_to_doc,
    network_tree,
    parse_focal,
    parse_network,
    render_network,
    set_to_doc,
)
from .oracle import GlobalResult, combine_all, global_belief, oracle_marginal
from .propagation import (
    CombinationCounter,
    DirtySet,
    PropagationEngine,
    PropagationResult,
    assign_priors,
    propagate,
    propagate_naive,
    variable_marginal,
)
from .repropagation import (
    PropagationSession,
    SessionCheckpoint,
    invalidation_for_change,
)

__version__ = "0.1.0"

__all__ = [
    "BeliefDecl",
    "CombinationCounter",
    "CombinationResult",
    "ConfigSet",
    "DirtySet",
    "FrameCapError",
    "GlobalResult",
    "Hypergraph",
    "HypergraphError",
    "InvalidMassError",
    "MarkovTree",
    "MassFunction",
    "Network",
    "NetworkFormatError",
    "NotATreeError",
    "PropagationEngine",
    "PropagationResult",
    "PropagationSession",
    "RootedTree",
    "Scope",
    "ScopeError",
    "SessionCheckpoint",
    "TotalConflictError",
    "Variable",
    "assign_priors",
    "build_tree",
    "combine",
    "combine_all",
    "default_root",
    "extend_mass",
    "focal_close",
    "global_belief",
    "invalidation_for_change",
    "marginalize",
    "mass_from_pairs",
    "network_from_doc",
    "network_hypergraph",
    "network_to_doc",
    "network_tree",
    "oracle_marginal",
    "parse_focal",
    "parse_network",
    "propagate",
    "propagate_naive",
    "render_network",
    "require_valid",
    "root_at",
    "running_intersection_holds",
    "scope_label",
    "set_to_doc",
    "validate_mass",
    "vacuous",
    "variable_marginal",
    "verify_markov",
]
