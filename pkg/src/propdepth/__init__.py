"""Propagation-depth laboratory.

Bounded-width saturation over partial maps, an exact existential pebble-game
solver, generators for hard instance pairs, and the explicit Duplicator
strategies that certify propagation-depth lower bounds at desk scale.
"""

__version__ = "0.1.0"

from .structures import (
    Constraint,
    ConstraintNetwork,
    PartialMap,
    Structure,
    StructureError,
    VerifyResult,
    csp_to_structures,
    is_partial_homomorphism,
    read_structure,
    write_structure,
)
from .propagation import (
    Derivation,
    DerivationLine,
    DerivationMetrics,
    SaturationResult,
    depth_via_saturation,
    extract_refutation,
    metrics,
    read_derivation,
    saturate,
    verify_derivation,
    write_derivation,
)
from .pebblegame import (
    ResourceLimitError,
    Strategy,
    boundary_function,
    compose,
    compose_all,
    read_strategy,
    spoiler_min_rounds,
    strategy_of,
    union_strategies,
    verify_critical_strategy,
    verify_strategy_sequence,
    write_strategy,
)
from .gadgets import (
    Configuration,
    GadgetPair,
    InstancePair,
    alpha,
    alpha_inverse,
    applicability,
    build_inc_left,
    build_inc_right,
    build_init,
    build_instance,
    build_switch,
    build_win,
    h_block,
    h_zero,
    hollow_config,
    max_config,
    start_config,
    successor,
    t_left,
    t_right,
    valid_position,
)
from .dupstrategies import (
    InitStrategies,
    SwitchStrategies,
    build_duplicator_sequence,
    inc_output_config,
    inc_strategy,
    init_strategies,
    switch_strategies,
    win_strategy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
