"""Circularly ordered sets, their automorphism groups and universal minimal flows, computed exactly."""

from .automorphisms import (
    PartialIso,
    PLCircleAutomorphism,
    extend_fixing,
    extend_partial_iso,
    identity,
    ping_pong_free_probe,
    ping_pong_pair,
    rotation,
    thompson_extend,
)
from .core import (
    AxiomReport,
    CyclicSequence,
    Cycle,
    FiniteCircularOrder,
    LinearCut,
    check_axioms,
    cut_at,
    from_linear,
    interval,
    is_corder_preserving,
    is_cycle,
    topology_base,
)
from .errors import (
    ChainMismatch,
    CircOrderError,
    DegenerateInterval,
    DomainError,
    ElementNotFound,
    InvalidCycle,
    InvalidPartialIso,
    MalformedInput,
    NotASubcycle,
    ResourceBoundExceeded,
)
from .flow import (
    FinSuppMeasure,
    SplitPoint,
    act_on_split,
    compatible_linear_orders,
    factor_to_circle,
    fiber,
    minimality_probe,
    phi,
    push_measure,
    shrink_set,
)
from .profinite import (
    CoherentFamily,
    act_on_limit,
    bonding,
    double_cosets,
    limit_triple,
    pattern_of,
    project,
    quotient,
)
from .rational import Q_CIRCLE, QuadraticIrrational, circ_triple, dense_witness, parse_point
from .tower import CirclePointK, Tower, TowerElement, alpha, circ_triple_k, pl_extend_k

__all__ = [
    "act_on_limit",
    "act_on_split",
    "alpha",
    "AxiomReport",
    "bonding",
    "ChainMismatch",
    "check_axioms",
    "circ_triple",
    "circ_triple_k",
    "CirclePointK",
    "CircOrderError",
    "CoherentFamily",
    "compatible_linear_orders",
    "cut_at",
    "Cycle",
    "CyclicSequence",
    "DegenerateInterval",
    "dense_witness",
    "DomainError",
    "double_cosets",
    "ElementNotFound",
    "extend_fixing",
    "extend_partial_iso",
    "factor_to_circle",
    "fiber",
    "FiniteCircularOrder",
    "FinSuppMeasure",
    "from_linear",
    "identity",
    "interval",
    "InvalidCycle",
    "InvalidPartialIso",
    "is_corder_preserving",
    "is_cycle",
    "limit_triple",
    "LinearCut",
    "MalformedInput",
    "minimality_probe",
    "NotASubcycle",
    "parse_point",
    "PartialIso",
    "pattern_of",
    "phi",
    "ping_pong_free_probe",
    "ping_pong_pair",
    "pl_extend_k",
    "PLCircleAutomorphism",
    "project",
    "push_measure",
    "Q_CIRCLE",
    "QuadraticIrrational",
    "quotient",
    "ResourceBoundExceeded",
    "rotation",
    "shrink_set",
    "SplitPoint",
    "thompson_extend",
    "topology_base",
    "Tower",
    "TowerElement",
]

__version__ = "0.1.0"
