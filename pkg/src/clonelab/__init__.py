"""Workbench for clones of operations: orbit and pattern type spaces,
canonicity of operations, finitely generated clones of tables, equation
systems and their projection readings, order-term lifts over the dense
order and the pure set, and an exact model of the eventually-coordinate
polymorphisms of the rational order."""

from .canonical import (
    CanonicalVerdict,
    Operation,
    TypeOperation,
    XiImage,
    default_k_max,
    is_canonical,
    type_image,
    xi_infty,
)
from .clones import CatalogEntry, FiniteClone, Table, generate
from .config import DEFAULT_CAPS, Caps
from .equations import (
    Equation,
    EquationSystem,
    has_projective_homomorphism,
    pad_to_common_arity,
    parse_equation_system,
    satisfiable_in_clone,
    satisfiable_in_projections,
    satisfiable_modulo_outside,
)
from .errors import (
    CapExceeded,
    ClonelabError,
    EqualizerFailure,
    InconsistentData,
    NonCanonicalOperation,
    ParseError,
    UnsatisfiableSystem,
    UnsupportedTerm,
)
from .lifting import (
    AccumulationReport,
    LiftInstance,
    PointInjection,
    TransferReport,
    WitnessTuple,
    analyze_transfer,
    approximate_accumulation,
    build_instance,
    find_equalizers,
    lift,
)
from .orderterms import (
    Coord,
    Lex,
    MapApply,
    Max,
    Min,
    materialize,
    parse_order_term,
)
from .plmap import PLMap, Piece, from_point_pairs, identity, parse_plmap, translation
from .qclone import (
    QFunction,
    compose_members,
    evaluate,
    extend_restriction,
    make_member,
    noncontinuity_demo,
    parse_member,
    selector_member,
    serialize_member,
    spot_check_polymorphism,
    uniqueness_witnesses,
    xi,
)
from .structures import (
    DLO,
    PURE_SET,
    FiniteStructure,
    Pattern,
    Relation,
    SymbolicStructure,
    enumerate_patterns,
    orbits,
    parse_structure,
    pattern_of,
)
from .terms import App, Var, parse_term

__version__ = "0.1.0"

__all__ = [
    "AccumulationReport",
    "App",
    "CanonicalVerdict",
    "CapExceeded",
    "Caps",
    "CatalogEntry",
    "ClonelabError",
    "Coord",
    "DEFAULT_CAPS",
    "DLO",
    "EqualizerFailure",
    "Equation",
    "EquationSystem",
    "FiniteClone",
    "FiniteStructure",
    "InconsistentData",
    "Lex",
    "LiftInstance",
    "MapApply",
    "Max",
    "Min",
    "NonCanonicalOperation",
    "Operation",
    "PLMap",
    "PURE_SET",
    "ParseError",
    "Pattern",
    "Piece",
    "PointInjection",
    "QFunction",
    "Relation",
    "SymbolicStructure",
    "Table",
    "TransferReport",
    "TypeOperation",
    "UnsatisfiableSystem",
    "UnsupportedTerm",
    "Var",
    "WitnessTuple",
    "XiImage",
    "analyze_transfer",
    "approximate_accumulation",
    "build_instance",
    "compose_members",
    "default_k_max",
    "enumerate_patterns",
    "evaluate",
    "extend_restriction",
    "find_equalizers",
    "from_point_pairs",
    "generate",
    "has_projective_homomorphism",
    "identity",
    "is_canonical",
    "lift",
    "make_member",
    "materialize",
    "noncontinuity_demo",
    "orbits",
    "pad_to_common_arity",
    "parse_equation_system",
    "parse_member",
    "parse_order_term",
    "parse_plmap",
    "parse_structure",
    "parse_term",
    "pattern_of",
    "satisfiable_in_clone",
    "satisfiable_in_projections",
    "satisfiable_modulo_outside",
    "selector_member",
    "serialize_member",
    "spot_check_polymorphism",
    "translation",
    "type_image",
    "uniqueness_witnesses",
    "xi",
    "xi_infty",
]
