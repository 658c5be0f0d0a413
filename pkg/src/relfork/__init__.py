"""Verification workbench for relation algebras and fork algebras.

Finite proper relation algebras with exhaustive or sampled axiom
checking, countable fork-algebra models driven by injective pairing
functions, and concrete pairings whose fixpoints (plain, tree
controlled, projection controlled or sequence controlled) are pinned to
a chosen finite set.
"""

from .btree import (
    BT,
    BTC,
    Bin,
    HOLE,
    Hole,
    NIL,
    Nil,
    TreeSyntaxError,
    bt_lt,
    format_tree,
    is_tree,
    node_count,
    parse_tree,
    strict_subtrees,
    substitute,
    tree_map,
    variants,
)
from .seqs import (
    Cons,
    Elem,
    PI,
    RHO,
    Seq,
    SeqSyntaxError,
    format_seq,
    ll_rel,
    parse_seq,
    seq_concat,
    seq_from_symbols,
    seq_index,
    seq_long,
    seq_suffix,
    seq_symbols,
)
from .relcore import (
    AlgebraModel,
    Classification,
    FiniteRelation,
    RelationError,
    classify,
    direct_product,
    full_pra,
    generate_subalgebra,
    ideal_elements,
    load_model,
    model_from_dict,
    model_to_dict,
    power,
    save_model,
)
from .terms import (
    AXIOM_TEXTS,
    And,
    CheckReport,
    Complement,
    Compose,
    Const,
    Converse,
    Eq,
    EvalError,
    Fork,
    Implies,
    Leq,
    Meet,
    NoForkStructureError,
    Not,
    Or,
    ParseError,
    UnboundVariableError,
    Union,
    Var,
    axiom_suite,
    check_formula,
    compile_formula,
    compile_term,
    eval_formula,
    eval_term,
    free_variables,
    parse,
    parse_formula,
    parse_term,
    pretty,
    pretty_formula,
    pretty_term,
)
from .forkmodel import (
    CfaReport,
    ForkBackend,
    LazyRelation,
    NilControlError,
    NoFiniteSupportError,
    PairingFunction,
    UndecidableCompositionError,
    cfa_axiom_check,
    complement_rel,
    compose_rel,
    conjugate,
    converse_rel,
    fix_members,
    fix_proj_members,
    fix_seq_members,
    fix_tree_members,
    fork,
    meet_rel,
    projections,
    si_member,
    transport,
    underline_seq,
    underline_tree,
    union_rel,
    urelement_relations,
    window,
)
from .constructions import (
    ConstructionError,
    ConstructionLayout,
    build_from_config,
    build_star_basic,
    build_star_proj,
    build_star_seq,
    build_star_tree,
    cantor_pair,
    cantor_unpair,
    layout_report,
)

__version__ = "0.1.0"
