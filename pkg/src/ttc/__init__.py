"""Nondeterministic top-down tree transducers, the constructions that decide
functionality of their compositions at bounded scale, and a small definition
language with text/JSON/DOT renderers."""

from .constructions import (
    BuildReport,
    CompositionChain,
    build_hat_t1,
    build_m,
    build_product_n,
    compose_linear_nondeleting,
    decompose_la,
    domain_automaton,
    p_construction,
    prune,
    reduce_chain,
    wrap_trivial_lookahead,
)
from .decision import (
    DerivationTrace,
    Verdict,
    chain_outputs,
    check_functional_bounded,
    decide_functionality,
    trace_derivation,
)
from .errors import (
    AlphabetMismatch,
    ChainTooShort,
    InvalidAddress,
    InvalidProvenance,
    NotLinearNondeleting,
    PrefixConflict,
    ResourceLimit,
    TtcError,
    TtcSyntaxError,
    UnknownState,
    ValidationError,
    ValidationWarning,
)
from .machines import (
    LookaheadTransducer,
    Rule,
    StateId,
    Transducer,
    enumerate_satisfying,
    enumerate_trees,
    identity_automaton,
    translate_la_eager,
)
from .textform import Workspace, machines_equal, parse_workspace, workspaces_equal
from .trees import (
    AnnotatedSymbol,
    NodeAddress,
    PlaceholderLeaf,
    RankedAlphabet,
    StateOverNode,
    StateOverVariable,
    Tree,
    nodes,
    parse_tree,
    sort_trees,
    substitute_at,
    substitute_leaves,
    subtree_at,
)

__version__ = "0.1.0"
