"""Craig-Lyndon and access interpolation by clausal tableaux."""

from ._kernels import BACKEND
from .access import (
    AccessOptions,
    AciContext,
    BindingPattern,
    access_interpolate,
    aipol,
    binding_patterns,
    check_aci,
    covered,
    covered_set,
    make_aci_context,
    verify_access,
)
from .clausify import (
    ClausalForm,
    ClauseTag,
    GlobalPosition,
    NotRQFOError,
    add_equality_axioms,
    clausify,
    definitional_clausify_rqfo,
    negate_rqfo,
    to_rqfo,
)
from .craig import (
    InterpolationOptions,
    InterpolationResult,
    NoProofError,
    VerificationReport,
    interpolate,
    interpolate_horn,
    ipol_ground,
    lift,
    verify_craig_lyndon,
)
from .logic import (
    Formula,
    Lit,
    apply_subst,
    free_vars,
    garg,
    inverse_subst,
    top_inverse_subst,
    vocabulary,
)
from .provers import DEFAULT_BUDGET, Exhausted, ProofBudget, prove_connection, prove_hyper
from .syntax import ParseError, parse_formula, parse_tableau, print_formula, print_tableau
from .tableau import Node, Tableau, TableauDiagnostics
from .transforms import (
    TransformTrace,
    make_contiguous,
    make_leaf_only,
    remove_irregularities,
    remove_uneagerness,
    to_aci,
)

__version__ = "0.1.0"
__all__ = [n for n in dir() if not n.startswith("_")]
