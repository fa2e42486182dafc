"""
Tools module for the essgap toolkit.
"""

from essgap.tools.bfcore import (
    Assignment,
    Cube,
    PartialFunction,
    TotalFunction,
    complement,
    evaluate,
    load_function,
    parity_chi,
    parity_function,
    save_function,
    spanning_subcube,
)
from essgap.tools.constructions import (
    all_k_subsets_instance,
    allender_lift,
    generalized_gimpel,
    gimpel_partial,
    horn_gap_family,
    random_vw,
)
from essgap.tools.essence import are_independent, cnf_lower_bound, ess, ess_k
from essgap.tools.exactmin import SetCoverInstance, cs, ds, min_cnf, min_dnf, min_set_cover
from essgap.tools.horn import (
    HornBasis,
    MetaClause,
    afp_learn,
    check_negatives_independent,
    expand_meta_clauses,
    horn_closure,
    is_horn,
    mi_bruteforce,
)
from essgap.tools.implicants import (
    ClauseSet,
    covers,
    is_implicate,
    prime_implicants,
    prime_implicates,
)

__all__ = [
    "Assignment",
    "ClauseSet",
    "Cube",
    "HornBasis",
    "MetaClause",
    "PartialFunction",
    "SetCoverInstance",
    "TotalFunction",
    "afp_learn",
    "all_k_subsets_instance",
    "allender_lift",
    "are_independent",
    "check_negatives_independent",
    "cnf_lower_bound",
    "complement",
    "covers",
    "cs",
    "ds",
    "ess",
    "ess_k",
    "evaluate",
    "expand_meta_clauses",
    "generalized_gimpel",
    "gimpel_partial",
    "horn_closure",
    "horn_gap_family",
    "is_horn",
    "is_implicate",
    "load_function",
    "min_cnf",
    "min_dnf",
    "mi_bruteforce",
    "min_set_cover",
    "parity_chi",
    "parity_function",
    "prime_implicants",
    "prime_implicates",
    "random_vw",
    "save_function",
    "spanning_subcube",
]
