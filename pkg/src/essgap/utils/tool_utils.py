from typing import Any, Callable, Dict, Tuple, Type

from essgap.tools.commands import (
    AllKSubsetsParams,
    AllPairsParams,
    ComputeParams,
    ComputeResult,
    GenResult,
    GimpelGeneralParams,
    GimpelParams,
    HornGapGenParams,
    LiftGenParams,
    compute_cs,
    compute_ds,
    compute_ess,
    compute_ess_bound,
    compute_ess_dual,
    compute_ess_k,
    compute_horn_cnf,
    compute_mi,
    compute_min_cover,
    compute_primes,
    gen_all_k_subsets,
    gen_all_pairs,
    gen_gimpel,
    gen_gimpel_general,
    gen_horn_gap,
    gen_lift,
)
from essgap.tools.reports import (
    BoundsCorpusParams,
    HornGapSuiteParams,
    Lemma1Params,
    Lemma2Params,
    MiOracleParams,
    MinCertParams,
    SuiteResult,
    Thm1Params,
    Thm3Params,
    Thm4Params,
    run_bounds_corpus,
    run_horn_gap,
    run_lemma1,
    run_lemma2,
    run_mi_oracle,
    run_min_cert,
    run_thm1,
    run_thm3,
    run_thm4,
)

# Define a type alias for the Pydantic models used for params
ParamsModel = Type[Any]

# Define the structure of the tool definition tuple
ToolDefinition = Tuple[
    Callable,  # Implementation function, called as impl(config, params)
    ParamsModel,  # Pydantic model for parameters
    Type,  # Result model
    str,  # Description
]

COMMANDS = ("gen", "compute", "verify")


def get_tool_definitions() -> Dict[str, Dict[str, ToolDefinition]]:
    """
    Returns the definitions of every generator, quantity and suite, keyed by command.

    Returns:
        Dict[str, Dict[str, ToolDefinition]]: command -> name -> definition.
    """
    gen: Dict[str, ToolDefinition] = {
        "all-pairs": (
            gen_all_pairs,
            AllPairsParams,
            GenResult,
            "All C(m,2) pairs of {1..m} as a set-cover instance",
        ),
        "all-k-subsets": (
            gen_all_k_subsets,
            AllKSubsetsParams,
            GenResult,
            "All C(m,r) r-subsets of {1..m} as a set-cover instance",
        ),
        "gimpel": (
            gen_gimpel,
            GimpelParams,
            GenResult,
            "Gimpel's partial function for a set-cover instance",
        ),
        "gimpel-general": (
            gen_gimpel_general,
            GimpelGeneralParams,
            GenResult,
            "Gimpel's partial function over a certified V/W embedding",
        ),
        "lift": (
            gen_lift,
            LiftGenParams,
            GenResult,
            "Total lift of a partial function with ds(g) = s(ds(f)+1)",
        ),
        "horn-gap": (
            gen_horn_gap,
            HornGapGenParams,
            GenResult,
            "Definite Horn family with witness, feedback and amplification clauses",
        ),
    }
    compute: Dict[str, ToolDefinition] = {
        "cs": (compute_cs, ComputeParams, ComputeResult, "Minimum CNF size"),
        "ds": (compute_ds, ComputeParams, ComputeResult, "Minimum DNF size"),
        "ess": (compute_ess, ComputeParams, ComputeResult, "Largest independent point set"),
        "ess-dual": (
            compute_ess_dual,
            ComputeParams,
            ComputeResult,
            "Largest independent truepoint set",
        ),
        "ess-k": (compute_ess_k, ComputeParams, ComputeResult, "Largest k-independent point set"),
        "mi": (compute_mi, ComputeParams, ComputeResult, "Meta-clause count of a definite Horn function"),
        "primes": (compute_primes, ComputeParams, ComputeResult, "Prime implicates (implicants)"),
        "min-cover": (compute_min_cover, ComputeParams, ComputeResult, "Exact minimum set cover"),
        "ess-bound": (
            compute_ess_bound,
            ComputeParams,
            ComputeResult,
            "Upper bound on ess_k from jointly coverable groups",
        ),
        "horn-cnf": (compute_horn_cnf, ComputeParams, ComputeResult, "Minimum Horn CNF size"),
    }
    verify: Dict[str, ToolDefinition] = {
        "lemma1": (run_lemma1, Lemma1Params, SuiteResult, "ds(gimpel) equals the minimum cover"),
        "lemma2": (run_lemma2, Lemma2Params, SuiteResult, "Random V/W certification rate"),
        "thm1": (run_thm1, Thm1Params, SuiteResult, "Lifted Gimpel ds against ess^d"),
        "thm3": (run_thm3, Thm3Params, SuiteResult, "k-independence of the k-uniform family"),
        "horn-gap": (run_horn_gap, HornGapSuiteParams, SuiteResult, "Horn family cs against ess"),
        "bounds-corpus": (
            run_bounds_corpus,
            BoundsCorpusParams,
            SuiteResult,
            "Random corpus against the ess/cs inequalities",
        ),
        "thm4": (run_thm4, Thm4Params, SuiteResult, "Learner chain on definite Horn functions"),
        "mi-oracle": (run_mi_oracle, MiOracleParams, SuiteResult, "Learner count against brute force"),
        "min-cert": (run_min_cert, MinCertParams, SuiteResult, "Exhaustive certification of cs"),
    }
    return {"gen": gen, "compute": compute, "verify": verify}
