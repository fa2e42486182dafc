"""
Generator and compute tools.

Each tool takes the toolkit config and a pydantic params model and returns
a result model whose artifacts map file names to file contents; the toolkit
decides where (and whether) they are written.
"""

import json
import logging
from typing import Any, Dict, Literal, Optional, Union

from pydantic import BaseModel, Field

from essgap.tools.bfcore import (
    FunctionLike,
    TotalFunction,
    function_to_dict,
    load_function,
)
from essgap.tools.constructions import (
    HornGapParams,
    all_k_subsets_instance,
    allender_lift,
    classic_vw,
    generalized_gimpel,
    gimpel_partial,
    hand_vw_all_pairs_m3,
    horn_gap_family,
    lift_params,
    random_vw,
)
from essgap.tools.essence import EssResult, ess, ess_k, implicate_groups_bound
from essgap.tools.exactmin import (
    min_cnf,
    min_dnf,
    min_horn_cnf,
    min_set_cover,
    read_set_cover,
    write_set_cover,
)
from essgap.tools.horn import afp_learn, expand_meta_clauses, write_meta_clauses
from essgap.tools.implicants import prime_implicants, prime_implicates, write_dimacs
from essgap.utils.config import ToolkitConfig, View
from essgap.utils.errors import EssGapError

logger = logging.getLogger(__name__)


def dump_json(data: Any) -> str:
    """Canonical JSON text: sorted keys, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


class GenResult(BaseModel):
    """A generated family with the files that describe it."""

    family: str
    params: Dict[str, Any]
    n: Optional[int] = None
    summary: Dict[str, Any] = Field(default_factory=dict)
    artifacts: Dict[str, str] = Field(default_factory=dict)


class ComputeResult(BaseModel):
    """One computed quantity with its certificate files."""

    quantity: str
    value: Union[int, str]
    certificate: Dict[str, Any] = Field(default_factory=dict)
    artifacts: Dict[str, str] = Field(default_factory=dict)


class AllPairsParams(BaseModel):
    """Parameters for the all-pairs set-cover instance."""

    m: int = Field(..., ge=2, description="Ground-set size")


class AllKSubsetsParams(BaseModel):
    """Parameters for the all-r-subsets set-cover instance."""

    m: int = Field(..., ge=1, description="Ground-set size")
    r: int = Field(2, ge=1, description="Subset size")


class GimpelParams(BaseModel):
    """Parameters for Gimpel's partial function."""

    m: Optional[int] = Field(None, ge=1, description="Ground-set size for an all-r-subsets instance")
    r: int = Field(2, ge=1, description="Subset size; --pairs means r = 2")
    pairs: bool = Field(False, description="Use the all-pairs instance")
    source: Optional[str] = Field(None, description="Set-cover instance file instead of m/r")


class GimpelGeneralParams(BaseModel):
    """Parameters for the V/W generalized Gimpel function."""

    m: int = Field(..., ge=1, description="Ground-set size")
    r: int = Field(2, ge=1, description="Subset size")
    mode: Literal["classic", "random", "hand"] = Field(
        "classic", description="classic: t = m embedding; random: randomized V/W; hand: t = 6 pair"
    )
    seed: Optional[int] = Field(None, description="Seed for the random mode")


class LiftGenParams(BaseModel):
    """Parameters for the total lift of a partial function."""

    source: str = Field(..., description="Partial function JSON file")


class HornGapGenParams(BaseModel):
    """Parameters for the Horn gap family."""

    k: int = Field(..., ge=2, description="Element count")
    t: int = Field(..., ge=1, description="Amplification count")


def _instance_artifacts(stem: str, inst) -> Dict[str, str]:
    return {f"{stem}.txt": write_set_cover(inst)}


def gen_all_pairs(config: ToolkitConfig, params: AllPairsParams) -> GenResult:
    inst = all_k_subsets_instance(params.m, 2)
    return GenResult(
        family="all-pairs",
        params=params.model_dump(),
        summary={"m": inst.m, "p": inst.p, "r": 2},
        artifacts=_instance_artifacts(f"allpairs_m{params.m}", inst),
    )


def gen_all_k_subsets(config: ToolkitConfig, params: AllKSubsetsParams) -> GenResult:
    inst = all_k_subsets_instance(params.m, params.r)
    return GenResult(
        family="all-k-subsets",
        params=params.model_dump(),
        summary={"m": inst.m, "p": inst.p, "r": params.r},
        artifacts=_instance_artifacts(f"allsubsets_m{params.m}_r{params.r}", inst),
    )


def _function_artifact(stem: str, f: FunctionLike) -> Dict[str, str]:
    return {f"{stem}.json": dump_json(function_to_dict(f))}


def gen_gimpel(config: ToolkitConfig, params: GimpelParams) -> GenResult:
    """Gimpel's partial function for an all-r-subsets instance or an instance file."""
    if params.source:
        inst = read_set_cover(params.source)
        stem = "gimpel"
    elif params.m is not None:
        r = 2 if params.pairs else params.r
        inst = all_k_subsets_instance(params.m, r)
        stem = f"gimpel_m{params.m}_r{r}"
    else:
        raise EssGapError("gimpel needs --m or --from", hint="e.g. gen gimpel --m 3 --pairs")
    f = gimpel_partial(inst, max_n=config.effective_max_n)
    return GenResult(
        family="gimpel",
        params=params.model_dump(),
        n=f.n,
        summary={"m": inst.m, "p": inst.p, "s": f.star_count},
        artifacts=_function_artifact(stem, f),
    )


def gen_gimpel_general(config: ToolkitConfig, params: GimpelGeneralParams) -> GenResult:
    """Generalized Gimpel function; the V/W pair is written alongside."""
    if params.mode == "hand":
        if (params.m, params.r) != (3, 2):
            raise EssGapError("the hand-made pair exists only for m = 3, r = 2")
        vw = hand_vw_all_pairs_m3()
    elif params.mode == "random":
        seed = config.seed if params.seed is None else params.seed
        vw = random_vw(all_k_subsets_instance(params.m, params.r), seed=seed)
    else:
        vw = classic_vw(all_k_subsets_instance(params.m, params.r))
    f = generalized_gimpel(vw, max_n=config.effective_max_n)
    stem = f"gimpel_general_{params.mode}_m{params.m}_r{params.r}"
    artifacts = _function_artifact(stem, f)
    artifacts[f"{stem}.vw.json"] = dump_json(vw.model_dump(mode="json"))
    return GenResult(
        family="gimpel-general",
        params=params.model_dump(),
        n=f.n,
        summary={"t": vw.t, "s": f.star_count, "retries": vw.retries},
        artifacts=artifacts,
    )


def gen_lift(config: ToolkitConfig, params: LiftGenParams) -> GenResult:
    f = load_function(params.source, max_n=config.effective_max_n)
    lp = lift_params(f)
    g = allender_lift(f, lp, max_n=config.effective_max_n)
    artifacts = _function_artifact("lift", g)
    artifacts["lift.params.json"] = dump_json(lp.model_dump(mode="json"))
    return GenResult(
        family="lift",
        params=params.model_dump(),
        n=g.n,
        summary={"source_n": f.n, "s": lp.s, "t": lp.t},
        artifacts=artifacts,
    )


def gen_horn_gap(config: ToolkitConfig, params: HornGapGenParams) -> GenResult:
    """The Horn family table plus its Horn CNF in DIMACS and variable names."""
    hp = HornGapParams(k=params.k, t=params.t)
    materialize = hp.n <= config.effective_max_n
    family = horn_gap_family(hp, max_n=config.effective_max_n, materialize=materialize)
    stem = f"horn_gap_k{params.k}_t{params.t}"
    artifacts = {f"{stem}.cnf": write_dimacs(family.cnf)}
    if family.table is not None:
        artifacts.update(_function_artifact(stem, family.table))
    else:
        logger.warning(f"Horn family over {hp.n} variables is above the cap; only the CNF is written")
    artifacts[f"{stem}.names.json"] = dump_json(family.names)
    return GenResult(
        family="horn-gap",
        params=params.model_dump(),
        n=hp.n,
        summary={"clauses": len(family.cnf), **family.counts},
        artifacts=artifacts,
    )


class ComputeParams(BaseModel):
    """Parameters shared by every compute quantity."""

    source: str = Field(..., description="Function JSON file (set-cover text for min-cover)")
    k: int = Field(2, ge=2, description="Independence order for ess-k and ess-bound")
    view: View = Field(View.FALSE, description="false: 0-points / CNF, true: 1-points / DNF")


def _ess_certificate(result: EssResult) -> Dict[str, Any]:
    return {
        "value": result.value,
        "view": result.view.value,
        "k": result.k,
        "certificate": list(result.certificate.points),
        "witnesses": dict(result.certificate.witnesses),
        "witnesses_omitted": result.certificate.witnesses_omitted,
    }


def _load(config: ToolkitConfig, params: ComputeParams) -> FunctionLike:
    return load_function(params.source, max_n=config.effective_max_n)


def _total(f: FunctionLike, quantity: str) -> TotalFunction:
    if not isinstance(f, TotalFunction):
        raise EssGapError(f"{quantity} needs a total function")
    return f


def compute_cs(config: ToolkitConfig, params: ComputeParams) -> ComputeResult:
    size, cnf = min_cnf(_load(config, params), node_limit=config.search_node_limit)
    cert = {"size": size, "certified": True}
    return ComputeResult(
        quantity="cs",
        value=size,
        certificate=cert,
        artifacts={"cs.cnf": write_dimacs(cnf), "cs.json": dump_json(cert)},
    )


def compute_ds(config: ToolkitConfig, params: ComputeParams) -> ComputeResult:
    size, dnf = min_dnf(_load(config, params), node_limit=config.search_node_limit)
    cert = {"size": size, "certified": True}
    return ComputeResult(
        quantity="ds",
        value=size,
        certificate=cert,
        artifacts={"ds.cnf": write_dimacs(dnf), "ds.json": dump_json(cert)},
    )


def _ess_result(quantity: str, result: EssResult) -> ComputeResult:
    cert = _ess_certificate(result)
    return ComputeResult(
        quantity=quantity,
        value=result.value,
        certificate=cert,
        artifacts={f"{quantity}.json": dump_json(cert)},
    )


def _ess_of_order(config: ToolkitConfig, f: FunctionLike, k: int, view: View) -> EssResult:
    if k == 2:
        return ess(f, view, node_limit=config.search_node_limit)
    return ess_k(
        f,
        k,
        view,
        node_limit=config.search_node_limit,
        point_limit=config.ess_k_point_limit,
    )


def compute_ess(config: ToolkitConfig, params: ComputeParams) -> ComputeResult:
    """ess on the chosen view; --k above 2 gives the k-wise quantity."""
    f = _load(config, params)
    return _ess_result("ess", _ess_of_order(config, f, params.k, params.view))


def compute_ess_dual(config: ToolkitConfig, params: ComputeParams) -> ComputeResult:
    f = _load(config, params)
    return _ess_result("ess-dual", _ess_of_order(config, f, params.k, View.TRUE))


def compute_ess_k(config: ToolkitConfig, params: ComputeParams) -> ComputeResult:
    f = _load(config, params)
    return _ess_result("ess-k", _ess_of_order(config, f, params.k, params.view))


def compute_ess_bound(config: ToolkitConfig, params: ComputeParams) -> ComputeResult:
    bound = implicate_groups_bound(_load(config, params), params.k, params.view)
    cert = {"bound": bound, "k": params.k, "view": params.view.value}
    return ComputeResult(
        quantity="ess-bound",
        value=bound,
        certificate=cert,
        artifacts={"ess-bound.json": dump_json(cert)},
    )


def compute_mi(config: ToolkitConfig, params: ComputeParams) -> ComputeResult:
    """Meta-clause count of the AFP basis of a definite Horn function."""
    basis = afp_learn(_total(_load(config, params), "mi"))
    cert = {
        "meta_clauses": len(basis),
        "negatives": basis.negatives,
        "positives": basis.positives,
        "clauses": len(expand_meta_clauses(basis)),
    }
    return ComputeResult(
        quantity="mi",
        value=len(basis),
        certificate=cert,
        artifacts={"mi.horn": write_meta_clauses(basis), "mi.json": dump_json(cert)},
    )


def compute_primes(config: ToolkitConfig, params: ComputeParams) -> ComputeResult:
    f = _load(config, params)
    primes = prime_implicates(f) if params.view is View.FALSE else prime_implicants(f)
    return ComputeResult(
        quantity="primes",
        value=len(primes),
        certificate={"count": len(primes), "view": params.view.value},
        artifacts={"primes.cnf": write_dimacs(primes)},
    )


def compute_min_cover(config: ToolkitConfig, params: ComputeParams) -> ComputeResult:
    inst = read_set_cover(params.source)
    result = min_set_cover(inst, node_limit=config.search_node_limit)
    cert = result.model_dump(mode="json")
    return ComputeResult(
        quantity="min-cover",
        value=result.size,
        certificate=cert,
        artifacts={"min-cover.json": dump_json(cert)},
    )


def compute_horn_cnf(config: ToolkitConfig, params: ComputeParams) -> ComputeResult:
    size, cnf = min_horn_cnf(_load(config, params), node_limit=config.search_node_limit)
    cert = {"size": size, "certified": True}
    return ComputeResult(
        quantity="horn-cnf",
        value=size,
        certificate=cert,
        artifacts={"horn-cnf.cnf": write_dimacs(cnf), "horn-cnf.json": dump_json(cert)},
    )
