"""
Gap reports and the verification suites.

Each suite takes the toolkit config and a pydantic params model and returns
a SuiteResult whose rows are GapReports. A row passes when every entry of
its checks dict holds; the suite passes when every row does.
"""

import csv
import io
import json
import logging
import math
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, computed_field

from essgap.tools.bfcore import FunctionLike, TotalFunction, complement
from essgap.tools.constructions import (
    HornGapParams,
    all_k_subsets_instance,
    allender_lift,
    certify_vw,
    classic_vw,
    draw_vw,
    forward_holds,
    generalized_gimpel,
    gimpel_partial,
    hand_vw_all_pairs_m3,
    horn_gap_cs,
    horn_gap_ess_bound,
    horn_gap_family,
    lift_params,
    lift_partition_key,
    vw_length,
)
from essgap.tools.corpus import corpus, make_rng, random_set_cover
from essgap.tools.essence import block_upper_bound, ess, ess_k
from essgap.tools.exactmin import (
    SetCoverInstance,
    certify_min_cnf,
    cs,
    ds,
    min_horn_cnf,
    min_set_cover,
)
from essgap.tools.horn import afp_learn, check_negatives_independent, is_horn, mi_bruteforce
from essgap.utils.config import ToolkitConfig, View

logger = logging.getLogger(__name__)

PASS = "PASS"
FAIL = "FAIL"

CSV_COLUMNS = [
    "family",
    "params",
    "n",
    "cs",
    "ds",
    "ess",
    "ess_dual",
    "k",
    "ess_k",
    "mi",
    "ratio_cs_ess",
    "ratio_ds_essdual",
    "status",
]


def _ratio(num: Optional[int], den: Optional[int]) -> Optional[float]:
    if num is None or not den:
        return None
    return round(num / den, 6)


class GapReport(BaseModel):
    """One verified case: the measured quantities and the checks run on them."""

    family: str
    params: Dict[str, Any] = Field(default_factory=dict)
    n: Optional[int] = None
    cs: Optional[int] = None
    ds: Optional[int] = None
    ess: Optional[int] = None
    ess_dual: Optional[int] = None
    k: List[int] = Field(default_factory=list)
    ess_k: Dict[str, int] = Field(default_factory=dict)
    mi: Optional[int] = None
    certificates: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    checks: Dict[str, bool] = Field(default_factory=dict)
    notes: Dict[str, Any] = Field(default_factory=dict)

    @computed_field
    @property
    def ratio_cs_ess(self) -> Optional[float]:
        return _ratio(self.cs, self.ess)

    @computed_field
    @property
    def ratio_ds_essdual(self) -> Optional[float]:
        return _ratio(self.ds, self.ess_dual)

    @computed_field
    @property
    def status(self) -> str:
        return PASS if all(self.checks.values()) else FAIL

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def failed_checks(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]


class SuiteResult(BaseModel):
    """All rows of one suite run."""

    suite: str
    claim: str
    params: Dict[str, Any] = Field(default_factory=dict)
    rows: List[GapReport] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)


def _finish(
    suite: str, claim: str, params: BaseModel, rows: List[GapReport], **summary
) -> SuiteResult:
    failed = [row for row in rows if not row.passed]
    for row in failed:
        logger.warning(f"{suite}: {row.family} {row.params} failed {row.failed_checks()}")
    logger.info(f"{suite}: {len(rows) - len(failed)}/{len(rows)} rows pass")
    summary.update({"rows": len(rows), "failed": len(failed)})
    return SuiteResult(
        suite=suite,
        claim=claim,
        params=params.model_dump(mode="json"),
        rows=rows,
        summary=summary,
    )


def _seed(config: ToolkitConfig, seed: Optional[int]) -> int:
    return config.seed if seed is None else seed


def _cover_row(
    config: ToolkitConfig, family: str, inst: SetCoverInstance, params: Dict[str, Any], seed=None
) -> GapReport:
    f = gimpel_partial(inst, max_n=config.effective_max_n)
    cover = min_set_cover(inst, node_limit=config.search_node_limit)
    ds_f = ds(f, node_limit=config.search_node_limit)
    return GapReport(
        family=family,
        params=params,
        n=f.n,
        ds=ds_f,
        seed=seed,
        certificates={"cover": list(cover.witness)},
        checks={"ds_equals_min_cover": ds_f == cover.size},
        notes={"min_cover": cover.size, "s": f.star_count},
    )


class Lemma1Params(BaseModel):
    """Parameters for the Gimpel equivalence suite."""

    m_max: int = Field(
        4, ge=2, le=6, description="Largest ground set of the all-pairs and all-triples instances"
    )
    random_count: int = Field(100, ge=0, description="Number of random instances")
    random_m_max: int = Field(4, ge=2, le=8)
    random_p_max: int = Field(5, ge=1)
    seed: Optional[int] = None


def run_lemma1(config: ToolkitConfig, params: Lemma1Params) -> SuiteResult:
    """ds of the Gimpel function equals the minimum cover size."""
    seed = _seed(config, params.seed)
    rows = []
    for r, family in ((2, "all-pairs"), (3, "all-triples")):
        for m in range(max(r, 2), params.m_max + 1):
            inst = all_k_subsets_instance(m, r)
            rows.append(_cover_row(config, family, inst, {"m": m, "r": r}))
    rng = make_rng(seed)
    for i in range(params.random_count):
        m = int(rng.integers(2, params.random_m_max + 1))
        p = int(rng.integers(1, params.random_p_max + 1))
        inst = random_set_cover(m, p, rng)
        rows.append(_cover_row(config, "random-cover", inst, {"m": m, "p": p, "case": i}, seed))

    # the V/W form on the same all-pairs instance
    pairs3 = all_k_subsets_instance(3, 2)
    for mode, vw in (("classic", classic_vw(pairs3)), ("hand", hand_vw_all_pairs_m3())):
        f = generalized_gimpel(vw, max_n=config.effective_max_n)
        ds_f = ds(f, node_limit=config.search_node_limit)
        cover = min_set_cover(vw.instance).size
        rows.append(
            GapReport(
                family="gimpel-general",
                params={"m": 3, "r": 2, "mode": mode, "t": vw.t},
                n=f.n,
                ds=ds_f,
                checks={"vw_certified": vw.certified, "ds_equals_min_cover": ds_f == cover},
                notes={"min_cover": cover, "s": f.star_count},
            )
        )
    return _finish("lemma1", "ds(gimpel(inst)) equals the minimum set cover size", params, rows)


class Lemma2Params(BaseModel):
    """Parameters for the randomized V/W suite."""

    m: int = Field(3, ge=2, le=12)
    r: int = Field(2, ge=1)
    trials: int = Field(200, ge=1)
    min_successes: Optional[int] = Field(
        None, ge=0, description="Required certified draws; default is 40% of trials"
    )
    seed: Optional[int] = None


def run_lemma2(config: ToolkitConfig, params: Lemma2Params) -> SuiteResult:
    """Independent random draws certify with probability above one half."""
    seed = _seed(config, params.seed)
    inst = all_k_subsets_instance(params.m, params.r)
    t = vw_length(inst)
    rng = make_rng(seed)
    successes = 0
    forward_always = True
    for _ in range(params.trials):
        V, W = draw_vw(inst, rng, t)
        successes += certify_vw(inst, V, W)
        forward_always &= forward_holds(inst, V, W)
    need = params.min_successes
    if need is None:
        need = math.ceil(0.4 * params.trials)
    rate = successes / params.trials
    row = GapReport(
        family="vw-random",
        params={"m": params.m, "r": params.r, "p": inst.p, "t": t, "trials": params.trials},
        seed=seed,
        checks={
            "forward_implication_always": forward_always,
            "successes_at_least_required": successes >= need,
            "rate_above_half": rate > 0.5,
        },
        notes={"successes": successes, "required": need, "rate": round(rate, 6)},
    )
    return _finish("lemma2", "a random V/W draw certifies with probability above 1/2", params, [row])


class Thm1Params(BaseModel):
    """Parameters for the Gimpel plus lift pipeline."""

    ms: List[int] = Field(default_factory=lambda: [3], description="All-pairs ground-set sizes")


def _lift(config: ToolkitConfig, f: FunctionLike):
    lp = lift_params(f)
    g = allender_lift(f, lp, max_n=config.effective_max_n)
    ds_g = ds(g, node_limit=config.search_node_limit)
    return lp, g, ds_g


def run_thm1(config: ToolkitConfig, params: Thm1Params) -> SuiteResult:
    """Exact ds of the lifted Gimpel function against its ess^d upper bound."""
    rows = []
    for m in params.ms:
        inst = all_k_subsets_instance(m, 2)
        f = gimpel_partial(inst, max_n=config.effective_max_n)
        ds_f = ds(f, node_limit=config.search_node_limit)
        lp, g, ds_g = _lift(config, f)
        s = lp.s
        dual = ess(g, View.TRUE, node_limit=config.search_node_limit)
        n = g.n
        rows.append(
            GapReport(
                family="gimpel-lift",
                params={"m": m, "r": 2, "s": s, "t": lp.t},
                n=n,
                ds=ds_g,
                ess_dual=dual.value,
                certificates={"ess_dual": list(dual.certificate.points)},
                checks={
                    "ds_f_is_half_m": ds_f == math.ceil(m / 2),
                    "ds_g_is_s_times_ds_f_plus_1": ds_g == s * (ds_f + 1),
                    "ess_dual_at_most_2s": dual.value <= 2 * s,
                    "ratio_at_least_n_plus_1_over_8": dual.value > 0
                    and Fraction(ds_g, dual.value) >= Fraction(n + 1, 8),
                },
                notes={"ds_f": ds_f, "footnote_equality": dual.value == 2 * s},
            )
        )
    return _finish("thm1", "ds(g)/ess^d(g) >= (n+1)/8 for the lifted Gimpel function", params, rows)


class Thm3Params(BaseModel):
    """Parameters for the k-uniform embedding suite."""

    m: int = Field(5, ge=2, le=8)
    k: int = Field(3, ge=2)


def run_thm3(config: ToolkitConfig, params: Thm3Params) -> SuiteResult:
    """k-independence stays at k-1 on the partial function and 2s(k-1) on its lift."""
    m, k = params.m, params.k
    inst = all_k_subsets_instance(m, k)
    vw = classic_vw(inst)
    f = generalized_gimpel(vw, max_n=config.effective_max_n)
    nl = config.search_node_limit
    ds_f = ds(f, node_limit=nl)
    ess_k_f = ess_k(f, k, View.TRUE, node_limit=nl, point_limit=config.ess_k_point_limit)
    ess_2_f = ess(f, View.TRUE, node_limit=nl)
    rows = [
        GapReport(
            family="gimpel-uniform",
            params={"m": m, "k": k, "t": vw.t},
            n=f.n,
            ds=ds_f,
            ess_dual=ess_2_f.value,
            k=[k],
            ess_k={str(k): ess_k_f.value},
            certificates={"ess_k_dual": list(ess_k_f.certificate.points)},
            checks={
                "ds_f_is_m_over_k": ds_f == math.ceil(m / k),
                "ess_k_dual_is_k_minus_1": ess_k_f.value == k - 1,
            },
            notes={"s": f.star_count},
        )
    ]
    lp, g, ds_g = _lift(config, f)
    s = lp.s
    blocks = block_upper_bound(g, k, View.TRUE, key=lift_partition_key(f, lp), node_limit=nl)
    rows.append(
        GapReport(
            family="gimpel-uniform-lift",
            params={"m": m, "k": k, "s": s, "t": lp.t},
            n=g.n,
            ds=ds_g,
            k=[k],
            checks={
                "ds_g_is_s_times_ds_f_plus_1": ds_g == s * (ds_f + 1),
                "ess_k_dual_at_most_2s_k_minus_1": blocks["bound"] <= 2 * s * (k - 1),
            },
            notes={"ess_k_dual_block_bound": blocks["bound"], "blocks": len(blocks) - 1},
        )
    )
    claim = "ess_k^d of the lifted k-uniform Gimpel function is at most 2s(k-1)"
    return _finish("thm3", claim, params, rows)


class HornGapSuiteParams(BaseModel):
    """Parameters for the Horn gap family suite."""

    cases: List[Tuple[int, int]] = Field(default_factory=lambda: [(3, 1), (3, 2), (4, 2)])


def _horn_gap_row(config: ToolkitConfig, k: int, t: int) -> GapReport:
    hp = HornGapParams(k=k, t=t)
    family = horn_gap_family(hp, max_n=config.effective_max_n)
    f = family.table
    nl = config.search_node_limit
    cs_f = cs(f, node_limit=nl)
    ess_f = ess(f, node_limit=nl)
    basis = afp_learn(f)
    horn_size, _ = min_horn_cnf(f, node_limit=nl)
    pairs = math.comb(k, 2)
    return GapReport(
        family="horn-gap",
        params={"k": k, "t": t},
        n=f.n,
        cs=cs_f,
        ess=ess_f.value,
        mi=len(basis),
        certificates={"ess": list(ess_f.certificate.points)},
        checks={
            "is_horn": is_horn(f),
            "clause_counts": family.counts
            == {"witness": 2 * pairs, "feedback": pairs, "amplification": t * pairs},
            "cs_closed_form": cs_f == horn_gap_cs(hp),
            "ess_at_most_bound": ess_f.value <= horn_gap_ess_bound(hp),
            "ess_at_least_mi": ess_f.value >= len(basis),
        },
        notes={"min_horn_cnf": horn_size, "horn_cs_gap": horn_size != cs_f},
    )


def run_horn_gap(config: ToolkitConfig, params: HornGapSuiteParams) -> SuiteResult:
    """Exact cs of the Horn family against its ess upper bound."""
    rows = [_horn_gap_row(config, k, t) for k, t in params.cases]
    return _finish("horn-gap", "cs = 3C(k,2) + t*ceil(k/2) and ess <= 3C(k,2) + t", params, rows)


class BoundsCorpusParams(BaseModel):
    """Parameters for the random property corpus."""

    n: int = Field(8, ge=1, le=8, description="Largest variable count; sizes cycle from 1 to n")
    count: int = Field(1000, ge=0)
    ks: List[int] = Field(default_factory=lambda: [2, 3, 4])
    k4_falsepoint_limit: int = Field(300, ge=0)
    monotone_count: int = Field(200, ge=0)
    monotone_n: int = Field(6, ge=1, le=8)
    seed: Optional[int] = None


def _bounds_row(
    config: ToolkitConfig, f: TotalFunction, params: BoundsCorpusParams, case: int, seed: int
) -> GapReport:
    nl = config.search_node_limit
    cs_f = cs(f, node_limit=nl)
    ds_f = ds(f, node_limit=nl)
    ess_f = ess(f, node_limit=nl).value
    ess_d = ess(f, View.TRUE, node_limit=nl).value
    ess_neg = ess(complement(f), node_limit=nl).value
    zeros = len(f.zeros())
    ks = [k for k in params.ks if k < 4 or zeros <= params.k4_falsepoint_limit]
    values = {
        k: ess_k(f, k, node_limit=nl, point_limit=config.ess_k_point_limit).value for k in ks
    }
    checks = {
        "ess_at_most_cs": ess_f <= cs_f,
        "ess_dual_is_ess_of_complement": ess_d == ess_neg,
        "ess_dual_at_most_ds": ess_d <= ds_f,
        "cs_at_most_half_cube": cs_f <= 1 << (f.n - 1),
    }
    if 2 in values:
        checks["ess_2_is_ess"] = values[2] == ess_f
    checks["ess_k_over_k_minus_1_at_most_cs"] = all(
        Fraction(v, k - 1) <= cs_f for k, v in values.items()
    )
    return GapReport(
        family="random-total",
        params={"case": case},
        n=f.n,
        cs=cs_f,
        ds=ds_f,
        ess=ess_f,
        ess_dual=ess_d,
        k=ks,
        ess_k={str(k): v for k, v in values.items()},
        seed=seed,
        checks=checks,
    )


def run_bounds_corpus(config: ToolkitConfig, params: BoundsCorpusParams) -> SuiteResult:
    """Random total functions against the elementary ess/cs inequalities."""
    seed = _seed(config, params.seed)
    sizes = list(range(1, params.n + 1))
    rows = [
        _bounds_row(config, f, params, i, seed)
        for i, f in enumerate(corpus("total", sizes, params.count, seed))
    ]
    mono_sizes = list(range(1, params.monotone_n + 1))
    for i, f in enumerate(corpus("monotone", mono_sizes, params.monotone_count, seed + 1)):
        cs_f = cs(f, node_limit=config.search_node_limit)
        ess_f = ess(f, node_limit=config.search_node_limit).value
        rows.append(
            GapReport(
                family="random-monotone",
                params={"case": i},
                n=f.n,
                cs=cs_f,
                ess=ess_f,
                seed=seed + 1,
                checks={"ess_is_cs": ess_f == cs_f},
            )
        )
    claim = "ess <= cs and ess_k/(k-1) <= cs; ess = cs on monotone functions"
    return _finish("bounds-corpus", claim, params, rows)


class Thm4Params(BaseModel):
    """Parameters for the Horn learner chain."""

    n_max: int = Field(7, ge=1, le=10)
    count: int = Field(200, ge=0)
    include_family: bool = True
    family_cases: List[Tuple[int, int]] = Field(
        default_factory=lambda: [(3, 1), (3, 2), (4, 2)],
        description="Horn gap family (k, t) cases appended when include_family is set",
    )
    seed: Optional[int] = None


def _thm4_row(
    config: ToolkitConfig, family: str, f: TotalFunction, params: Dict[str, Any], seed=None
) -> GapReport:
    nl = config.search_node_limit
    basis = afp_learn(f)
    mi = len(basis)
    ess_f = ess(f, node_limit=nl).value
    cs_f = cs(f, node_limit=nl)
    negatives = check_negatives_independent(basis, f)
    return GapReport(
        family=family,
        params=params,
        n=f.n,
        cs=cs_f,
        ess=ess_f,
        mi=mi,
        seed=seed,
        certificates={"negatives": negatives.negatives},
        checks={
            "ess_at_least_mi": ess_f >= mi,
            "cs_at_most_n_mi": cs_f <= f.n * mi,
            "cs_at_most_n_ess": cs_f <= f.n * ess_f,
            "negatives_independent": negatives.independent,
        },
    )


def run_thm4(config: ToolkitConfig, params: Thm4Params) -> SuiteResult:
    """mi <= ess <= cs <= n*mi on definite Horn functions."""
    seed = _seed(config, params.seed)
    sizes = list(range(1, params.n_max + 1))
    rows = [
        _thm4_row(config, "random-horn", f, {"case": i}, seed)
        for i, f in enumerate(corpus("definite-horn", sizes, params.count, seed))
    ]
    if params.include_family:
        for k, t in params.family_cases:
            fam = horn_gap_family(HornGapParams(k=k, t=t), max_n=config.effective_max_n)
            rows.append(_thm4_row(config, "horn-gap", fam.table, {"k": k, "t": t}))
    return _finish("thm4", "cs(f) <= n * ess(f) on Horn functions via the learner basis", params, rows)


class MiOracleParams(BaseModel):
    """Parameters for the learner optimality check."""

    n_max: int = Field(5, ge=1, le=5)
    count: int = Field(100, ge=0)
    seed: Optional[int] = None


def run_mi_oracle(config: ToolkitConfig, params: MiOracleParams) -> SuiteResult:
    """The learner's meta-clause count equals the brute-force minimum."""
    seed = _seed(config, params.seed)
    rows = []
    sizes = list(range(1, params.n_max + 1))
    for i, f in enumerate(corpus("definite-horn", sizes, params.count, seed)):
        learned = len(afp_learn(f))
        exact = mi_bruteforce(f)
        rows.append(
            GapReport(
                family="random-horn",
                params={"case": i},
                n=f.n,
                mi=learned,
                seed=seed,
                checks={"mi_is_minimum": learned == exact},
                notes={"mi_bruteforce": exact},
            )
        )
    return _finish("mi-oracle", "the learner returns a minimum meta-clause basis", params, rows)


class MinCertParams(BaseModel):
    """Parameters for the minimizer certification corpus."""

    n_max: int = Field(5, ge=1, le=5)
    count: int = Field(100, ge=0)
    seed: Optional[int] = None


def run_min_cert(config: ToolkitConfig, params: MinCertParams) -> SuiteResult:
    """An exhaustive search finds no CNF smaller than cs."""
    seed = _seed(config, params.seed)
    rows = []
    sizes = list(range(1, params.n_max + 1))
    for i, f in enumerate(corpus("total", sizes, params.count, seed)):
        cs_f = cs(f, node_limit=config.search_node_limit)
        rows.append(
            GapReport(
                family="random-total",
                params={"case": i},
                n=f.n,
                cs=cs_f,
                seed=seed,
                checks={"no_smaller_cnf": certify_min_cnf(f, cs_f)},
            )
        )
    return _finish("min-cert", "no CNF of size cs-1 exists", params, rows)


def suite_to_json(result: SuiteResult) -> str:
    return json.dumps(result.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    return str(value)


def report_to_csv_row(row: GapReport) -> Dict[str, str]:
    """One CSV record; list-valued columns are joined with ';'."""
    return {
        "family": row.family,
        "params": ";".join(f"{key}={row.params[key]}" for key in sorted(row.params)),
        "n": _cell(row.n),
        "cs": _cell(row.cs),
        "ds": _cell(row.ds),
        "ess": _cell(row.ess),
        "ess_dual": _cell(row.ess_dual),
        "k": ";".join(str(k) for k in row.k),
        "ess_k": ";".join(str(row.ess_k[str(k)]) for k in row.k if str(k) in row.ess_k),
        "mi": _cell(row.mi),
        "ratio_cs_ess": _cell(row.ratio_cs_ess),
        "ratio_ds_essdual": _cell(row.ratio_ds_essdual),
        "status": row.status,
    }


def suite_to_csv(result: SuiteResult) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in result.rows:
        writer.writerow(report_to_csv_row(row))
    return buffer.getvalue()
