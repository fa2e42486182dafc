"""
Generators for the gap-witness families.

Set-cover instances, the Gimpel partial functions (classic and V/W
generalized), the randomized V/W vectors, the Allender total lift and the
definite Horn family with witness, feedback and amplification clauses.

Vectors of {0,1}^t are ints with component i at bit i-1, the same
convention as assignments.
"""

import logging
import math
from itertools import combinations
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from essgap.tools.bfcore import (
    MAX_N,
    Cube,
    FunctionLike,
    PartialFunction,
    TotalFunction,
    array_to_table,
    as_partial,
    check_cap,
    parity,
    table_to_array,
)
from essgap.tools.exactmin import SetCoverInstance
from essgap.tools.implicants import ClauseSet
from essgap.utils.config import View
from essgap.utils.errors import EssGapError, RetryBudgetExhausted, UncertifiedVWError

logger = logging.getLogger(__name__)

VW_RETRY_BUDGET = 64


def _weights(idx: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(idx.shape, dtype=np.int64)
    for i in range(n):
        out += (idx >> i) & 1
    return out


def all_k_subsets_instance(m: int, r: int) -> SetCoverInstance:
    """All C(m, r) subsets of {1..m} of size r, in lexicographic order."""
    if m < 1 or r < 1 or r > m:
        raise EssGapError(f"need 1 <= r <= m, got m={m}, r={r}")
    subsets = tuple(combinations(range(1, m + 1), r))
    return SetCoverInstance(m=m, subsets=subsets, r=r)


def gimpel_point(inst: SetCoverInstance, j: int) -> int:
    """x_S for subset j: x_i = 0 exactly when e_i is in the subset."""
    full = (1 << inst.m) - 1
    return full & ~sum(1 << (e - 1) for e in inst.subsets[j])


def gimpel_partial(inst: SetCoverInstance, max_n: int = MAX_N) -> PartialFunction:
    """
    Gimpel's partial function on m variables.

    1 on the points of weight m-1, * on the remaining points above some x_S,
    0 elsewhere. The 1-rule takes precedence over the *-rule.
    """
    check_cap(inst.m, max_n, "Gimpel partial function")
    n = inst.m
    idx = np.arange(1 << n, dtype=np.int64)
    ones = _weights(idx, n) == n - 1
    above = np.zeros(idx.shape, dtype=bool)
    for j in range(inst.p):
        xs = gimpel_point(inst, j)
        above |= (idx & xs) == xs
    stars = above & ~ones
    f = PartialFunction(n=n, ones=array_to_table(ones), stars=array_to_table(stars))
    logger.debug(f"Gimpel partial on {n} variables: s = {f.star_count}")
    return f


class VWPair(BaseModel):
    """Vectors with e_i in S_j iff v^i >= w^j, for one set-cover instance."""

    model_config = ConfigDict(frozen=True)

    t: int = Field(..., ge=1)
    V: Tuple[int, ...]
    W: Tuple[int, ...]
    instance: SetCoverInstance
    seed: Optional[int] = None
    retries: int = 0

    @model_validator(mode="after")
    def _check_shape(self) -> "VWPair":
        if len(self.V) != self.instance.m or len(self.W) != self.instance.p:
            raise ValueError("need one v per element and one w per subset")
        if any(v >> self.t for v in self.V + self.W):
            raise ValueError(f"vectors must fit in t={self.t} bits")
        return self

    @property
    def certified(self) -> bool:
        return certify_vw(self.instance, self.V, self.W)


def dominates(v: int, w: int) -> bool:
    """Componentwise v >= w."""
    return w & ~v == 0


def certify_vw(inst: SetCoverInstance, V: Tuple[int, ...], W: Tuple[int, ...]) -> bool:
    """Exhaustive check of e_i in S_j iff v^i >= w^j over every (i, j)."""
    for j, subset in enumerate(inst.subsets):
        members = set(subset)
        for i in range(1, inst.m + 1):
            if (i in members) != dominates(V[i - 1], W[j]):
                return False
    return True


def classic_vw(inst: SetCoverInstance) -> VWPair:
    """The t = m embedding: v^i has its single 0 at position i, w^j = x_S."""
    full = (1 << inst.m) - 1
    V = tuple(full & ~(1 << (i - 1)) for i in range(1, inst.m + 1))
    W = tuple(gimpel_point(inst, j) for j in range(inst.p))
    return VWPair(t=inst.m, V=V, W=W, instance=inst)


def vector_from_str(bits: str) -> int:
    """'011011' -> int with component 1 (leftmost) at bit 0."""
    return sum(1 << i for i, ch in enumerate(bits) if ch == "1")


def hand_vw_all_pairs_m3() -> VWPair:
    """A certified t = 6 pair for the all-pairs instance on 3 elements."""
    inst = all_k_subsets_instance(3, 2)
    V = tuple(vector_from_str(s) for s in ("011011", "101101", "110110"))
    W = tuple(V[a - 1] & V[b - 1] for a, b in inst.subsets)
    return VWPair(t=6, V=V, W=W, instance=inst)


def vw_length(inst: SetCoverInstance) -> int:
    """t = ceil(3r(1 + ln(pm)))."""
    if inst.r is None:
        raise EssGapError("random V/W vectors need an r-uniform instance")
    return math.ceil(3 * inst.r * (1 + math.log(inst.p * inst.m)))


def draw_vw(inst: SetCoverInstance, rng: np.random.Generator, t: Optional[int] = None):
    """
    One random draw: each bit of v^i is 0 with probability 1/r, w^j is the AND.

    Returns:
        (V, W) tuples of ints.
    """
    t = vw_length(inst) if t is None else t
    bits = rng.random((inst.m, t)) >= 1.0 / inst.r
    V = tuple(sum(1 << int(i) for i in np.flatnonzero(row)) for row in bits)
    full = (1 << t) - 1
    W = []
    for subset in inst.subsets:
        w = full
        for e in subset:
            w &= V[e - 1]
        W.append(w)
    return V, tuple(W)


def random_vw(
    inst: SetCoverInstance, seed: int = 0, max_retries: int = VW_RETRY_BUDGET
) -> VWPair:
    """
    Randomized V/W vectors, redrawn until certified.

    Raises:
        RetryBudgetExhausted: If no draw certifies within max_retries attempts.
    """
    t = vw_length(inst)
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_retries + 1):
        V, W = draw_vw(inst, rng, t)
        if certify_vw(inst, V, W):
            logger.info(f"Certified V/W pair with t={t} after {attempt} draws (seed {seed})")
            return VWPair(t=t, V=V, W=W, instance=inst, seed=seed, retries=attempt)
        logger.debug(f"Draw {attempt} failed certification")
    raise RetryBudgetExhausted(
        f"no certified V/W pair in {max_retries} draws",
        hint="try another --seed; each draw succeeds with probability above 1/2",
    )


def forward_holds(inst: SetCoverInstance, V: Tuple[int, ...], W: Tuple[int, ...]) -> bool:
    """e_i in S_j implies v^i >= w^j."""
    return all(dominates(V[e - 1], W[j]) for j, s in enumerate(inst.subsets) for e in s)


def generalized_gimpel(vw: VWPair, max_n: int = MAX_N) -> PartialFunction:
    """
    The partial function on t variables: 1 on V, * above some w and outside V.

    Raises:
        UncertifiedVWError: If the pair does not have the iff property.
    """
    if not vw.certified:
        raise UncertifiedVWError("V/W pair fails e_i in S_j iff v^i >= w^j")
    check_cap(vw.t, max_n, "generalized Gimpel function")
    idx = np.arange(1 << vw.t, dtype=np.int64)
    ones = np.zeros(idx.shape, dtype=bool)
    ones[list(vw.V)] = True
    above = np.zeros(idx.shape, dtype=bool)
    for w in vw.W:
        above |= (idx & w) == w
    return PartialFunction(n=vw.t, ones=array_to_table(ones), stars=array_to_table(above & ~ones))


class LiftParams(BaseModel):
    """z-vector length and the odd-parity z vectors paired with *-points."""

    model_config = ConfigDict(frozen=True)

    t: int = Field(..., ge=1)
    s_odd: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_vectors(self) -> "LiftParams":
        if len(set(self.s_odd)) != len(self.s_odd):
            raise ValueError("odd vectors must be distinct")
        for z in self.s_odd:
            if z >> self.t or not parity(z):
                raise ValueError(f"{z} is not an odd-parity vector of length {self.t}")
        return self

    @property
    def s(self) -> int:
        return len(self.s_odd)


def lift_params(f: FunctionLike) -> LiftParams:
    """t = vars(f)+1, raised to ceil(log2 s)+1 when s > 2^(t-1); smallest odd vectors."""
    p = as_partial(f)
    s = p.star_count
    t = p.n + 1
    if s > 1 << (t - 1):
        t = math.ceil(math.log2(s)) + 1
    odd = []
    z = 0
    while len(odd) < s:
        if parity(z):
            odd.append(z)
        z += 1
    return LiftParams(t=t, s_odd=tuple(odd))


def lift_layout(f: FunctionLike, params: LiftParams) -> Dict[str, List[int]]:
    """Variable positions (1-based) of x, y1, y2 and z in the lifted function."""
    v = f.n
    return {
        "x": list(range(1, v + 1)),
        "y1": [v + 1],
        "y2": [v + 2],
        "z": list(range(v + 3, v + 3 + params.t)),
    }


def allender_lift(
    f: FunctionLike, params: Optional[LiftParams] = None, max_n: int = MAX_N
) -> TotalFunction:
    """
    Total function g(x, y1, y2, z) built from a partial f.

    g = 1 when f(x) = 1, y1 = y2 = 1 and z is one of the odd vectors; when
    f(x) = * and y1 = y2 = 1; when f(x) = *, y1 = chi(x) and y2 = not chi(x).
    Variables are x first (low bits), then y1, y2, then z_1..z_t.
    """
    p = as_partial(f)
    params = params or lift_params(p)
    if params.s != p.star_count:
        raise EssGapError(f"lift needs {p.star_count} odd vectors, got {params.s}")
    if params.s > 1 << (params.t - 1):
        raise EssGapError(f"{params.s} odd vectors do not fit in t={params.t}")
    v = p.n
    total = v + 2 + params.t
    check_cap(total, max_n, "lifted function")
    idx = np.arange(1 << total, dtype=np.int64)
    x = idx & ((1 << v) - 1)
    y1 = ((idx >> v) & 1).astype(bool)
    y2 = ((idx >> (v + 1)) & 1).astype(bool)
    z = idx >> (v + 2)
    ones = table_to_array(p.ones, v)
    stars = table_to_array(p.stars, v)
    chi = (_weights(np.arange(1 << v, dtype=np.int64), v) & 1).astype(bool)
    in_s = np.zeros(1 << params.t, dtype=bool)
    in_s[list(params.s_odd)] = True
    fx_one = ones[x]
    fx_star = stars[x]
    chi_x = chi[x]
    g = (fx_one & y1 & y2 & in_s[z]) | (fx_star & y1 & y2) | (fx_star & (y1 == chi_x) & (y2 != chi_x))
    logger.info(f"Lifted {v}-variable function with s={params.s}, t={params.t} to n={total}")
    return TotalFunction(n=total, table=array_to_table(g))


def lift_partition_key(f: FunctionLike, params: LiftParams) -> Callable[[int], Tuple[str, int]]:
    """
    Block label for truepoints of the lift: ("x", x) when f(x) = *, else ("z", z).

    Points sharing an x of the first kind, or a z of the second kind, share a
    covering term.
    """
    p = as_partial(f)
    v = p.n

    def key(a: int) -> Tuple[str, int]:
        x = a & ((1 << v) - 1)
        if (p.stars >> x) & 1:
            return ("x", x)
        return ("z", a >> (v + 2))

    return key


class HornGapParams(BaseModel):
    """Element count k and amplification count t."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=2)
    t: int = Field(..., ge=1)

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return list(combinations(range(1, self.k + 1), 2))

    @property
    def n(self) -> int:
        return self.k + math.comb(self.k, 2) + self.t


class HornGapFamily(BaseModel):
    """The Horn CNF of the family, its clause counts and (when small enough) its table."""

    params: HornGapParams
    names: List[str]
    cnf: ClauseSet
    counts: Dict[str, int]
    table: Optional[TotalFunction] = None


def horn_gap_names(params: HornGapParams) -> List[str]:
    names = [f"x{i}" for i in range(1, params.k + 1)]
    names += [f"s{a}_{b}" for a, b in params.pairs]
    names += [f"z{h}" for h in range(1, params.t + 1)]
    return names


def horn_gap_family(
    params: HornGapParams, max_n: int = MAX_N, materialize: bool = True
) -> HornGapFamily:
    """
    The definite Horn formula for the all-pairs instance on k elements.

    Witness clauses s_J -> x_i for i in J, feedback clauses x_1..x_k -> s_J
    and amplification clauses z_h -> s_J. Variables: x_1..x_k, then s_J in
    lexicographic order, then z_1..z_t. The truth table is only built when
    the variable count is within max_n.
    """
    k, t = params.k, params.t
    n = params.n
    x_bit = {i: 1 << (i - 1) for i in range(1, k + 1)}
    s_bit = {pair: 1 << (k + j) for j, pair in enumerate(params.pairs)}
    z_bit = {h: 1 << (k + len(s_bit) + h - 1) for h in range(1, t + 1)}
    all_x = sum(x_bit.values())

    witness = [(s_bit[J] | x_bit[i], s_bit[J]) for J in params.pairs for i in J]
    feedback = [(all_x | s_bit[J], all_x) for J in params.pairs]
    amplification = [(z_bit[h] | s_bit[J], z_bit[h]) for h in range(1, t + 1) for J in params.pairs]
    raw = witness + feedback + amplification
    cnf = ClauseSet.model_construct(
        n=n, clauses=tuple(Cube.raw(n, fx, vl) for fx, vl in raw), view=View.FALSE
    )
    counts = {
        "witness": len(witness),
        "feedback": len(feedback),
        "amplification": len(amplification),
    }
    table = None
    if materialize:
        check_cap(n, max_n, "Horn gap family table")
        table = TotalFunction(n=n, table=cnf.table())
    logger.info(f"Horn gap family k={k} t={t}: n={n}, clauses {counts}")
    return HornGapFamily(
        params=params, names=horn_gap_names(params), cnf=cnf, counts=counts, table=table
    )


def horn_gap_cs(params: HornGapParams) -> int:
    """3 C(k,2) + t ceil(k/2)."""
    return 3 * math.comb(params.k, 2) + params.t * math.ceil(params.k / 2)


def horn_gap_ess_bound(params: HornGapParams) -> int:
    """3 C(k,2) + t."""
    return 3 * math.comb(params.k, 2) + params.t
