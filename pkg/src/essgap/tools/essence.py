"""
Independent point sets and exact ess(f), ess^d(f), ess_k(f).

Two points of the measured polarity are independent when their spanning
subcube holds a point of the opposite polarity; a set is k-independent when
that holds for the spanning subcube of every k of them. *-points of a
partial function are never witnesses.

For a fixed anchor x, the spanning subcube of a set T containing x is
{a : (a ^ x) is a submask of D} with D the OR of (p ^ x) over p in T. A
subset zeta transform of the witness table translated by x answers "does
that cube hold a witness" for every D at once; these reach tables are the
workhorse of every search in this module.

A k-subset is coverable exactly when some prime implicate (prime implicant
in the true view) holds all of it, so ess_k is the largest point set with
at most k-1 points inside each prime. That packing model is solved with
CP-SAT.
"""

import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from ortools.sat.python import cp_model
from pydantic import BaseModel, Field

from essgap.tools.bfcore import (
    Assignment,
    FunctionLike,
    as_partial,
    mask_of,
    spanning_subcube,
    table_to_array,
)
from essgap.tools.implicants import cube_rows, prime_implicate_raw
from essgap.utils.config import View
from essgap.utils.errors import EssGapError, PolarityError, SearchLimitExceeded

logger = logging.getLogger(__name__)

DEFAULT_NODE_LIMIT = 2_000_000
DEFAULT_POINT_LIMIT = 2000
# above this many k-subsets a certificate stores no per-subset witnesses
WITNESS_TABLE_LIMIT = 50_000


def fold_submasks(table: np.ndarray, n: int, op: np.ufunc) -> np.ndarray:
    """In place: table[D] becomes op over table[d] for every submask d of D."""
    for i in range(n):
        block = table.reshape(-1, 2, 1 << i)
        op(block[:, 1, :], block[:, 0, :], out=block[:, 1, :])
    return table


class IndependenceCertificate(BaseModel):
    """
    A k-independent point set with one opposite-polarity witness per k-subset.

    witnesses maps the comma-joined ascending indices of each k-subset to the
    least witness assignment inside its spanning subcube. When the set has
    more than WITNESS_TABLE_LIMIT k-subsets the map is left empty and
    witnesses_omitted is set; validation then scans every subcube instead.
    """

    n: int
    k: int = Field(2, ge=2)
    view: View = View.FALSE
    points: Tuple[int, ...] = ()
    witnesses: Dict[str, int] = Field(default_factory=dict)
    witnesses_omitted: bool = False


class EssResult(BaseModel):
    """Exact ess / ess_k value with its certificate."""

    value: int
    view: View = View.FALSE
    k: int = 2
    certificate: IndependenceCertificate
    nodes: int = 0


def subset_key(points: Sequence[int]) -> str:
    return ",".join(str(p) for p in sorted(points))


class IndependenceOracle:
    """
    Cached independence tests over the points of one function and view.

    Args:
        f: The function.
        view: FALSE measures 0-points against 1-point witnesses, TRUE the reverse.
    """

    def __init__(self, f: FunctionLike, view: View = View.FALSE):
        p = as_partial(f)
        self.f = p
        self.n = p.n
        self.view = view
        self.points = p.points(view)
        self.point_mask = p.point_mask(view)
        self.witness = table_to_array(p.witness_mask(view), p.n)
        self._index = np.arange(1 << p.n, dtype=np.int64)
        self._reach: Dict[int, np.ndarray] = {}

    def reach(self, anchor: int) -> np.ndarray:
        """reach[D] is True when some witness w has (w ^ anchor) inside D."""
        table = self._reach.get(anchor)
        if table is None:
            table = fold_submasks(self.witness[self._index ^ anchor], self.n, np.logical_or)
            self._reach[anchor] = table
        return table

    def least_witness(self, anchor: int) -> np.ndarray:
        """least[D] is the smallest witness w with (w ^ anchor) inside D, or -1."""
        moved = self._index ^ anchor
        none = np.int64(1 << self.n)
        table = np.where(self.witness[moved], moved, none)
        fold_submasks(table, self.n, np.minimum)
        return np.where(table == none, -1, table)

    def independent(self, x: int, y: int) -> bool:
        return x != y and bool(self.reach(x)[x ^ y])

    def adjacency(self) -> List[int]:
        """Independence graph over point positions, as bitsets."""
        pts = np.asarray(self.points, dtype=np.int64)
        adj = []
        for i, x in enumerate(self.points):
            row = self.reach(x)[pts ^ x].copy()
            row[i] = False
            packed = np.packbits(row.astype(np.uint8), bitorder="little")
            adj.append(int.from_bytes(packed.tobytes(), "little"))
            # pairwise tables are only needed once each
            self._reach.pop(x, None)
        return adj


def _check_polarity(p, view: View, points: Sequence[int]) -> None:
    mask = p.point_mask(view)
    for a in points:
        if not (mask >> a) & 1:
            kind = "0-point" if view is View.FALSE else "1-point"
            raise PolarityError(f"assignment {a} is not a {kind} of the function")


def are_independent(
    x: Union[Assignment, int], y: Union[Assignment, int], f: FunctionLike, view: View = View.FALSE
) -> bool:
    """
    Whether x and y are independent: some opposite-polarity point separates them.

    Raises:
        PolarityError: If x or y is not a point of the measured polarity.
    """
    p = as_partial(f)
    xi = x.index if isinstance(x, Assignment) else x
    yi = y.index if isinstance(y, Assignment) else y
    _check_polarity(p, view, [xi, yi])
    if xi == yi:
        return False
    cube = spanning_subcube([xi, yi], p.n)
    witness = table_to_array(p.witness_mask(view), p.n)
    return bool(witness[cube.member_array()].any())


def compatibility_graph(f: FunctionLike, view: View = View.FALSE) -> nx.Graph:
    """Points as nodes (assignment indices), independent pairs as edges."""
    oracle = IndependenceOracle(f, view)
    graph = nx.Graph()
    graph.add_nodes_from(oracle.points)
    for i, row in enumerate(oracle.adjacency()):
        for j in _iter_bits(row):
            if i < j:
                graph.add_edge(oracle.points[i], oracle.points[j])
    return graph


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _CliqueSearch:
    """Maximum clique with greedy-coloring bounds over bitset adjacency."""

    def __init__(self, adjacency: Sequence[int], node_limit: int):
        size = len(adjacency)
        degree = [row.bit_count() for row in adjacency]
        self.order = sorted(range(size), key=lambda v: (-degree[v], v))
        position = {v: i for i, v in enumerate(self.order)}
        self.adj = [0] * size
        for v, row in enumerate(adjacency):
            relabelled = 0
            for u in _iter_bits(row):
                relabelled |= 1 << position[u]
            self.adj[position[v]] = relabelled
        self.node_limit = node_limit
        self.nodes = 0
        self.best: List[int] = []

    def _color(self, candidates: int) -> List[Tuple[int, int]]:
        out = []
        color = 0
        uncolored = candidates
        while uncolored:
            color += 1
            q = uncolored
            while q:
                bit = q & -q
                v = bit.bit_length() - 1
                out.append((v, color))
                uncolored &= ~bit
                q &= ~bit & ~self.adj[v]
        return out

    def _expand(self, current: List[int], candidates: int) -> None:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise SearchLimitExceeded(
                f"clique search exceeded {self.node_limit} nodes",
                hint="raise search_node_limit or shrink the function",
            )
        for v, color in reversed(self._color(candidates)):
            if len(current) + color <= len(self.best):
                return
            rest = candidates & self.adj[v]
            if rest:
                self._expand(current + [v], rest)
            elif len(current) + 1 > len(self.best):
                self.best = current + [v]
            candidates &= ~(1 << v)

    def run(self, upper: Optional[int] = None) -> List[int]:
        full = (1 << len(self.adj)) - 1
        # greedy start along the degree order
        greedy: List[int] = []
        pool = full
        while pool:
            v = (pool & -pool).bit_length() - 1
            greedy.append(v)
            pool &= self.adj[v]
        self.best = greedy
        if upper is None or len(self.best) < upper:
            if full:
                self._expand([], full)
        return sorted(self.order[v] for v in self.best)


def max_clique(adjacency: Sequence[int], node_limit: int = DEFAULT_NODE_LIMIT) -> List[int]:
    """Exact maximum clique of a bitset graph; returns ascending vertex numbers."""
    return _CliqueSearch(adjacency, node_limit).run()


def build_certificate(
    oracle: IndependenceOracle,
    chosen: Sequence[int],
    k: int,
    witness_limit: int = WITNESS_TABLE_LIMIT,
) -> IndependenceCertificate:
    """Certificate for chosen, with the least witness of every k-subset when they fit."""
    points = sorted(chosen)
    omitted = math.comb(len(points), k) > witness_limit
    witnesses: Dict[str, int] = {}
    if not omitted:
        for i, anchor in enumerate(points[: len(points) - k + 1]):
            rest = np.array(list(combinations(points[i + 1 :], k - 1)), dtype=np.int64)
            rest = rest.reshape(-1, k - 1)
            spreads = np.bitwise_or.reduce(rest ^ anchor, axis=1)
            least = oracle.least_witness(anchor)[spreads]
            if (least < 0).any():
                raise EssGapError(
                    f"points with anchor {anchor} share a covering implicate; search is unsound"
                )
            for tail, w in zip(rest.tolist(), least.tolist()):
                witnesses[subset_key([anchor] + tail)] = w
    return IndependenceCertificate(
        n=oracle.n,
        k=k,
        view=oracle.view,
        points=tuple(points),
        witnesses=witnesses,
        witnesses_omitted=omitted,
    )


def _inside(subset: Sequence[int], w: int) -> bool:
    anchor = subset[0]
    spread = 0
    for p in subset[1:]:
        spread |= p ^ anchor
    return (w ^ anchor) & ~spread == 0


def no_covered_subset(f: FunctionLike, points: Sequence[int], k: int, view: View) -> bool:
    """
    Whether every witness-free subcube holds fewer than k of the points.

    For each point as anchor, a subset-sum over the translated point table
    counts the points inside every subcube through the anchor.
    """
    p = as_partial(f)
    n = p.n
    idx = np.arange(1 << n, dtype=np.int64)
    witness = table_to_array(p.witness_mask(view), n)
    member = np.zeros(1 << n, dtype=bool)
    member[list(points)] = True
    for anchor in points:
        moved = idx ^ anchor
        reach = fold_submasks(witness[moved], n, np.logical_or)
        count = fold_submasks(member[moved].astype(np.int32), n, np.add)
        if np.any(~reach & (count >= k)):
            return False
    return True


def validate_certificate(f: FunctionLike, cert: IndependenceCertificate) -> bool:
    """
    Re-check a certificate with fresh subcube scans.

    Every point must have the measured polarity and every listed witness must
    have the opposite polarity and sit inside its subset's spanning subcube.
    A full witness table must name every k-subset; without one every
    subcube is scanned for k uncovered points.
    """
    p = as_partial(f)
    if p.n != cert.n or len(set(cert.points)) != len(cert.points):
        return False
    point_mask = p.point_mask(cert.view)
    witness_mask = p.witness_mask(cert.view)
    if any(not (point_mask >> a) & 1 for a in cert.points):
        return False
    members = set(cert.points)
    for key, w in cert.witnesses.items():
        subset = [int(v) for v in key.split(",")]
        if len(set(subset)) != cert.k or not members.issuperset(subset):
            return False
        if not (witness_mask >> w) & 1 or not _inside(subset, w):
            return False
    if cert.witnesses_omitted:
        return no_covered_subset(p, cert.points, cert.k, cert.view)
    return all(
        subset_key(subset) in cert.witnesses
        for subset in combinations(sorted(cert.points), cert.k)
    )


def ess(
    f: FunctionLike, view: View = View.FALSE, node_limit: int = DEFAULT_NODE_LIMIT
) -> EssResult:
    """
    Exact ess(f) (false view) or ess^d(f) (true view).

    Maximum clique of the independence graph, bounded by greedy colorings
    with vertices taken by degree then index. The certificate is validated
    before it is returned.
    """
    oracle = IndependenceOracle(f, view)
    adjacency = oracle.adjacency()
    graph = nx.Graph()
    graph.add_nodes_from(range(len(adjacency)))
    graph.add_edges_from((i, j) for i, row in enumerate(adjacency) for j in _iter_bits(row) if i < j)
    coloring = nx.coloring.greedy_color(graph, strategy="largest_first")
    upper = max(coloring.values()) + 1 if coloring else 0
    search = _CliqueSearch(adjacency, node_limit)
    chosen = [oracle.points[i] for i in search.run(upper)]
    cert = build_certificate(oracle, chosen, 2)
    if not validate_certificate(oracle.f, cert):
        raise EssGapError("ess certificate failed validation")
    logger.debug(
        f"ess({view.value}) = {len(chosen)} over {len(oracle.points)} points, "
        f"coloring bound {upper}, {search.nodes} nodes"
    )
    return EssResult(value=len(chosen), view=view, k=2, certificate=cert, nodes=search.nodes)


class _HypergraphSearch:
    """
    Largest k-independent subset of a point list, by extension search.

    Candidates stay compatible with the current set: a candidate c may join
    once every k-subset formed with c is non-coverable. A candidate set is
    bounded by splitting it greedily into jointly coverable groups, from each
    of which at most k-1 points can be kept. Used where primes are out of
    reach, as on the blocks of a wide lifted function.
    """

    def __init__(self, oracle: IndependenceOracle, points: Sequence[int], k: int, node_limit: int):
        self.oracle = oracle
        self.points = list(points)
        self.k = k
        self.node_limit = node_limit
        self.nodes = 0
        self.best: List[int] = []

    def group_bound(self, candidates: Sequence[int]) -> int:
        groups: List[List[int]] = []  # [anchor, spread, size]
        for c in candidates:
            for g in groups:
                spread = g[1] | (c ^ g[0])
                if not self.oracle.reach(g[0])[spread]:
                    g[1] = spread
                    g[2] += 1
                    break
            else:
                groups.append([c, 0, 1])
        return sum(min(g[2], self.k - 1) for g in groups)

    def _narrow(self, v: int, current: Sequence[int], candidates: Sequence[int]) -> List[int]:
        """Candidates that stay compatible once v joins current."""
        if not candidates:
            return []
        if self.k == 2:
            spreads = [0]
        else:
            spreads = []
            for rest in combinations(current, self.k - 2):
                spread = 0
                for r in rest:
                    spread |= r ^ v
                spreads.append(spread)
            if not spreads:
                return list(candidates)
        cand = np.asarray(candidates, dtype=np.int64)
        table = (cand ^ v)[:, None] | np.asarray(spreads, dtype=np.int64)[None, :]
        keep = self.oracle.reach(v)[table].all(axis=1)
        return cand[keep].tolist()

    def _expand(self, current: List[int], candidates: List[int]) -> None:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise SearchLimitExceeded(
                f"ess_k search exceeded {self.node_limit} nodes",
                hint="raise search_node_limit or use block_upper_bound",
            )
        if len(current) > len(self.best):
            self.best = list(current)
        if not candidates:
            return
        # a bound on the whole pool also bounds every suffix of it
        bound = self.group_bound(candidates)
        while candidates:
            if len(current) + min(len(candidates), bound) <= len(self.best):
                return
            v, candidates = candidates[0], candidates[1:]
            self._expand(current + [v], self._narrow(v, current, candidates))

    def run(self) -> List[int]:
        self._expand([], self.points)
        return sorted(self.best)


def _check_k(k: int) -> None:
    if k < 2:
        raise EssGapError(f"k must be at least 2, got {k}")


def prime_capacity_masks(f: FunctionLike, k: int, view: View = View.FALSE) -> List[int]:
    """
    The primes holding at least k points, as bitsets over point positions.

    Positions follow f's points in the given view. Primes with fewer points
    never cover a k-subset and are dropped, as are repeats.
    """
    p = as_partial(f)
    source = p if view is View.FALSE else p.dual()
    row_of = {a: i for i, a in enumerate(p.points(view))}
    masks = set()
    for fixed, values in prime_implicate_raw(source):
        rows = cube_rows(fixed, values, p.n, row_of)
        if len(rows) >= k:
            masks.add(mask_of(rows))
    return sorted(masks)


class _CapacityModel:
    """Most points with at most k-1 inside each mask, solved exactly with CP-SAT."""

    def __init__(self, size: int, masks: Sequence[int], k: int, conflict_limit: int):
        self.size = size
        self.masks = list(masks)
        self.k = k
        self.conflict_limit = conflict_limit
        self.conflicts = 0

    def solve(self) -> List[int]:
        constrained = 0
        for mask in self.masks:
            constrained |= mask
        free = [i for i in range(self.size) if not (constrained >> i) & 1]
        if not self.masks:
            return free

        model = cp_model.CpModel()
        chosen = {i: model.NewBoolVar(f"p{i}") for i in _iter_bits(constrained)}
        for mask in self.masks:
            model.Add(sum(chosen[i] for i in _iter_bits(mask)) <= self.k - 1)
        model.Maximize(sum(chosen.values()))

        solver = cp_model.CpSolver()
        solver.parameters.num_workers = 1
        solver.parameters.random_seed = 0
        solver.parameters.max_number_of_conflicts = self.conflict_limit
        status = solver.Solve(model)
        self.conflicts = int(solver.NumConflicts())
        if status != cp_model.OPTIMAL:
            raise SearchLimitExceeded(
                f"ess_k model not solved to optimality within {self.conflict_limit} conflicts "
                f"(status {solver.StatusName(status)})",
                hint="raise search_node_limit or use block_upper_bound",
            )
        picked = [i for i, var in chosen.items() if solver.Value(var)]
        return sorted(free + picked)


def ess_k(
    f: FunctionLike,
    k: int,
    view: View = View.FALSE,
    node_limit: int = DEFAULT_NODE_LIMIT,
    point_limit: int = DEFAULT_POINT_LIMIT,
) -> EssResult:
    """
    Exact ess_k(f): the largest point set no k of which share a covering implicate.

    Solves the prime capacity model, independently of the clique search
    behind ess, so ess_k(f, 2) is a recomputation of ess(f). node_limit
    caps the solver's conflicts.

    Raises:
        SearchLimitExceeded: If the point set is larger than point_limit or the
            solver gives up before proving optimality.
    """
    _check_k(k)
    oracle = IndependenceOracle(f, view)
    if len(oracle.points) > point_limit:
        raise SearchLimitExceeded(
            f"ess_k over {len(oracle.points)} points exceeds the limit of {point_limit}",
            hint="use block_upper_bound for a certified upper bound",
        )
    masks = prime_capacity_masks(oracle.f, k, view)
    model = _CapacityModel(len(oracle.points), masks, k, node_limit)
    chosen = [oracle.points[i] for i in model.solve()]
    cert = build_certificate(oracle, chosen, k)
    if not validate_certificate(oracle.f, cert):
        raise EssGapError("ess_k certificate failed validation")
    logger.debug(
        f"ess_{k}({view.value}) = {len(chosen)} over {len(oracle.points)} points, "
        f"{len(masks)} prime constraints, {model.conflicts} conflicts"
    )
    return EssResult(value=len(chosen), view=view, k=k, certificate=cert, nodes=model.conflicts)


def cnf_lower_bound(f: FunctionLike, k: int, view: View = View.FALSE) -> Fraction:
    """ess_k(f)/(k-1), a lower bound on cs(f) (on ds(f) for the true view)."""
    _check_k(k)
    return Fraction(ess_k(f, k, view).value, k - 1)


def implicate_groups_bound(f: FunctionLike, k: int, view: View = View.FALSE) -> int:
    """
    Upper bound on ess_k from a greedy split into jointly coverable groups.

    Any k points of one group lie in a witness-free subcube, so a
    k-independent set keeps at most k-1 of each group.
    """
    _check_k(k)
    oracle = IndependenceOracle(f, view)
    return _HypergraphSearch(oracle, oracle.points, k, 1).group_bound(oracle.points)


def block_upper_bound(
    f: FunctionLike,
    k: int,
    view: View = View.FALSE,
    key: Optional[Callable[[int], Hashable]] = None,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> Dict[str, int]:
    """
    Certified upper bound on ess_k: the sum of exact ess_k over point blocks.

    A k-independent set stays k-independent inside each block, so the sum of
    per-block maxima bounds the whole. Witnesses are taken from all of f.

    Returns:
        Dictionary with the total under "bound" and each block's maximum.
    """
    _check_k(k)
    oracle = IndependenceOracle(f, view)
    blocks: Dict[Hashable, List[int]] = {}
    for a in oracle.points:
        blocks.setdefault(key(a) if key else 0, []).append(a)
    out: Dict[str, int] = {}
    total = 0
    for label in sorted(blocks, key=str):
        search = _HypergraphSearch(oracle, blocks[label], k, node_limit)
        value = len(search.run())
        out[str(label)] = value
        total += value
        logger.debug(f"block {label}: {len(blocks[label])} points, ess_{k} = {value}")
    out["bound"] = total
    return out
