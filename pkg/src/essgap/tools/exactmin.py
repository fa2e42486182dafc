"""
Exact minimum set cover and exact cs(f) / ds(f).

Every covering problem is reduced to a matrix of rows (elements, or the
0-points of a function) and columns (subsets, or prime implicates), both
held as Python-int bitsets. The solver is a Petrick-style branch and bound:

* essential columns, row dominance and column dominance at the root,
* independent connected components solved separately,
* a greedy upper bound and a disjoint-rows lower bound at every node,
* branching on the row with the fewest live columns, lowest index first.

The disjoint-rows bound is an ess-style bound: rows whose column sets are
pairwise disjoint can never share a column.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator

from essgap.tools.bfcore import Cube, FunctionLike, as_partial, bits_of
from essgap.tools.implicants import (
    ClauseSet,
    RawCube,
    cube_rows,
    is_horn_clause,
    prime_implicate_raw,
)
from essgap.utils.config import View
from essgap.utils.errors import (
    FormatError,
    InfeasibleCoverError,
    NotHornError,
    SearchLimitExceeded,
)

logger = logging.getLogger(__name__)

DEFAULT_NODE_LIMIT = 2_000_000
EXHAUSTIVE_STATE_LIMIT = 2_000_000


class SetCoverInstance(BaseModel):
    """Ground set {1..m} and a family of subsets of it."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=0)
    subsets: Tuple[Tuple[int, ...], ...] = ()
    r: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _check_subsets(self) -> "SetCoverInstance":
        for j, s in enumerate(self.subsets):
            for e in s:
                if e < 1 or e > self.m:
                    raise ValueError(f"subset {j} holds element {e} outside 1..{self.m}")
            if len(set(s)) != len(s):
                raise ValueError(f"subset {j} repeats an element")
            if self.r is not None and len(s) != self.r:
                raise ValueError(f"subset {j} has size {len(s)}, instance is {self.r}-uniform")
        return self

    @property
    def p(self) -> int:
        return len(self.subsets)

    def column_masks(self) -> List[int]:
        """Subsets as row bitsets; element e is bit e-1."""
        return [sum(1 << (e - 1) for e in s) for s in self.subsets]

    def uncovered_elements(self) -> List[int]:
        covered = 0
        for mask in self.column_masks():
            covered |= mask
        return [e for e in range(1, self.m + 1) if not (covered >> (e - 1)) & 1]


class MinCoverResult(BaseModel):
    """A minimum cover; witness holds 0-based subset indices, ascending."""

    size: int
    witness: Tuple[int, ...]
    optimal: bool = True
    nodes: int = 0


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class CoverSolver:
    """
    Branch-and-bound minimum cover over bitset rows and columns.

    Args:
        nrows: Number of rows to cover.
        columns: For each column, the bitset of rows it covers.
        node_limit: Search nodes allowed before SearchLimitExceeded.
    """

    def __init__(self, nrows: int, columns: Sequence[int], node_limit: int = DEFAULT_NODE_LIMIT):
        self.nrows = nrows
        self.universe = (1 << nrows) - 1
        self.columns = [c & self.universe for c in columns]
        self.node_limit = node_limit
        self.nodes = 0
        self.row_cols = [0] * nrows
        for j, mask in enumerate(self.columns):
            for r in _iter_bits(mask):
                self.row_cols[r] |= 1 << j
        missing = [r for r in range(nrows) if not self.row_cols[r]]
        if missing:
            raise InfeasibleCoverError(
                f"{len(missing)} rows cannot be covered by any column (first: row {missing[0]})"
            )
        self._best: List[int] = []
        self._best_size = 0

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise SearchLimitExceeded(
                f"cover search exceeded {self.node_limit} nodes",
                hint="raise search_node_limit or shrink the instance",
            )

    def lower_bound(self, uncovered: int, alive: int) -> int:
        """Rows with pairwise disjoint live columns; len(rows)+1 if some row is dead."""
        rows = []
        for r in _iter_bits(uncovered):
            live = self.row_cols[r] & alive
            if not live:
                return self.nrows + 1
            rows.append((live.bit_count(), r, live))
        rows.sort()
        used = 0
        bound = 0
        for _, _, live in rows:
            if not live & used:
                bound += 1
                used |= live
        return bound

    def greedy(self, uncovered: int, alive: int) -> List[int]:
        """Largest-gain greedy cover, lowest index on ties, then redundancy removal."""
        chosen: List[int] = []
        remaining = uncovered
        while remaining:
            best_j, best_gain = -1, 0
            for j in _iter_bits(alive):
                gain = (self.columns[j] & remaining).bit_count()
                if gain > best_gain:
                    best_j, best_gain = j, gain
            if best_j < 0:
                raise InfeasibleCoverError("greedy cover stalled on an uncoverable row")
            chosen.append(best_j)
            remaining &= ~self.columns[best_j]
        for j in sorted(chosen, reverse=True):
            rest = 0
            for other in chosen:
                if other != j:
                    rest |= self.columns[other]
            if uncovered & ~rest == 0:
                chosen.remove(j)
        return sorted(chosen)

    def reduce(self, uncovered: int, alive: int) -> Tuple[List[int], int, int]:
        """
        Essential columns plus row and column dominance, to a fixed point.

        Returns:
            (forced columns, rows still uncovered, columns still alive)
        """
        forced: List[int] = []
        changed = True
        rounds = 0
        while changed and uncovered:
            changed = False
            rounds += 1
            for r in _iter_bits(uncovered):
                if not (uncovered >> r) & 1:
                    continue
                live = self.row_cols[r] & alive
                if not live:
                    raise InfeasibleCoverError(f"row {r} lost every column during reduction")
                if live & (live - 1) == 0:
                    forced.append(live.bit_length() - 1)
                    uncovered &= ~self.columns[forced[-1]]
                    alive &= ~live
                    changed = True
            for j in _iter_bits(alive):
                if not self.columns[j] & uncovered:
                    alive &= ~(1 << j)
            cols = [(j, self.columns[j] & uncovered) for j in _iter_bits(alive)]
            for j, mask in cols:
                for other, other_mask in cols:
                    if other == j or not (alive >> other) & 1:
                        continue
                    if mask & ~other_mask == 0 and (mask != other_mask or other < j):
                        alive &= ~(1 << j)
                        changed = True
                        break
            rows = [(r, self.row_cols[r] & alive) for r in _iter_bits(uncovered)]
            dropped = 0
            for r, live in rows:
                for other, other_live in rows:
                    if other == r or (dropped >> other) & 1:
                        continue
                    if other_live & ~live == 0 and (live != other_live or other < r):
                        dropped |= 1 << r
                        break
            if dropped:
                # covering the dominated row covers the dropped one too
                uncovered &= ~dropped
                changed = True
        logger.debug(
            f"Reduction: {len(forced)} essential columns, {uncovered.bit_count()} rows and "
            f"{alive.bit_count()} columns left after {rounds} rounds"
        )
        return forced, uncovered, alive

    def components(self, uncovered: int, alive: int) -> List[Tuple[int, int]]:
        """Split rows into groups that share no live column."""
        out = []
        remaining = uncovered
        while remaining:
            comp = remaining & -remaining
            cols = 0
            frontier = comp
            while frontier:
                new_cols = 0
                for r in _iter_bits(frontier):
                    new_cols |= self.row_cols[r] & alive
                new_cols &= ~cols
                cols |= new_cols
                reach = 0
                for j in _iter_bits(new_cols):
                    reach |= self.columns[j]
                frontier = reach & remaining & ~comp
                comp |= frontier
            out.append((comp, cols))
            remaining &= ~comp
        return out

    def _search(self, uncovered: int, alive: int, chosen: List[int]) -> None:
        self._tick()
        chosen = list(chosen)
        while True:
            if not uncovered:
                if len(chosen) < self._best_size:
                    self._best = sorted(chosen)
                    self._best_size = len(chosen)
                return
            branch_row, branch_count, forced = -1, None, 0
            for r in _iter_bits(uncovered):
                live = self.row_cols[r] & alive
                count = live.bit_count()
                if count == 0:
                    return
                if count == 1:
                    forced = live
                    break
                if branch_count is None or count < branch_count:
                    branch_row, branch_count = r, count
            if not forced:
                break
            j = forced.bit_length() - 1
            chosen.append(j)
            uncovered &= ~self.columns[j]
            alive &= ~forced
        if len(chosen) + self.lower_bound(uncovered, alive) >= self._best_size:
            return
        candidates = sorted(
            _iter_bits(self.row_cols[branch_row] & alive),
            key=lambda j: (-(self.columns[j] & uncovered).bit_count(), j),
        )
        tried = 0
        for j in candidates:
            self._search(uncovered & ~self.columns[j], alive & ~tried & ~(1 << j), chosen + [j])
            tried |= 1 << j
            if len(chosen) + 1 >= self._best_size:
                return

    def solve_component(self, uncovered: int, alive: int) -> List[int]:
        self._best = self.greedy(uncovered, alive)
        self._best_size = len(self._best)
        if self.lower_bound(uncovered, alive) < self._best_size:
            self._search(uncovered, alive, [])
        return self._best

    def solve(self) -> List[int]:
        """Minimum cover as ascending column indices."""
        alive = (1 << len(self.columns)) - 1
        forced, uncovered, alive = self.reduce(self.universe, alive)
        chosen = list(forced)
        parts = self.components(uncovered, alive)
        logger.debug(f"{len(parts)} independent components after reduction")
        for rows, cols in parts:
            chosen.extend(self.solve_component(rows, cols))
        logger.debug(f"Cover of size {len(chosen)} found after {self.nodes} nodes")
        return sorted(chosen)

    def lex_least(self, size: int) -> List[int]:
        """Lexicographically least cover with exactly `size` columns, or [] if none."""
        ncols = len(self.columns)

        def walk(start: int, uncovered: int, budget: int, prefix: List[int]) -> Optional[List[int]]:
            self._tick()
            if not uncovered:
                return prefix
            if budget == 0:
                return None
            suffix = ((1 << ncols) - 1) & ~((1 << start) - 1)
            if self.lower_bound(uncovered, suffix) > budget:
                return None
            for j in range(start, ncols):
                if not self.columns[j] & uncovered:
                    continue
                found = walk(j + 1, uncovered & ~self.columns[j], budget - 1, prefix + [j])
                if found is not None:
                    return found
            return None

        return walk(0, self.universe, size, []) or []


def solve_cover(
    nrows: int, columns: Sequence[int], node_limit: int = DEFAULT_NODE_LIMIT
) -> Tuple[List[int], int]:
    """Exact minimum cover of rows 0..nrows-1; returns (columns, search nodes)."""
    if nrows == 0:
        return [], 0
    solver = CoverSolver(nrows, columns, node_limit)
    chosen = solver.solve()
    return chosen, solver.nodes


def exhaustive_min_cover(
    nrows: int, columns: Sequence[int], state_limit: int = EXHAUSTIVE_STATE_LIMIT
) -> int:
    """
    Minimum cover size by breadth-first search over covered-row masks.

    Each level extends every mask only by the columns covering its lowest
    uncovered row, which every completion must use anyway. Shares no code
    with CoverSolver; used as a certification oracle.

    Raises:
        SearchLimitExceeded: If a level holds more than state_limit masks.
    """
    universe = (1 << nrows) - 1
    if universe == 0:
        return 0
    cols = sorted({c & universe for c in columns if c & universe})
    covering: List[List[int]] = [[c for c in cols if (c >> r) & 1] for r in range(nrows)]
    if not all(covering):
        raise InfeasibleCoverError("some row is not covered by any column")
    level = {0}
    depth = 0
    while True:
        depth += 1
        nxt = set()
        for mask in level:
            free = universe & ~mask
            row = (free & -free).bit_length() - 1
            for c in covering[row]:
                grown = mask | c
                if grown == universe:
                    return depth
                nxt.add(grown)
        if len(nxt) > state_limit:
            raise SearchLimitExceeded(f"exhaustive cover passed {state_limit} states at depth {depth}")
        level = nxt


def min_set_cover(
    inst: SetCoverInstance, node_limit: int = DEFAULT_NODE_LIMIT
) -> MinCoverResult:
    """
    Exact minimum set cover.

    The size comes from branch and bound; the witness is then recomputed as
    the lexicographically least minimum cover by subset index.

    Raises:
        InfeasibleCoverError: If some element lies in no subset.
    """
    missing = inst.uncovered_elements()
    if missing:
        raise InfeasibleCoverError(
            f"elements {missing} are in no subset", hint="every element needs a covering subset"
        )
    if inst.m == 0:
        return MinCoverResult(size=0, witness=())
    solver = CoverSolver(inst.m, inst.column_masks(), node_limit)
    size = len(solver.solve())
    witness = solver.lex_least(size)
    logger.debug(f"Set cover m={inst.m} p={inst.p}: size {size}, witness {witness}")
    return MinCoverResult(size=size, witness=tuple(witness), optimal=True, nodes=solver.nodes)


def cover_matrix(
    f: FunctionLike, horn_only: bool = False
) -> Tuple[List[int], List[RawCube], List[int]]:
    """
    Rows (0-points), columns (prime implicates) and column bitsets for f.

    With horn_only only prime implicates with at most one positive literal
    are kept.
    """
    p = as_partial(f)
    rows = bits_of(p.zeros, p.n)
    primes = prime_implicate_raw(p)
    if horn_only:
        primes = [c for c in primes if is_horn_clause(Cube.raw(p.n, c[0], c[1]))]
    row_of: Dict[int, int] = {z: i for i, z in enumerate(rows)}
    masks = []
    for fixed, values in primes:
        mask = 0
        for r in cube_rows(fixed, values, p.n, row_of):
            mask |= 1 << r
        masks.append(mask)
    return rows, primes, masks


def min_cnf(f: FunctionLike, node_limit: int = DEFAULT_NODE_LIMIT) -> Tuple[int, ClauseSet]:
    """
    Exact cs(f) with a minimum consistent CNF.

    The CNF covers every 0-point with prime implicates; *-points may or may
    not be covered. Constant 1 gives the empty CNF and constant 0 the empty
    clause.
    """
    p = as_partial(f)
    rows, primes, masks = cover_matrix(p)
    chosen, nodes = solve_cover(len(rows), masks, node_limit)
    formula = ClauseSet.from_raw(p.n, [primes[j] for j in chosen], View.FALSE)
    logger.debug(f"cs = {len(formula)} over {len(rows)} 0-points, {len(primes)} primes, {nodes} nodes")
    return len(formula), formula


def min_dnf(f: FunctionLike, node_limit: int = DEFAULT_NODE_LIMIT) -> Tuple[int, ClauseSet]:
    """Exact ds(f) with a minimum consistent DNF, by duality with min_cnf."""
    p = as_partial(f)
    size, formula = min_cnf(p.dual(), node_limit)
    return size, ClauseSet.model_construct(n=formula.n, clauses=formula.clauses, view=View.TRUE)


def cs(f: FunctionLike, node_limit: int = DEFAULT_NODE_LIMIT) -> int:
    return min_cnf(f, node_limit)[0]


def ds(f: FunctionLike, node_limit: int = DEFAULT_NODE_LIMIT) -> int:
    return min_dnf(f, node_limit)[0]


def min_horn_cnf(f: FunctionLike, node_limit: int = DEFAULT_NODE_LIMIT) -> Tuple[int, ClauseSet]:
    """
    Smallest consistent CNF built from Horn prime implicates only.

    Raises:
        NotHornError: If some 0-point is covered by no Horn prime implicate.
    """
    p = as_partial(f)
    rows, primes, masks = cover_matrix(p, horn_only=True)
    try:
        chosen, _ = solve_cover(len(rows), masks, node_limit)
    except InfeasibleCoverError as e:
        raise NotHornError(
            "function has no Horn CNF", hint="its truepoints are not closed under AND"
        ) from e
    formula = ClauseSet.from_raw(p.n, [primes[j] for j in chosen], View.FALSE)
    return len(formula), formula


def certify_min_cnf(f: FunctionLike, size: int) -> bool:
    """An independent breadth-first search confirms no CNF of size-1 exists."""
    rows, _, masks = cover_matrix(f)
    return exhaustive_min_cover(len(rows), masks) == size


def max_independent_elements(inst: SetCoverInstance) -> List[int]:
    """
    A largest set of elements no two of which share a subset.

    Solved as a maximum clique in the graph joining elements that never
    occur together.
    """
    if inst.m == 0:
        return []
    graph = nx.Graph()
    graph.add_nodes_from(range(1, inst.m + 1))
    together = set()
    for s in inst.subsets:
        for a in s:
            for b in s:
                if a < b:
                    together.add((a, b))
    for a in range(1, inst.m + 1):
        for b in range(a + 1, inst.m + 1):
            if (a, b) not in together:
                graph.add_edge(a, b)
    clique, _ = nx.max_weight_clique(graph, weight=None)
    return sorted(clique)


def write_set_cover(inst: SetCoverInstance, path: Optional[Union[str, Path]] = None) -> str:
    lines = [f"{inst.m} {inst.p}"]
    lines.extend(" ".join(str(e) for e in s) for s in inst.subsets)
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def read_set_cover(source: Union[str, Path], text: Optional[str] = None) -> SetCoverInstance:
    """
    Parse the set-cover text format: a `m p` header then p subset lines.

    The instance is tagged r-uniform when every subset has the same size.
    """
    if text is None:
        try:
            with open(source, "r") as fh:
                text = fh.read()
        except OSError as e:
            raise FormatError(f"Could not open file '{source}': {e}") from e
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise FormatError("Empty set-cover file")
    try:
        m, p = (int(x) for x in lines[0].split())
    except ValueError as e:
        raise FormatError("Line 1. Header should be 'm p'") from e
    subsets = []
    for line_number, line in enumerate(lines[1:], start=2):
        try:
            subsets.append(tuple(int(x) for x in line.split()))
        except ValueError as e:
            raise FormatError(f"Line {line_number}. Non-integer element") from e
    if len(subsets) != p:
        raise FormatError(f"Got {len(subsets)} subsets. Expected {p}")
    sizes = {len(s) for s in subsets}
    r = len(subsets[0]) if len(sizes) == 1 and subsets[0] else None
    try:
        return SetCoverInstance(m=m, subsets=tuple(subsets), r=r)
    except ValueError as e:
        raise FormatError(f"Invalid set-cover instance: {e}") from e
