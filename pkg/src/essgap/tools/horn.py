"""
Horn functions, meta-clause bases and the AFP learner.

A meta-clause A -> B stands for the Horn clauses (not A or b) for every b in
B; A -> F (bottom) stands for the single negative clause (not A). Variable
sets are held as masks with x_i at bit i-1.
"""

import logging
from pathlib import Path
from typing import FrozenSet, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from essgap.tools.bfcore import Assignment, TotalFunction, array_to_table, check_cap, mask_of
from essgap.tools.essence import are_independent
from essgap.tools.exactmin import solve_cover
from essgap.tools.implicants import ClauseSet
from essgap.utils.config import View
from essgap.utils.errors import FormatError, NotHornError, SearchLimitExceeded

logger = logging.getLogger(__name__)

MI_BRUTEFORCE_MAX_N = 5
BOTTOM_TOKEN = "F"


def _vars_of(mask: int) -> FrozenSet[int]:
    return frozenset(i + 1 for i in range(mask.bit_length()) if (mask >> i) & 1)


class MetaClause(BaseModel):
    """Antecedent -> consequent over 1-based variable indices; bottom marks A -> F."""

    model_config = ConfigDict(frozen=True)

    antecedent: FrozenSet[int] = frozenset()
    consequent: FrozenSet[int] = frozenset()
    bottom: bool = False

    @model_validator(mode="after")
    def _check_sides(self) -> "MetaClause":
        if self.antecedent & self.consequent:
            raise ValueError("antecedent and consequent must be disjoint")
        if self.bottom and self.consequent:
            raise ValueError("a bottom meta-clause has no consequent variables")
        if not self.bottom and not self.consequent:
            raise ValueError("a definite meta-clause needs a consequent")
        if any(v < 1 for v in self.antecedent | self.consequent):
            raise ValueError("variables are 1-based")
        return self

    @classmethod
    def from_masks(cls, antecedent: int, consequent: Optional[int]) -> "MetaClause":
        """consequent None means bottom."""
        if consequent is None:
            return cls(antecedent=_vars_of(antecedent), bottom=True)
        return cls(antecedent=_vars_of(antecedent), consequent=_vars_of(consequent))

    @property
    def antecedent_mask(self) -> int:
        return mask_of(v - 1 for v in self.antecedent)

    @property
    def consequent_mask(self) -> int:
        return mask_of(v - 1 for v in self.consequent)

    def holds(self, index: int) -> bool:
        a = self.antecedent_mask
        if index & a != a:
            return True
        if self.bottom:
            return False
        c = self.consequent_mask
        return index & c == c

    def to_str(self) -> str:
        left = " ".join(str(v) for v in sorted(self.antecedent))
        right = BOTTOM_TOKEN if self.bottom else " ".join(str(v) for v in sorted(self.consequent))
        return f"{left} -> {right}".strip()


class HornBasis(BaseModel):
    """
    An ordered meta-clause basis with the examples the learner kept.

    negatives[i] is the negative example meta_clauses[i] was built from.
    """

    n: int = Field(..., ge=1)
    meta_clauses: List[MetaClause] = Field(default_factory=list)
    negatives: List[int] = Field(default_factory=list)
    positives: List[int] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.meta_clauses)

    def evaluate(self, index: int) -> int:
        return int(all(mc.holds(index) for mc in self.meta_clauses))

    def table(self) -> int:
        idx = np.arange(1 << self.n, dtype=np.int64)
        sat = np.ones(idx.shape, dtype=bool)
        for mc in self.meta_clauses:
            a = mc.antecedent_mask
            fired = (idx & a) == a
            if mc.bottom:
                sat &= ~fired
            else:
                c = mc.consequent_mask
                sat &= ~fired | ((idx & c) == c)
        return array_to_table(sat)

    def to_function(self) -> TotalFunction:
        return TotalFunction(n=self.n, table=self.table())


def meet_closure_array(f: TotalFunction) -> np.ndarray:
    """
    For every x, the AND of all truepoints above x, or -1 when there are none.

    For a Horn function this is the least truepoint above x.
    """
    n = f.n
    idx = np.arange(1 << n, dtype=np.int64)
    meet = np.where(f.to_array(), idx, np.int64(-1))
    for i in range(n):
        block = meet.reshape(-1, 2, 1 << i)
        block[:, 0, :] &= block[:, 1, :]
    return meet


def is_horn(f: TotalFunction) -> bool:
    """
    Whether the truepoints are closed under componentwise AND.

    Equivalently, no falsepoint is the AND of the truepoints above it.
    """
    meet = meet_closure_array(f)
    idx = np.arange(1 << f.n, dtype=np.int64)
    false = ~f.to_array()
    return not bool(np.any(false & (meet == idx)))


def is_definite_horn(f: TotalFunction) -> bool:
    """Horn with the all-ones point a truepoint."""
    return is_horn(f) and bool(f.value((1 << f.n) - 1))


def horn_closure(
    basis: Union[HornBasis, Sequence[MetaClause]], a: Union[Assignment, int]
) -> Union[Assignment, int]:
    """
    Forward chaining: the least point above a satisfying every definite meta-clause.

    Bottom meta-clauses are ignored. Returns the same kind as a.
    """
    clauses = basis.meta_clauses if isinstance(basis, HornBasis) else list(basis)
    rules = [(mc.antecedent_mask, mc.consequent_mask) for mc in clauses if not mc.bottom]
    point = a.index if isinstance(a, Assignment) else a
    changed = True
    while changed:
        changed = False
        for ante, cons in rules:
            if point & ante == ante and point & cons != cons:
                point |= cons
                changed = True
    if isinstance(a, Assignment):
        return Assignment(n=a.n, index=point)
    return point


def _hypothesis(n: int, negatives: List[int], positives: List[int]) -> List[MetaClause]:
    full = (1 << n) - 1
    out = []
    for s in negatives:
        meet = full
        for p in positives:
            if p & s == s:
                meet &= p
        out.append(MetaClause.from_masks(s, meet & ~s))
    return out


def afp_learn(target: TotalFunction, max_queries: Optional[int] = None) -> HornBasis:
    """
    Learn a definite Horn target with simulated membership and equivalence queries.

    The membership oracle is a table lookup; the equivalence oracle compares
    full tables and returns the least misclassified assignment. A negative
    counterexample x refines the first kept negative s with s AND x strictly
    below s and negative; otherwise it is appended.

    Raises:
        NotHornError: If the target is not definite Horn.
    """
    if not is_horn(target):
        raise NotHornError("target is not Horn", hint="its truepoints are not closed under AND")
    if not target.value((1 << target.n) - 1):
        raise NotHornError(
            "target is Horn but not definite", hint="use mi_bruteforce for general Horn targets"
        )
    n = target.n
    max_queries = max_queries or 4 * (1 << n) + 16
    negatives: List[int] = []
    positives: List[int] = []
    queries = 0
    while True:
        queries += 1
        if queries > max_queries:
            raise SearchLimitExceeded(f"AFP learner made more than {max_queries} queries")
        hypothesis = HornBasis(n=n, meta_clauses=_hypothesis(n, negatives, positives))
        diff = hypothesis.table() ^ target.table
        if not diff:
            break
        x = (diff & -diff).bit_length() - 1
        if target.value(x):
            positives.append(x)
            continue
        for i, s in enumerate(negatives):
            meet = s & x
            if meet != s and not target.value(meet):
                negatives[i] = meet
                break
        else:
            negatives.append(x)
    logger.debug(f"AFP learner: {len(negatives)} meta-clauses after {queries} equivalence queries")
    return HornBasis(
        n=n,
        meta_clauses=_hypothesis(n, negatives, positives),
        negatives=list(negatives),
        positives=list(positives),
    )


def mi_bruteforce(target: TotalFunction, max_n: int = MI_BRUTEFORCE_MAX_N) -> int:
    """
    Exact minimum number of meta-clauses for a Horn target (n <= 5).

    A meta-clause A -> B is valid exactly when B is inside the closure cl(A),
    so each antecedent only needs its strongest form A -> cl(A), or A -> F
    when no truepoint lies above A. The minimum basis is then a minimum
    cover of the falsepoints, A -> cl(A) covering x when A is inside x and
    cl(A) is not.
    """
    check_cap(target.n, max_n, "mi_bruteforce target")
    if not is_horn(target):
        raise NotHornError("target is not Horn", hint="its truepoints are not closed under AND")
    falsepoints = target.zeros()
    if not falsepoints:
        return 0
    meet = meet_closure_array(target)
    row_of = {x: r for r, x in enumerate(falsepoints)}
    columns = []
    for ante in range(1 << target.n):
        closure = int(meet[ante])
        if closure == ante:
            continue
        mask = 0
        for x, r in row_of.items():
            if x & ante == ante and (closure < 0 or x & closure != closure):
                mask |= 1 << r
        if mask:
            columns.append(mask)
    chosen, _ = solve_cover(len(falsepoints), columns)
    return len(chosen)


class NegativesCheck(BaseModel):
    """Pairwise independence of the learner's negatives; matrix only on failure."""

    independent: bool
    negatives: List[int]
    matrix: Optional[List[List[bool]]] = None

    def __bool__(self) -> bool:
        return self.independent


def check_negatives_independent(basis: HornBasis, target: TotalFunction) -> NegativesCheck:
    """Every two kept negatives are independent falsepoints of the target."""
    negs = list(basis.negatives)
    matrix = [
        [i != j and are_independent(a, b, target, View.FALSE) for j, b in enumerate(negs)]
        for i, a in enumerate(negs)
    ]
    ok = all(matrix[i][j] for i in range(len(negs)) for j in range(len(negs)) if i != j)
    if not ok:
        logger.warning(f"Dependent negatives found among {negs}")
    return NegativesCheck(independent=ok, negatives=negs, matrix=None if ok else matrix)


def expand_meta_clauses(basis: HornBasis) -> ClauseSet:
    """One Horn clause per consequent variable (one negative clause for bottom)."""
    raw = []
    for mc in basis.meta_clauses:
        a = mc.antecedent_mask
        if mc.bottom:
            raw.append((a, a))
            continue
        for b in sorted(mc.consequent):
            bit = 1 << (b - 1)
            raw.append((a | bit, a))
    return ClauseSet.from_raw(basis.n, raw, View.FALSE)


def write_meta_clauses(basis: HornBasis, path: Optional[Union[str, Path]] = None) -> str:
    lines = [f"# n={basis.n}"] + [mc.to_str() for mc in basis.meta_clauses]
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def read_meta_clauses(source: Union[str, Path], text: Optional[str] = None) -> HornBasis:
    """
    Parse `a1 a2 -> b1 b2` lines; `-> F` is bottom and `# n=<n>` fixes the arity.

    Without the header, n is the largest variable mentioned.
    """
    if text is None:
        try:
            with open(source, "r") as fh:
                text = fh.read()
        except OSError as e:
            raise FormatError(f"Could not open file '{source}': {e}") from e
    n: Optional[int] = None
    clauses: List[MetaClause] = []
    top = 0
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if token.startswith("n="):
                    n = int(token[2:])
            continue
        if "->" not in line:
            raise FormatError(f"Line {line_number}. Missing '->'")
        left, right = line.split("->", 1)
        try:
            ante = [int(v) for v in left.split()]
            bottom = right.split() == [BOTTOM_TOKEN]
            cons = [] if bottom else [int(v) for v in right.split()]
            clauses.append(
                MetaClause(antecedent=frozenset(ante), consequent=frozenset(cons), bottom=bottom)
            )
        except ValueError as e:
            raise FormatError(f"Line {line_number}. {e}") from e
        top = max([top] + ante + cons)
    n = n if n is not None else max(top, 1)
    if top > n:
        raise FormatError(f"variable {top} exceeds n={n}")
    return HornBasis(n=n, meta_clauses=clauses)
