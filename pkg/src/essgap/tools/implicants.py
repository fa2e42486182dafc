"""
Implicates, implicants and their prime families.

Clauses and terms are both Cubes: a clause is identified with the cube of
assignments falsifying it, a term with the cube of assignments satisfying
it. Prime enumeration merges cubes Quine-McCluskey style, level by level
over the fixed mask, treating *-points as mergeable but never as points
that need covering.
"""

import logging
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from essgap.tools.bfcore import (
    Cube,
    FunctionLike,
    as_partial,
    bits_of,
    popcount,
    table_to_array,
)
from essgap.utils.config import View
from essgap.utils.errors import DimensionMismatchError, FormatError

logger = logging.getLogger(__name__)

RawCube = Tuple[int, int]  # (fixed, values)


class ClauseSet(BaseModel):
    """
    An ordered, duplicate-free family of cubes.

    With view=false the cubes are clauses (a CNF); with view=true they are
    terms (a DNF).
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0)
    clauses: Tuple[Cube, ...] = ()
    view: View = View.FALSE

    @classmethod
    def from_raw(cls, n: int, raw: Iterable[RawCube], view: View = View.FALSE) -> "ClauseSet":
        unique = sorted(set(raw), key=lambda c: (popcount(c[0]), c[0], c[1]))
        return cls.model_construct(
            n=n, clauses=tuple(Cube.raw(n, fx, vl) for fx, vl in unique), view=view
        )

    def __len__(self) -> int:
        return len(self.clauses)

    def raw(self) -> List[RawCube]:
        return [(c.fixed, c.values) for c in self.clauses]

    def evaluate(self, index: int) -> int:
        """Value of the CNF (false view) or DNF (true view) at an assignment."""
        hit = any(index & c.fixed == c.values for c in self.clauses)
        if self.view is View.FALSE:
            return 0 if hit else 1
        return 1 if hit else 0

    def table(self) -> int:
        """The represented total function as a bitset over 2^n."""
        hits = np.zeros(1 << self.n, dtype=bool)
        for c in self.clauses:
            hits[c.member_array()] = True
        values = ~hits if self.view is View.FALSE else hits
        packed = np.packbits(values.astype(np.uint8), bitorder="little")
        return int.from_bytes(packed.tobytes(), "little") & ((1 << (1 << self.n)) - 1)

    def to_str(self) -> str:
        parts = [c.to_str(self.view) for c in self.clauses]
        if self.view is View.FALSE:
            return " & ".join(parts) if parts else "1"
        return " | ".join(f"({p})" for p in parts) if parts else "0"


def covers(c: Cube, a: int, view: View = View.FALSE) -> bool:
    """
    Whether clause/term c covers assignment a.

    A clause covers the points that falsify it and a term the points that
    satisfy it; both are membership in the cube, so the view only names the
    reading.
    """
    if a < 0 or a >> c.n:
        raise DimensionMismatchError(f"assignment {a} out of range for n={c.n}")
    return c.contains(a)


def _cube_meets(c: Cube, mask: int, n: int) -> bool:
    """Whether some member of c is in the bitset mask."""
    if c.n != n:
        raise DimensionMismatchError(f"cube over {c.n} variables, function over {n}")
    if not mask:
        return False
    if c.size <= 64 and n <= 12:
        return any((mask >> m) & 1 for m in c.members())
    arr = table_to_array(mask, n)
    return bool(arr[c.member_array()].any())


def is_implicate(c: Cube, f: FunctionLike) -> bool:
    """The clause is falsified only on 0-points or *-points of f."""
    p = as_partial(f)
    return not _cube_meets(c, p.ones, p.n)


def is_implicant(t: Cube, f: FunctionLike) -> bool:
    """The term is satisfied only on 1-points or *-points of f."""
    p = as_partial(f)
    return not _cube_meets(t, p.zeros, p.n)


def is_horn_clause(c: Cube) -> bool:
    """At most one positive literal (falsify view)."""
    return popcount(c.fixed & ~c.values) <= 1


def _merge_cubes(n: int, points: Iterable[int]) -> List[RawCube]:
    """All maximal cubes inside a point set (Quine-McCluskey merging)."""
    full = (1 << n) - 1
    level: Dict[int, Set[int]] = {full: set(points)}
    maximal: List[RawCube] = []
    rounds = 0
    while level:
        next_level: Dict[int, Set[int]] = defaultdict(set)
        for fixed, vals in level.items():
            used: Set[int] = set()
            fbits = [1 << i for i in range(n) if (fixed >> i) & 1]
            for b in fbits:
                lower = fixed & ~b
                for v in vals:
                    if v & b:
                        continue
                    partner = v | b
                    if partner in vals:
                        next_level[lower].add(v)
                        used.add(v)
                        used.add(partner)
            for v in vals:
                if v not in used:
                    maximal.append((fixed, v))
        level = next_level
        rounds += 1
    logger.debug(f"Cube merging finished after {rounds} rounds with {len(maximal)} maximal cubes")
    return maximal


def cube_rows(fixed: int, values: int, n: int, row_of: Dict[int, int]) -> List[int]:
    """Row indices (per row_of) of the points a raw cube contains."""
    dim = n - popcount(fixed)
    if (1 << dim) <= len(row_of):
        free = ((1 << n) - 1) & ~fixed
        out = []
        sub = free
        while True:
            r = row_of.get(values | sub)
            if r is not None:
                out.append(r)
            if sub == 0:
                break
            sub = (sub - 1) & free
        return out
    return [r for p, r in row_of.items() if p & fixed == values]


def prime_implicate_raw(f: FunctionLike) -> List[RawCube]:
    """Prime implicates as raw (fixed, values) pairs in canonical order."""
    p = as_partial(f)
    if not p.zeros:
        return []
    zero_points = bits_of(p.zeros, p.n)
    candidates = zero_points + bits_of(p.stars, p.n)
    zero_rows = {z: i for i, z in enumerate(zero_points)}
    primes = [
        (fx, vl)
        for fx, vl in _merge_cubes(p.n, candidates)
        if cube_rows(fx, vl, p.n, zero_rows)
    ]
    primes.sort(key=lambda c: (popcount(c[0]), c[0], c[1]))
    logger.debug(f"{len(primes)} prime implicates over {p.n} variables")
    return primes


def prime_implicates(f: FunctionLike) -> ClauseSet:
    """
    All prime implicates of f (falsify view).

    Sorted by (literal count, fixed mask, values mask). Each one covers at
    least one 0-point; functions without 0-points have none.
    """
    p = as_partial(f)
    return ClauseSet.from_raw(p.n, prime_implicate_raw(p), View.FALSE)


def prime_implicants(f: FunctionLike) -> ClauseSet:
    """All prime implicants of f (satisfy view), by duality."""
    p = as_partial(f)
    return ClauseSet.from_raw(p.n, prime_implicate_raw(p.dual()), View.TRUE)


def all_implicates_bruteforce(f: FunctionLike) -> List[RawCube]:
    """Every implicate of f, by scanning all 3^n clauses. Small n only."""
    p = as_partial(f)
    n = p.n
    ones = table_to_array(p.ones, n)
    idx = np.arange(1 << n)
    out = []
    full = (1 << n) - 1
    for fixed in range(full + 1):
        members_of = idx & fixed
        for values in _submask_list(fixed):
            if not ones[members_of == values].any():
                out.append((fixed, values))
    return out


def _submask_list(mask: int) -> List[int]:
    out = []
    sub = mask
    while True:
        out.append(sub)
        if sub == 0:
            return out
        sub = (sub - 1) & mask


def write_dimacs(clauses: ClauseSet, path: Optional[Union[str, Path]] = None) -> str:
    """
    DIMACS rendering of a clause set.

    A comment line records n and the view; terms are written with the same
    literal convention as clauses of the complementary reading.
    """
    lines = [
        f"c essgap n={clauses.n} view={clauses.view.value}",
        f"p cnf {clauses.n} {len(clauses)}",
    ]
    for c in clauses.clauses:
        lits = c.literals(clauses.view)
        lines.append(" ".join(str(lit) for lit in lits + [0]))
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def read_dimacs(source: Union[str, Path], text: Optional[str] = None) -> ClauseSet:
    """
    Parse a DIMACS file (or text) into a ClauseSet.

    The view is taken from an `essgap` comment line when present and defaults
    to the falsify view. Empty clauses are accepted.
    """
    if text is None:
        try:
            with open(source, "r") as fh:
                text = fh.read()
        except OSError as e:
            raise FormatError(f"Could not open file '{source}': {e}") from e
    view = View.FALSE
    nvar: Optional[int] = None
    nclause = 0
    clauses: List[Cube] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line[0] == "c":
            for token in line.split()[1:]:
                if token.startswith("view="):
                    view = View(token.split("=", 1)[1])
            continue
        if line[0] == "p":
            fields = line[1:].split()
            if len(fields) != 3 or fields[0] != "cnf":
                raise FormatError(f"Line {line_number}. Bad header line '{line}'")
            try:
                nvar, nclause = int(fields[1]), int(fields[2])
            except ValueError as e:
                raise FormatError(f"Line {line_number}. Invalid header counts") from e
            continue
        if nvar is None:
            raise FormatError(f"Line {line_number}. Clause before header")
        try:
            lits = [int(s) for s in line.split()]
        except ValueError as e:
            raise FormatError(f"Line {line_number}. Non-integer field") from e
        if not lits or lits[-1] != 0:
            raise FormatError(f"Line {line_number}. Clause line should end with 0")
        body = lits[:-1]
        if any(lit == 0 or abs(lit) > nvar for lit in body):
            raise FormatError(f"Line {line_number}. Out-of-range literal")
        if len({abs(lit) for lit in body}) != len(body):
            raise FormatError(f"Line {line_number}. Opposite or repeated literal")
        clauses.append(Cube.from_literals(nvar, body, view))
    if nvar is None:
        raise FormatError("Missing 'p cnf' header")
    if len(clauses) != nclause:
        raise FormatError(f"Got {len(clauses)} clauses. Expected {nclause}")
    return ClauseSet.model_construct(n=nvar, clauses=tuple(clauses), view=view)
