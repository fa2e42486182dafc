"""
Truth-table core for the essgap toolkit.

This module provides total and partial Boolean functions over n <= 24
variables, assignments and subcubes. Variable x_1 is the least significant
bit of an assignment index; every file format and example follows this
convention.

Tables are Python-int bitsets (bit i holds f(i)); numpy is used to unpack
them for vectorized scans.
"""

import json
import logging
from pathlib import Path
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from essgap.utils.config import DEFAULT_MAX_N, View
from essgap.utils.errors import CapExceededError, DimensionMismatchError, EssGapError, FormatError

logger = logging.getLogger(__name__)

MAX_N = DEFAULT_MAX_N


def check_cap(n: int, max_n: int = MAX_N, what: str = "function") -> None:
    """Fail fast when a truth table over n variables would exceed the cap."""
    if n > max_n:
        raise CapExceededError(n, max_n, what)


def popcount(x: int) -> int:
    return x.bit_count()


def parity(x: int) -> int:
    return x.bit_count() & 1


def table_to_array(table: int, n: int) -> np.ndarray:
    """Unpack a bitset table into a boolean array of length 2^n."""
    size = 1 << n
    nbytes = max(1, size // 8)
    raw = np.frombuffer(table.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:size].astype(bool)


def array_to_table(arr: np.ndarray) -> int:
    """Pack a boolean array (index = assignment) back into a bitset."""
    packed = np.packbits(np.asarray(arr, dtype=np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def bits_of(mask: int, n: int) -> List[int]:
    """Indices of the set bits of a bitset over 2^n positions, ascending."""
    if mask == 0:
        return []
    if n <= 10:
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(i)
            mask >>= 1
            i += 1
        return out
    return np.flatnonzero(table_to_array(mask, n)).tolist()


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def submasks(mask: int) -> Iterator[int]:
    """All submasks of mask, starting from mask itself and ending with 0."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


class Assignment(BaseModel):
    """A point of {0,1}^n; bit i-1 of index is the value of x_i."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    index: int = Field(..., ge=0)

    @model_validator(mode="after")
    def _check_range(self) -> "Assignment":
        if self.index >> self.n:
            raise ValueError(f"index {self.index} does not fit in {self.n} variables")
        return self

    def bit(self, i: int) -> int:
        """Value of x_i (1-based)."""
        return (self.index >> (i - 1)) & 1

    @property
    def weight(self) -> int:
        return popcount(self.index)

    def leq(self, other: "Assignment") -> bool:
        """Componentwise x <= y."""
        return self.index & ~other.index == 0


class Cube(BaseModel):
    """
    A subcube { a : a & fixed == values } of {0,1}^n.

    Under the falsify view the cube is the set of assignments falsifying a
    clause; under the satisfy view it is the set satisfying a term.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0)
    fixed: int = Field(0, ge=0)
    values: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_masks(self) -> "Cube":
        if self.values & ~self.fixed:
            raise ValueError("values must be a submask of fixed")
        if self.fixed >> self.n:
            raise ValueError(f"fixed mask {self.fixed:#x} exceeds {self.n} variables")
        return self

    @classmethod
    def raw(cls, n: int, fixed: int, values: int) -> "Cube":
        """Build without validation; for solver internals that already hold valid masks."""
        return cls.model_construct(n=n, fixed=fixed, values=values)

    @property
    def free(self) -> int:
        return ((1 << self.n) - 1) & ~self.fixed

    @property
    def dimension(self) -> int:
        return self.n - popcount(self.fixed)

    @property
    def size(self) -> int:
        return 1 << self.dimension

    @property
    def literal_count(self) -> int:
        return popcount(self.fixed)

    def contains(self, index: int) -> bool:
        return index & self.fixed == self.values

    def members(self) -> Iterator[int]:
        values = self.values
        for sub in submasks(self.free):
            yield values | sub

    def member_array(self) -> np.ndarray:
        """All member indices as an int64 array, ascending."""
        positions = [i for i in range(self.n) if (self.free >> i) & 1]
        counter = np.arange(1 << len(positions), dtype=np.int64)
        members = np.full(counter.shape, self.values, dtype=np.int64)
        for j, pos in enumerate(positions):
            members |= ((counter >> j) & 1) << pos
        return members

    def contains_cube(self, other: "Cube") -> bool:
        """True when other's member set is a subset of this cube's."""
        return self.fixed & ~other.fixed == 0 and other.values & self.fixed == self.values

    def literals(self, view: View = View.FALSE) -> List[int]:
        """
        DIMACS-style signed literals, ascending by variable.

        Falsify view: a position fixed to 0 is the positive literal x_i (the
        clause is falsified when x_i = 0). Satisfy view: a position fixed to 1
        is the positive literal.
        """
        out = []
        for i in range(self.n):
            bit = 1 << i
            if not self.fixed & bit:
                continue
            value = 1 if self.values & bit else 0
            positive = value == 0 if view is View.FALSE else value == 1
            out.append(i + 1 if positive else -(i + 1))
        return out

    @classmethod
    def from_literals(cls, n: int, literals: Sequence[int], view: View = View.FALSE) -> "Cube":
        fixed = 0
        values = 0
        for lit in literals:
            var = abs(lit)
            if var < 1 or var > n:
                raise DimensionMismatchError(f"literal {lit} out of range for n={n}")
            bit = 1 << (var - 1)
            value = (0 if lit > 0 else 1) if view is View.FALSE else (1 if lit > 0 else 0)
            if fixed & bit and (values & bit) != (bit if value else 0):
                raise EssGapError(f"complementary literals on x{var}")
            fixed |= bit
            if value:
                values |= bit
        return cls(n=n, fixed=fixed, values=values)

    def sort_key(self) -> tuple:
        return (popcount(self.fixed), self.fixed, self.values)

    def to_str(self, view: View = View.FALSE) -> str:
        lits = self.literals(view)
        names = [f"x{lit}" if lit > 0 else f"~x{-lit}" for lit in lits]
        if view is View.FALSE:
            return "(" + " | ".join(names) + ")" if names else "()"
        return " & ".join(names) if names else "1"


class TotalFunction(BaseModel):
    """A total Boolean function stored as a 2^n-bit table."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    table: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_table(self) -> "TotalFunction":
        if self.table.bit_length() > (1 << self.n):
            raise ValueError(f"table has bits beyond 2^{self.n}")
        return self

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    @classmethod
    def from_ones(cls, n: int, ones: Iterable[int], max_n: int = MAX_N) -> "TotalFunction":
        check_cap(n, max_n)
        ones = list(ones)
        for i in ones:
            if i < 0 or i >> n:
                raise DimensionMismatchError(f"assignment {i} out of range for n={n}")
        return cls(n=n, table=mask_of(ones))

    @classmethod
    def from_callable(cls, n: int, fn: Callable[[int], int], max_n: int = MAX_N) -> "TotalFunction":
        check_cap(n, max_n)
        return cls(n=n, table=mask_of(i for i in range(1 << n) if fn(i)))

    @classmethod
    def from_array(cls, n: int, arr: np.ndarray) -> "TotalFunction":
        return cls(n=n, table=array_to_table(arr))

    @classmethod
    def constant(cls, n: int, value: int) -> "TotalFunction":
        return cls(n=n, table=((1 << (1 << n)) - 1) if value else 0)

    def value(self, index: int) -> int:
        return (self.table >> index) & 1

    def ones(self) -> List[int]:
        return bits_of(self.table, self.n)

    def zeros(self) -> List[int]:
        return bits_of(self.full_mask ^ self.table, self.n)

    def to_array(self) -> np.ndarray:
        return table_to_array(self.table, self.n)

    def as_partial(self) -> "PartialFunction":
        return PartialFunction.model_construct(n=self.n, ones=self.table, stars=0)


class PartialFunction(BaseModel):
    """
    A partial function {0,1}^n -> {0,1,*}.

    ones and stars are disjoint bitsets; every other assignment is a 0-point.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    ones: int = Field(0, ge=0)
    stars: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_sets(self) -> "PartialFunction":
        if self.ones & self.stars:
            raise ValueError("ones and stars must be disjoint")
        limit = 1 << self.n
        if self.ones.bit_length() > limit or self.stars.bit_length() > limit:
            raise ValueError(f"point sets have bits beyond 2^{self.n}")
        return self

    @classmethod
    def from_lists(
        cls, n: int, ones: Iterable[int], stars: Iterable[int] = (), max_n: int = MAX_N
    ) -> "PartialFunction":
        check_cap(n, max_n)
        ones = list(ones)
        stars = list(stars)
        for i in ones + stars:
            if i < 0 or i >> n:
                raise DimensionMismatchError(f"assignment {i} out of range for n={n}")
        one_mask = mask_of(ones)
        star_mask = mask_of(stars)
        if one_mask & star_mask:
            raise EssGapError("an assignment is listed both as a 1-point and a *-point")
        return cls(n=n, ones=one_mask, stars=star_mask)

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    @property
    def zeros(self) -> int:
        return self.full_mask & ~(self.ones | self.stars)

    @property
    def is_total(self) -> bool:
        return self.stars == 0

    @property
    def star_count(self) -> int:
        return popcount(self.stars)

    def value(self, index: int) -> Optional[int]:
        """1, 0, or None for a *-point."""
        if (self.stars >> index) & 1:
            return None
        return (self.ones >> index) & 1

    def points(self, view: View) -> List[int]:
        """The points a quantity is measured on: 0-points (false view) or 1-points."""
        return bits_of(self.zeros if view is View.FALSE else self.ones, self.n)

    def point_mask(self, view: View) -> int:
        return self.zeros if view is View.FALSE else self.ones

    def witness_mask(self, view: View) -> int:
        """Points of opposite polarity; *-points never count."""
        return self.ones if view is View.FALSE else self.zeros

    def dual(self) -> "PartialFunction":
        """Complement with *-points kept as *."""
        return PartialFunction.model_construct(n=self.n, ones=self.zeros, stars=self.stars)

    def to_total(self) -> TotalFunction:
        if self.stars:
            raise EssGapError("partial function has *-points; it is not total")
        return TotalFunction.model_construct(n=self.n, table=self.ones)


FunctionLike = Union[TotalFunction, PartialFunction]


def as_partial(f: FunctionLike) -> PartialFunction:
    if isinstance(f, TotalFunction):
        return f.as_partial()
    return f


def _index_of(f: FunctionLike, a: Union[Assignment, int]) -> int:
    if isinstance(a, Assignment):
        if a.n != f.n:
            raise DimensionMismatchError(f"assignment over {a.n} variables, function over {f.n}")
        return a.index
    if a < 0 or a >> f.n:
        raise DimensionMismatchError(f"assignment {a} out of range for n={f.n}")
    return a


def evaluate(f: TotalFunction, a: Union[Assignment, int]) -> int:
    """Table bit of f at a."""
    return f.value(_index_of(f, a))


def complement(f: FunctionLike) -> FunctionLike:
    """Bitwise negation; for a partial function the *-points stay *."""
    if isinstance(f, TotalFunction):
        return TotalFunction.model_construct(n=f.n, table=f.full_mask ^ f.table)
    return f.dual()


def spanning_subcube(points: Sequence[Union[Assignment, int]], n: Optional[int] = None) -> Cube:
    """
    Smallest subcube containing every point.

    Its members are exactly the assignments that agree with the points on
    every position where all points agree; for two points these are the
    assignments separating them.
    """
    if not points:
        raise EssGapError("spanning_subcube needs at least one point")
    indices = []
    for p in points:
        if isinstance(p, Assignment):
            if n is None:
                n = p.n
            elif p.n != n:
                raise DimensionMismatchError("points over different variable counts")
            indices.append(p.index)
        else:
            indices.append(p)
    if n is None:
        raise EssGapError("n is required when points are plain indices")
    full = (1 << n) - 1
    first = indices[0]
    disagree = 0
    for idx in indices[1:]:
        disagree |= idx ^ first
    fixed = full & ~disagree
    return Cube(n=n, fixed=fixed, values=first & fixed)


def separates(r: int, p: int, q: int, n: int) -> bool:
    """r separates p and q when every bit of r matches p or q."""
    full = (1 << n) - 1
    return ((r ^ p) & (r ^ q) & full) == 0


def parity_chi(a: Union[Assignment, int]) -> int:
    """0 for even weight, 1 for odd."""
    index = a.index if isinstance(a, Assignment) else a
    return parity(index)


def is_monotone(f: TotalFunction) -> bool:
    """f(x) <= f(y) whenever x <= y."""
    arr = f.to_array()
    for i in range(f.n):
        view = arr.reshape(-1, 2, 1 << i)
        if np.any(view[:, 0, :] & ~view[:, 1, :]):
            return False
    return True


def parity_function(n: int) -> TotalFunction:
    return TotalFunction.from_callable(n, lambda i: parity(i))


def function_to_dict(f: FunctionLike) -> dict:
    """JSON function file payload; stars is omitted for total functions."""
    if isinstance(f, TotalFunction):
        return {"n": f.n, "ones": f.ones()}
    return {"n": f.n, "ones": bits_of(f.ones, f.n), "stars": bits_of(f.stars, f.n)}


def function_from_dict(data: dict, max_n: int = MAX_N) -> FunctionLike:
    try:
        n = int(data["n"])
        ones = [int(i) for i in data.get("ones", [])]
        stars = data.get("stars")
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"Invalid function payload: {e}") from e
    try:
        if stars is None:
            return TotalFunction.from_ones(n, ones, max_n=max_n)
        return PartialFunction.from_lists(n, ones, [int(i) for i in stars], max_n=max_n)
    except ValidationError as e:
        raise FormatError(f"Invalid function payload: {e}") from e


def load_function(path: Union[str, Path], max_n: int = MAX_N) -> FunctionLike:
    try:
        with open(path, "r") as fh:
            data = json.load(fh)
    except OSError as e:
        raise FormatError(f"Could not open file '{path}': {e}") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"{path} is not valid JSON: {e}") from e
    f = function_from_dict(data, max_n=max_n)
    logger.debug(f"Loaded {type(f).__name__} over {f.n} variables from {path}")
    return f


def save_function(f: FunctionLike, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        json.dump(function_to_dict(f), fh, sort_keys=True)
        fh.write("\n")
