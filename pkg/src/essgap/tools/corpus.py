"""
Seeded random functions and set-cover instances for the verification suites.

All randomness goes through numpy Generators so a (seed, parameters) pair
always reproduces the same corpus.
"""

import logging
from typing import Iterator, List, Optional, Sequence, Set

import numpy as np

from essgap.tools.bfcore import PartialFunction, TotalFunction, array_to_table
from essgap.tools.exactmin import SetCoverInstance

logger = logging.getLogger(__name__)


def make_rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_total(n: int, rng: np.random.Generator, density: float = 0.5) -> TotalFunction:
    values = rng.random(1 << n) < density
    return TotalFunction(n=n, table=array_to_table(values))


def random_partial(
    n: int, rng: np.random.Generator, star_rate: float = 0.25, density: float = 0.5
) -> PartialFunction:
    draw = rng.random(1 << n)
    stars = draw < star_rate
    ones = ~stars & (rng.random(1 << n) < density)
    return PartialFunction(n=n, ones=array_to_table(ones), stars=array_to_table(stars))


def random_monotone(n: int, rng: np.random.Generator, density: float = 0.1) -> TotalFunction:
    """Upward closure of a random generator set."""
    values = rng.random(1 << n) < density
    for i in range(n):
        block = values.reshape(-1, 2, 1 << i)
        block[:, 1, :] |= block[:, 0, :]
    return TotalFunction(n=n, table=array_to_table(values))


def and_closure(points: Sequence[int]) -> Set[int]:
    closed = set(points)
    frontier = set(points)
    while frontier:
        fresh = {a & b for a in frontier for b in closed} - closed
        closed |= fresh
        frontier = fresh
    return closed


def random_horn(
    n: int, rng: np.random.Generator, samples: Optional[int] = None, definite: bool = False
) -> TotalFunction:
    """
    Truepoints are the AND-closure of a random sample of points.

    With definite=True the all-ones point is added so the function is
    definite Horn.
    """
    samples = samples if samples is not None else int(rng.integers(1, n + 2))
    points = [int(p) for p in rng.integers(0, 1 << n, size=samples)]
    if definite:
        points.append((1 << n) - 1)
    closed = and_closure(points)
    values = np.zeros(1 << n, dtype=bool)
    values[sorted(closed)] = True
    return TotalFunction(n=n, table=array_to_table(values))


def random_set_cover(m: int, p: int, rng: np.random.Generator) -> SetCoverInstance:
    """p random nonempty subsets of {1..m}, patched so every element is covered."""
    subsets: List[Set[int]] = []
    for _ in range(p):
        size = int(rng.integers(1, m + 1))
        subsets.append({int(e) + 1 for e in rng.choice(m, size=size, replace=False)})
    for e in range(1, m + 1):
        if not any(e in s for s in subsets):
            subsets[int(rng.integers(0, p))].add(e)
    return SetCoverInstance(m=m, subsets=tuple(tuple(sorted(s)) for s in subsets))


def corpus(
    kind: str, sizes: Sequence[int], count: int, seed: int = 0, **kwargs
) -> Iterator[TotalFunction]:
    """
    count functions of the given kind, cycling through the variable counts in sizes.

    kind is one of total, monotone, horn, definite-horn.
    """
    rng = make_rng(seed)
    makers = {
        "total": lambda n: random_total(n, rng, **kwargs),
        "monotone": lambda n: random_monotone(n, rng, **kwargs),
        "horn": lambda n: random_horn(n, rng, **kwargs),
        "definite-horn": lambda n: random_horn(n, rng, definite=True, **kwargs),
    }
    if kind not in makers:
        raise ValueError(f"Unknown corpus kind: {kind}")
    for i in range(count):
        yield makers[kind](sizes[i % len(sizes)])
