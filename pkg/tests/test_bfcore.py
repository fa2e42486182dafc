"""
Tests for truth-table functions, assignments and cubes.
"""

from itertools import product

import numpy as np
import pytest

from essgap.tools.bfcore import (
    Assignment,
    Cube,
    PartialFunction,
    TotalFunction,
    complement,
    evaluate,
    is_monotone,
    load_function,
    parity_chi,
    parity_function,
    save_function,
    separates,
    spanning_subcube,
)
from essgap.tools.corpus import make_rng, random_partial, random_total
from essgap.utils.config import View
from essgap.utils.errors import CapExceededError, DimensionMismatchError, EssGapError, FormatError


class TestEvaluate:
    """Test cases for evaluation and complement."""

    def test_conjunction(self, and2):
        """Test evaluation of x1 AND x2 from an Assignment and an index."""
        assert evaluate(and2, Assignment(n=2, index=3)) == 1
        assert evaluate(and2, 1) == 0

    def test_parity_even_weight(self, parity3):
        """Test that parity is 0 on even-weight points."""
        assert evaluate(parity3, 0b011) == 0
        assert evaluate(parity3, 0b111) == 1

    def test_dimension_mismatch(self, and2):
        """Test that a wider assignment is rejected."""
        with pytest.raises(DimensionMismatchError):
            evaluate(and2, Assignment(n=3, index=3))
        with pytest.raises(DimensionMismatchError):
            evaluate(and2, 4)

    def test_assignment_range(self):
        """Test the index range check."""
        with pytest.raises(ValueError):
            Assignment(n=2, index=4)

    def test_complement_of_constant(self):
        """Test complementing a constant."""
        one = complement(TotalFunction.constant(2, 0))
        assert one.table == TotalFunction.constant(2, 1).table
        assert one.ones() == [0, 1, 2, 3]

    def test_complement_is_involutive(self):
        """Test not(not f) == f."""
        rng = make_rng(3)
        for _ in range(20):
            f = random_total(4, rng)
            assert complement(complement(f)).table == f.table

    def test_complement_keeps_stars(self, fhat_m3):
        """Test that complementing a partial function swaps 0 and 1 only."""
        g = complement(fhat_m3)
        assert isinstance(g, PartialFunction)
        assert g.stars == fhat_m3.stars
        assert g.ones == fhat_m3.zeros


class TestSpanningSubcube:
    """Test cases for spanning_subcube and separation."""

    def test_identical_points(self):
        """Test the subcube of a repeated point."""
        cube = spanning_subcube([0b0101, 0b0101], 4)
        assert cube.fixed == 0b1111
        assert cube.values == 0b0101
        assert cube.size == 1

    def test_total_disagreement(self):
        """Test that opposite points span the whole cube."""
        cube = spanning_subcube([0b01, 0b10], 2)
        assert cube.fixed == 0
        assert cube.size == 4

    def test_shared_high_bit(self):
        """Test a shared bit stays fixed."""
        cube = spanning_subcube([0b000, 0b011], 3)
        assert cube.fixed == 0b100
        assert cube.values == 0
        assert sorted(cube.members()) == [0, 1, 2, 3]

    def test_assignments_accepted(self):
        """Test spanning_subcube with Assignment inputs."""
        cube = spanning_subcube([Assignment(n=3, index=1), Assignment(n=3, index=3)])
        assert cube.n == 3
        assert cube.contains(1) and cube.contains(3)

    def test_empty_set(self):
        """Test that the empty set has no subcube."""
        with pytest.raises(EssGapError):
            spanning_subcube([], 3)

    def test_adding_points_never_fixes_more(self):
        """Test that the fixed mask only shrinks as points are added."""
        rng = make_rng(5)
        for _ in range(30):
            points = [int(p) for p in rng.integers(0, 64, size=4)]
            small = spanning_subcube(points[:2], 6)
            large = spanning_subcube(points, 6)
            assert large.fixed & ~small.fixed == 0
            assert large.contains_cube(small)

    def test_members_separate_the_pair(self):
        """Test separates against spanning-cube membership."""
        n = 3
        for p, q, r in product(range(1 << n), repeat=3):
            assert separates(r, p, q, n) == spanning_subcube([p, q], n).contains(r)


class TestCube:
    """Test cases for Cube membership and literals."""

    def test_member_count(self):
        """Test the cube member count."""
        n = 6
        rng = make_rng(11)
        for _ in range(25):
            fixed = int(rng.integers(0, 1 << n))
            values = fixed & int(rng.integers(0, 1 << n))
            cube = Cube(n=n, fixed=fixed, values=values)
            members = [a for a in range(1 << n) if cube.contains(a)]
            assert len(members) == cube.size == 2 ** (n - bin(fixed).count("1"))
            assert sorted(cube.members()) == members
            assert cube.member_array().tolist() == members

    def test_values_outside_fixed(self):
        """Test that values outside fixed are rejected."""
        with pytest.raises(ValueError):
            Cube(n=2, fixed=0b01, values=0b10)

    def test_literals_views(self):
        """Test literal parsing in both views."""
        clause = Cube.from_literals(3, [1, -3])
        assert clause.fixed == 0b101
        assert clause.values == 0b100
        assert clause.literals() == [1, -3]
        assert clause.to_str() == "(x1 | ~x3)"
        term = Cube.from_literals(3, [1, -3], view=View.TRUE)
        assert term.values == 0b001

    def test_complementary_literals(self):
        """Test that x and not x in one cube raise."""
        with pytest.raises(EssGapError):
            Cube.from_literals(2, [1, -1])


class TestFunctions:
    """Test cases for function construction, predicates and files."""

    def test_parity_chi(self):
        """Test chi on a few points."""
        assert parity_chi(0b0000) == 0
        assert parity_chi(0b011) == 0
        assert parity_chi(Assignment(n=3, index=0b001)) == 1

    def test_cap(self):
        """Test the variable cap on construction."""
        with pytest.raises(CapExceededError):
            TotalFunction.from_ones(25, [])
        f = TotalFunction.from_ones(3, [1], max_n=3)
        assert f.ones() == [1]
        with pytest.raises(CapExceededError):
            TotalFunction.from_ones(3, [1], max_n=2)

    def test_partial_overlap(self):
        """Test that ones and stars may not overlap."""
        with pytest.raises(EssGapError):
            PartialFunction.from_lists(2, [1], [1, 2])

    def test_partial_points(self, fhat_m3):
        """Test point lookups on the Gimpel fixture."""
        assert fhat_m3.star_count == 4
        assert fhat_m3.value(3) == 1
        assert fhat_m3.value(1) is None
        assert fhat_m3.value(0) == 0
        assert fhat_m3.points(View.FALSE) == [0]
        assert not fhat_m3.is_total

    def test_monotone(self, majority3, parity3):
        """Test monotonicity detection."""
        assert is_monotone(majority3)
        assert not is_monotone(parity3)
        assert is_monotone(TotalFunction.constant(3, 1))

    def test_array_bridge(self):
        """Test the numpy array round trip."""
        f = parity_function(4)
        arr = f.to_array()
        assert arr.dtype == np.bool_
        assert np.flatnonzero(arr).tolist() == f.ones()
        assert TotalFunction.from_array(4, arr).table == f.table

    def test_save_and_load(self, tmp_path, fhat_m3):
        """Test saving and loading a partial function."""
        path = tmp_path / "fhat.json"
        save_function(fhat_m3, path)
        loaded = load_function(path)
        assert isinstance(loaded, PartialFunction)
        assert (loaded.ones, loaded.stars) == (fhat_m3.ones, fhat_m3.stars)

    def test_load_total_without_stars(self, write_function):
        """Test that a payload without stars loads as total."""
        f = load_function(write_function("and.json", {"n": 2, "ones": [3]}))
        assert isinstance(f, TotalFunction)
        assert f.ones() == [3]

    def test_load_rejects_bad_payload(self, write_function, tmp_path):
        """Test that malformed payloads raise FormatError."""
        with pytest.raises(FormatError):
            load_function(write_function("bad.json", {"ones": [1]}))
        with pytest.raises(DimensionMismatchError):
            load_function(write_function("range.json", {"n": 2, "ones": [4]}))
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        with pytest.raises(FormatError):
            load_function(broken)

    def test_load_respects_cap(self, write_function):
        """Test that loading honours max_n."""
        path = write_function("p3.json", {"n": 3, "ones": [1, 2, 4, 7]})
        with pytest.raises(CapExceededError):
            load_function(path, max_n=2)

    def test_random_partial_is_consistent(self):
        """Test that random partial functions keep ones and stars disjoint."""
        rng = make_rng(2)
        f = random_partial(5, rng)
        assert f.ones & f.stars == 0
        assert f.zeros | f.ones | f.stars == f.full_mask
