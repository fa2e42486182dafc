"""
Tests for implicates, implicants and DIMACS files.
"""

import pytest

from essgap.tools.bfcore import Cube, TotalFunction, complement, parity_function
from essgap.tools.corpus import make_rng, random_partial, random_total
from essgap.tools.implicants import (
    ClauseSet,
    all_implicates_bruteforce,
    covers,
    is_horn_clause,
    is_implicant,
    is_implicate,
    prime_implicants,
    prime_implicates,
    read_dimacs,
    write_dimacs,
)
from essgap.utils.config import View
from essgap.utils.errors import FormatError


class TestCovers:
    """Test cases for covering and implicate predicates."""

    def test_clause_covers_falsifying_points(self):
        """Test clause coverage."""
        clause = Cube.from_literals(2, [1, 2])
        assert covers(clause, 0b00)
        assert not covers(clause, 0b01)

    def test_term_covers_satisfying_points(self):
        """Test term coverage."""
        term = Cube.from_literals(2, [1, 2], View.TRUE)
        assert covers(term, 0b11, View.TRUE)

    def test_is_implicate(self, and2):
        """Test implicates of AND."""
        assert is_implicate(Cube.from_literals(2, [1]), and2)
        assert is_implicate(Cube.from_literals(2, [1, -2]), and2)
        assert not is_implicate(Cube.from_literals(2, [1]), parity_function(2))

    def test_implicate_may_cover_stars(self, fhat_m3):
        """Test that implicates may fall on *-points."""
        # falsified on 000 and 001: a 0-point and a *-point
        assert is_implicate(Cube.from_literals(3, [2, 3]), fhat_m3)
        assert not is_implicate(Cube.from_literals(3, [3]), fhat_m3)

    def test_is_implicant(self, or2):
        """Test implicants of OR."""
        assert is_implicant(Cube.from_literals(2, [1], View.TRUE), or2)
        assert not is_implicant(Cube.from_literals(2, [-1], View.TRUE), or2)

    def test_horn_clause(self):
        """Test Horn clause detection."""
        assert is_horn_clause(Cube.from_literals(3, [1, -2, -3]))
        assert is_horn_clause(Cube.from_literals(3, [-1, -2]))
        assert not is_horn_clause(Cube.from_literals(3, [1, 2]))


class TestPrimes:
    """Test cases for prime implicate and implicant enumeration."""

    def test_and(self, and2):
        """Test the prime implicates of AND."""
        assert prime_implicates(and2).raw() == [(0b01, 0), (0b10, 0)]

    def test_majority(self, majority3):
        """Test the primes of majority."""
        assert prime_implicates(majority3).raw() == [(0b011, 0), (0b101, 0), (0b110, 0)]
        assert prime_implicants(majority3).raw() == [(0b011, 0b011), (0b101, 0b101), (0b110, 0b110)]

    def test_or_implicants(self, or2):
        """Test the prime implicants of OR."""
        primes = prime_implicants(or2)
        assert primes.view is View.TRUE
        assert primes.raw() == [(0b01, 0b01), (0b10, 0b10)]

    def test_constants(self):
        """Test that constants have no primes of the measured kind."""
        assert len(prime_implicates(TotalFunction.constant(3, 1))) == 0
        assert len(prime_implicants(TotalFunction.constant(3, 0))) == 0
        assert prime_implicates(TotalFunction.constant(2, 0)).raw() == [(0, 0)]

    def test_absorption_completeness(self):
        """Test primes against brute-force absorption."""
        rng = make_rng(17)
        for n in (2, 3, 4):
            for _ in range(8):
                f = random_total(n, rng)
                primes = prime_implicates(f).clauses
                for fixed, values in all_implicates_bruteforce(f):
                    c = Cube(n=n, fixed=fixed, values=values)
                    assert any(p.contains_cube(c) for p in primes)

    def test_primes_are_prime_and_cover_a_zero(self):
        """Test that each prime is prime and covers a 0-point."""
        rng = make_rng(4)
        for _ in range(10):
            f = random_partial(4, rng)
            for p in prime_implicates(f).clauses:
                assert is_implicate(p, f)
                assert any(covers(p, z) for z in range(16) if f.value(z) == 0)
                for i in range(4):
                    bit = 1 << i
                    if p.fixed & bit:
                        wider = Cube(n=4, fixed=p.fixed & ~bit, values=p.values & ~bit)
                        assert not is_implicate(wider, f)

    def test_duality(self):
        """Test implicants of f as implicates of not f."""
        rng = make_rng(8)
        for n in (2, 3, 4, 5):
            f = random_partial(n, rng)
            assert prime_implicants(f).raw() == prime_implicates(complement(f)).raw()

    def test_prime_cnf_represents_function(self):
        """Test that the prime CNF represents f."""
        rng = make_rng(21)
        for _ in range(5):
            f = random_total(4, rng)
            assert prime_implicates(f).table() == f.table


class TestDimacs:
    """Test cases for DIMACS reading and writing."""

    def test_write(self, majority3):
        """Test DIMACS output."""
        text = write_dimacs(prime_implicates(majority3))
        lines = text.splitlines()
        assert lines[0] == "c essgap n=3 view=false"
        assert lines[1] == "p cnf 3 3"
        assert lines[2:] == ["1 2 0", "1 3 0", "2 3 0"]

    def test_read_back(self, tmp_path, and2):
        """Test reading DIMACS back."""
        path = tmp_path / "and.cnf"
        written = prime_implicants(and2)
        write_dimacs(written, path)
        loaded = read_dimacs(path)
        assert loaded.view is View.TRUE
        assert loaded.raw() == written.raw()

    def test_empty_clause(self):
        """Test the empty clause."""
        loaded = read_dimacs("", text="p cnf 2 1\n0\n")
        assert loaded.raw() == [(0, 0)]
        assert loaded.evaluate(3) == 0

    @pytest.mark.parametrize(
        "text",
        [
            "1 2 0\n",
            "p cnf 2 1\n1 2\n",
            "p cnf 2 1\n1 3 0\n",
            "p cnf 2 1\n1 -1 0\n",
            "p cnf 2 2\n1 0\n",
            "p dnf 2 1\n1 0\n",
            "p cnf 2 1\n1 x 0\n",
        ],
    )
    def test_malformed(self, text):
        """Test malformed DIMACS."""
        with pytest.raises(FormatError):
            read_dimacs("", text=text)

    def test_clause_set_evaluate(self, and2):
        """Test ClauseSet.evaluate."""
        cnf = prime_implicates(and2)
        assert isinstance(cnf, ClauseSet)
        assert [cnf.evaluate(i) for i in range(4)] == [0, 0, 0, 1]
        assert cnf.to_str() == "(x1) & (x2)"
