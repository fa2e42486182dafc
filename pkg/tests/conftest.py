"""Pytest configuration file for essgap tests."""

import json

import pytest

from essgap.tools.bfcore import PartialFunction, TotalFunction, parity_function
from essgap.tools.constructions import all_k_subsets_instance
from essgap.utils.config import ToolkitConfig


@pytest.fixture
def and2():
    """x1 AND x2."""
    return TotalFunction.from_ones(2, [3])


@pytest.fixture
def or2():
    """x1 OR x2."""
    return TotalFunction.from_ones(2, [1, 2, 3])


@pytest.fixture
def parity3():
    return parity_function(3)


@pytest.fixture
def majority3():
    return TotalFunction.from_callable(3, lambda i: bin(i).count("1") >= 2)


@pytest.fixture
def allpairs_m3():
    return all_k_subsets_instance(3, 2)


@pytest.fixture
def fhat_m3():
    """Gimpel's partial function for the all-pairs instance on 3 elements."""
    return PartialFunction.from_lists(3, [3, 5, 6], [1, 2, 4, 7])


@pytest.fixture
def config():
    return ToolkitConfig()


@pytest.fixture
def write_function(tmp_path):
    """Write a function JSON payload and return its path."""

    def _write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    return _write
