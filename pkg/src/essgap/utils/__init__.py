"""
Utilities module for the essgap toolkit.
"""

from essgap.utils.config import OutputFormat, ToolkitConfig, View
from essgap.utils.errors import (
    CapExceededError,
    DimensionMismatchError,
    EssGapError,
    FormatError,
    InfeasibleCoverError,
    NotHornError,
    PolarityError,
    RetryBudgetExhausted,
    SearchLimitExceeded,
    UncertifiedVWError,
)

__all__ = [
    "CapExceededError",
    "DimensionMismatchError",
    "EssGapError",
    "FormatError",
    "InfeasibleCoverError",
    "NotHornError",
    "OutputFormat",
    "PolarityError",
    "RetryBudgetExhausted",
    "SearchLimitExceeded",
    "ToolkitConfig",
    "UncertifiedVWError",
    "View",
]
