"""
Configuration module for the essgap toolkit.
"""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field

DEFAULT_MAX_N = 24


class View(str, Enum):
    """Which polarity of points a quantity is measured on."""

    FALSE = "false"  # falsepoints, clauses, CNF
    TRUE = "true"  # truepoints, terms, DNF

    @property
    def opposite(self) -> "View":
        return View.TRUE if self is View.FALSE else View.FALSE


class OutputFormat(str, Enum):
    """Report formats supported by the verify command."""

    JSON = "json"
    CSV = "csv"


class ToolkitConfig(BaseModel):
    """Toolkit configuration."""

    max_n: int = Field(DEFAULT_MAX_N, ge=1, description="Largest variable count for truth tables")
    force: bool = Field(False, description="Lift the max_n guard")
    seed: int = Field(0, description="Seed for every randomized generator")
    out_dir: Optional[str] = Field(None, description="Directory for generated files")
    certificate_dir: str = Field(
        "essgap-certificates",
        description="Directory for compute certificates when out_dir is unset",
    )
    output_format: OutputFormat = OutputFormat.JSON
    debug: bool = False
    suite_config_path: Optional[str] = None
    search_node_limit: int = Field(
        2_000_000, ge=1, description="Branch-and-bound node budget per search"
    )
    ess_k_point_limit: int = Field(
        2000, ge=1, description="Largest point set accepted by the ess_k search"
    )

    @property
    def effective_max_n(self) -> int:
        """The cap actually enforced: max_n, or unbounded when forced."""
        return 64 if self.force else self.max_n
