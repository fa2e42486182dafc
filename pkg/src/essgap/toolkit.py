"""
Toolkit controller: validates arguments, dispatches generators, quantities
and suites from the registry, and writes their results.
"""

import json
import logging
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, ValidationError

from essgap import __version__
from essgap.tools.commands import ComputeResult, GenResult
from essgap.tools.reports import SuiteResult, suite_to_csv, suite_to_json
from essgap.utils.config import OutputFormat, ToolkitConfig
from essgap.utils.errors import EssGapError
from essgap.utils.tool_utils import COMMANDS, get_tool_definitions

logger = logging.getLogger(__name__)

# Define path for the suite defaults file
SUITE_CONFIG_PATH = os.getenv("ESSGAP_SUITE_CONFIG", "config/verify_suites.yaml")


def serialize_tool_output(result: Any, tool_name: str) -> str:
    """Serializes a result to indented JSON with sorted keys."""
    try:
        if isinstance(result, str):
            return result
        if isinstance(result, SuiteResult):
            return suite_to_json(result)
        if isinstance(result, BaseModel):
            data = result.model_dump(mode="json")
        else:
            data = result
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    except (TypeError, ValueError) as e:
        logger.error(f"Error during serialization for '{tool_name}': {e}", exc_info=True)
        return json.dumps({"error": f"Serialization failed for {tool_name}", "details": str(e)}, indent=2)


class EssGapToolkit:
    """
    Entry point shared by the CLI and by library users.

    Every generator, quantity and suite is a registry entry called as
    impl(config, params) with params validated by its pydantic model.
    """

    def __init__(self, config: Union[Dict, ToolkitConfig, None] = None):
        if config is None:
            self.config = ToolkitConfig()
        elif isinstance(config, dict):
            self.config = ToolkitConfig(**config)
        else:
            self.config = config

        self.suite_defaults: Dict[str, Dict[str, Any]] = {}
        self._load_suite_config()
        self.tool_definitions = get_tool_definitions()

    def _load_suite_config(self):
        """Load per-suite default parameters from the YAML file."""
        config_path = self.config.suite_config_path or SUITE_CONFIG_PATH
        if not os.path.isabs(config_path):
            candidate = os.path.abspath(config_path)
            if not os.path.exists(candidate):
                candidate = os.path.abspath(
                    os.path.join(os.path.dirname(__file__), "..", "..", config_path)
                )
            config_path = candidate

        try:
            with open(config_path, "r") as f:
                loaded = yaml.safe_load(f)
            if isinstance(loaded, dict):
                self.suite_defaults = {k: v or {} for k, v in loaded.items()}
                logger.debug(f"Loaded suite defaults from {config_path}")
            else:
                logger.error(
                    f"Invalid format in {config_path}: expected a dictionary, got {type(loaded)}. "
                    "Using built-in defaults."
                )
        except FileNotFoundError:
            logger.warning(f"Suite config not found at {config_path}. Using built-in defaults.")
        except yaml.YAMLError as e:
            logger.error(f"Error parsing suite config {config_path}: {e}. Using built-in defaults.")

    def names(self, command: str) -> List[str]:
        return sorted(self.tool_definitions.get(command, {}))

    def call(self, command: str, name: str, arguments: Optional[Dict[str, Any]] = None):
        """
        Validate arguments and run one registry entry.

        Raises:
            EssGapError: If the entry is unknown or the arguments are invalid;
                errors raised by the entry itself propagate unchanged.
        """
        if command not in COMMANDS:
            raise EssGapError(f"Unknown command '{command}'", hint=f"one of {', '.join(COMMANDS)}")
        definitions = self.tool_definitions[command]
        if name not in definitions:
            raise EssGapError(
                f"Unknown {command} target '{name}'", hint=f"one of {', '.join(self.names(command))}"
            )
        impl_func, params_model, _return_type, _description = definitions[name]

        merged: Dict[str, Any] = {}
        if command == "verify":
            merged.update(self.suite_defaults.get(name, {}))
        merged.update({k: v for k, v in (arguments or {}).items() if v is not None})

        try:
            params = params_model(**merged)
        except ValidationError as e:
            logger.error(f"Invalid arguments for {command} '{name}': {e}")
            raise EssGapError(f"Invalid arguments for {command} '{name}': {e}") from e

        logger.info(f"Running {command} '{name}'")
        result = impl_func(self.config, params)
        logger.debug(f"Result type from {command} '{name}': {type(result).__name__}")
        return result

    def provenance(self, result: GenResult) -> Dict[str, Any]:
        seed = result.params.get("seed")
        return {
            "family": result.family,
            "params": result.params,
            "seed": self.config.seed if seed is None else seed,
            "version": __version__,
            "created": datetime.now(timezone.utc).isoformat(),
        }

    def write_artifacts(
        self, result: Union[GenResult, ComputeResult], out_dir: Optional[str] = None
    ) -> List[Path]:
        """Write the artifacts; generator results also get one provenance sidecar per stem."""
        default = self.config.certificate_dir if isinstance(result, ComputeResult) else "."
        target = Path(out_dir or self.config.out_dir or default)
        target.mkdir(parents=True, exist_ok=True)
        files: Dict[str, str] = dict(result.artifacts)
        if isinstance(result, GenResult):
            sidecar = json.dumps(self.provenance(result), indent=2, sort_keys=True) + "\n"
            stems = {name.split(".", 1)[0] for name in result.artifacts}
            for stem in sorted(stems):
                files[f"{stem}.provenance.json"] = sidecar
        written = []
        for name in sorted(files):
            path = target / name
            path.write_text(files[name])
            written.append(path)
            logger.info(f"Wrote {path}")
        return written

    def render(
        self, result: Any, name: str = "result", output_format: Optional[OutputFormat] = None
    ) -> str:
        """Text for stdout: CSV or JSON for suites, JSON otherwise."""
        output_format = output_format or self.config.output_format
        if isinstance(result, SuiteResult) and output_format is OutputFormat.CSV:
            return suite_to_csv(result)
        return serialize_tool_output(result, name)
