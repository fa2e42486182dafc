"""
Command-line interface for the essgap toolkit.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from essgap.toolkit import EssGapToolkit
from essgap.tools.commands import ComputeResult, GenResult
from essgap.tools.reports import SuiteResult
from essgap.utils.config import OutputFormat, ToolkitConfig, View
from essgap.utils.errors import EssGapError

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_ERROR = 2


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "false").lower() == "true"


def _common_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand, with defaults read from the environment."""
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("Toolkit options")
    group.add_argument(
        "--seed",
        type=int,
        help="Seed for randomized generators and corpora",
        default=int(os.environ.get("ESSGAP_SEED", "0")),
    )
    group.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        help="Report format for verify",
        default=os.environ.get("ESSGAP_FORMAT", OutputFormat.JSON.value),
    )
    group.add_argument(
        "--max-n",
        type=int,
        help="Largest variable count for truth tables",
        default=int(os.environ.get("ESSGAP_MAX_N", "24")),
    )
    group.add_argument(
        "--force",
        action="store_true",
        help="Lift the --max-n guard",
        default=_env_flag("ESSGAP_FORCE"),
    )
    group.add_argument(
        "--out",
        help="Directory for generated files and certificates",
        default=os.environ.get("ESSGAP_OUT_DIR"),
    )
    group.add_argument(
        "--cert-dir",
        help="Directory for compute certificates when --out is not given",
        default=os.environ.get("ESSGAP_CERT_DIR", "essgap-certificates"),
    )
    group.add_argument(
        "--suite-config",
        help="YAML file with per-suite default parameters",
        default=os.environ.get("ESSGAP_SUITE_CONFIG"),
    )
    group.add_argument(
        "--debug",
        action="store_true",
        help="Enable debug logging",
        default=_env_flag("ESSGAP_DEBUG"),
    )
    return common


def _case(text: str) -> List[int]:
    try:
        k, t = (int(v) for v in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected K,T, got '{text}'") from e
    return [k, t]


def parse_args(argv: Optional[List[str]] = None):
    """Parse command-line arguments."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="essgap", description="Exact ess/cs gap toolkit for small Boolean functions"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="Generate a family")
    gen.add_argument("family", help="Family name (all-pairs, gimpel, lift, horn-gap, ...)")
    gen.add_argument("--m", type=int, help="Ground-set size")
    gen.add_argument("--r", type=int, help="Subset size")
    gen.add_argument("--pairs", action="store_true", help="Use the all-pairs instance")
    gen.add_argument("--k", type=int, help="Horn family element count")
    gen.add_argument("--t", type=int, help="Horn family amplification count")
    gen.add_argument("--mode", choices=["classic", "random", "hand"], help="V/W construction")
    gen.add_argument("--from", dest="source", help="Input function or set-cover file")

    compute = sub.add_parser("compute", parents=[common], help="Compute one quantity")
    compute.add_argument("quantity", help="cs, ds, ess, ess-dual, ess-k, mi, primes, min-cover, ...")
    compute.add_argument("--in", dest="source", required=True, help="Input file")
    compute.add_argument("--k", type=int, help="Independence order")
    compute.add_argument("--view", choices=[v.value for v in View], help="Point polarity")

    verify = sub.add_parser("verify", parents=[common], help="Run a verification suite")
    verify.add_argument("suite", help="lemma1, lemma2, thm1, thm3, horn-gap, bounds-corpus, ...")
    verify.add_argument("--m", type=int, help="Ground-set size")
    verify.add_argument("--m-max", type=int, help="Largest ground set for lemma1")
    verify.add_argument("--k", type=int, help="Uniformity for thm3")
    verify.add_argument("--trials", type=int, help="Random draws for lemma2")
    verify.add_argument("--n", type=int, help="Largest variable count for bounds-corpus")
    verify.add_argument("--n-max", type=int, help="Largest variable count for Horn corpora")
    verify.add_argument("--count", type=int, help="Corpus size")
    verify.add_argument(
        "--case",
        dest="cases",
        type=_case,
        action="append",
        help="Horn family case K,T (horn-gap, thm4)",
    )

    return parser.parse_args(argv)


def create_config(args) -> ToolkitConfig:
    """Create the toolkit configuration from command-line arguments."""
    return ToolkitConfig(
        max_n=args.max_n,
        force=args.force,
        seed=args.seed,
        out_dir=args.out,
        certificate_dir=args.cert_dir,
        output_format=OutputFormat(args.format),
        debug=args.debug,
        suite_config_path=args.suite_config,
    )


def build_arguments(args) -> Dict[str, Any]:
    """Subcommand flags as a params dict; unset flags are dropped by the toolkit."""
    if args.command == "gen":
        return {
            "m": args.m,
            "r": args.r,
            "pairs": args.pairs or None,
            "k": args.k,
            "t": args.t,
            "mode": args.mode,
            "source": args.source,
        }
    if args.command == "compute":
        return {"source": args.source, "k": args.k, "view": args.view}
    return {
        "m": args.m,
        "ms": [args.m] if args.m is not None else None,
        "m_max": args.m_max,
        "k": args.k,
        "trials": args.trials,
        "n": args.n,
        "n_max": args.n_max,
        "count": args.count,
        "cases": args.cases,
        "family_cases": args.cases,
    }


TARGET_ATTRIBUTES = {"gen": "family", "compute": "quantity", "verify": "suite"}


def _target(args) -> str:
    return getattr(args, TARGET_ATTRIBUTES[args.command])


def run(args) -> int:
    """Run one parsed command and return its exit code."""
    config = create_config(args)
    toolkit = EssGapToolkit(config)
    name = _target(args)
    result = toolkit.call(args.command, name, build_arguments(args))

    if isinstance(result, GenResult):
        written = toolkit.write_artifacts(result)
        summary = result.model_dump(mode="json", exclude={"artifacts"})
        summary["files"] = [str(p) for p in written]
        print(json.dumps(summary, indent=2, sort_keys=True))
        return EXIT_OK

    if isinstance(result, ComputeResult):
        toolkit.write_artifacts(result)
        print(result.value)
        return EXIT_OK

    if isinstance(result, SuiteResult):
        text = toolkit.render(result, name)
        if config.out_dir:
            out = Path(config.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{name}.{config.output_format.value}").write_text(text)
        sys.stdout.write(text)
        if not result.passed:
            logger.error(f"Suite '{name}' failed: {result.summary}")
            return EXIT_VERIFY_FAILED
        logger.info(f"Suite '{name}' passed: {result.summary}")
        return EXIT_OK

    print(toolkit.render(result, name))
    return EXIT_OK


def main(argv: Optional[List[str]] = None):
    """Main entry point for the CLI."""
    # Load environment variables from .env file
    load_dotenv()

    args = parse_args(argv)

    # Configure logging level based on debug flag
    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)
        logger.debug("Debug logging enabled.")
    else:
        logging.getLogger().setLevel(logging.INFO)

    try:
        code = run(args)
    except EssGapError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        print(json.dumps(e.to_dict(), indent=2, sort_keys=True))
        sys.exit(EXIT_ERROR)
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        print(json.dumps({"error": type(e).__name__, "message": str(e), "hint": None}, indent=2))
        sys.exit(EXIT_ERROR)
    sys.exit(code)


if __name__ == "__main__":
    main()
