import argparse
import logging
import sys
from typing import List
from typing import Optional

import attr

from nftcast.exceptions import CheckpointError
from nftcast.exceptions import ComparisonError
from nftcast.exceptions import CompatibilityError
from nftcast.exceptions import ConfigurationError
from nftcast.exceptions import ImputationError
from nftcast.exceptions import ParseError

from ._commands import CmdCompare
from ._commands import CmdCompareHorizons
from ._commands import CmdDecompose
from ._commands import CmdEval
from ._commands import CmdForecast
from ._commands import CmdSynth
from ._commands import CmdTrain
from ._config import LoadRunConfig
from ._config import RunConfig

__all__ = ["EXIT_INTERNAL_ERROR", "EXIT_OK", "EXIT_USER_ERROR", "main"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL_ERROR = 1
EXIT_USER_ERROR = 2

# Errors caused by the command line, the config or the input files.
USER_ERRORS = (
    CheckpointError,
    ComparisonError,
    CompatibilityError,
    ConfigurationError,
    FileNotFoundError,
    ImputationError,
    ParseError,
)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _BuildParser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nftcast", description="Multivariate forecasting with basis-expansion networks."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    def AddCommand(name: str, help: str, config: bool = True) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help, description=help)
        if config:
            sub.add_argument("--config", help="run configuration file (defaults when omitted)")
            sub.add_argument("--seed", type=int, help="override the config seed")
        sub.add_argument("--out", help="output directory (default: the config out_dir)")
        return sub

    AddCommand("train", "train a model and save its best checkpoint")

    sub = AddCommand("eval", "write a per-horizon metrics report for a checkpoint")
    sub.add_argument("checkpoint")
    sub.add_argument("--split", choices=("test", "val", "train"), default="test")
    sub.add_argument("--method", default="nft", help="method name recorded in the report")

    sub = AddCommand("forecast", "forecast the steps following a series")
    sub.add_argument("checkpoint")
    sub.add_argument("--input", help="CSV series to forecast (default: the config data)")

    sub = AddCommand("decompose", "split a forecast into its stack components")
    sub.add_argument("checkpoint")
    sub.add_argument("--input", help="CSV series to forecast (default: the config data)")
    sub.add_argument(
        "--coefficients", action="store_true", help="also write the blocks' basis coefficients"
    )

    AddCommand("synth", "write synthetic series and their generator parameters")

    sub = AddCommand("compare", "compare a model report against a baseline report", config=False)
    sub.add_argument("report_a", help="metrics report of the model")
    sub.add_argument("report_b", help="metrics report of the baseline")

    sub = AddCommand(
        "compare-horizons",
        "compare models trained for several horizons against the best baseline of each",
        config=False,
    )
    sub.add_argument("--model", nargs="+", required=True, help="metrics reports of the model")
    sub.add_argument(
        "--baseline", nargs="+", required=True, help="metrics reports of the baselines"
    )
    return parser


def _ConfigureLogging(verbose: bool) -> logging.Handler:
    package_logger = logging.getLogger("nftcast")
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    package_logger.addHandler(handler)
    package_logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    return handler


def _LoadConfig(args: argparse.Namespace) -> RunConfig:
    config = LoadRunConfig(args.config) if args.config else RunConfig()
    if args.seed is not None:
        config = attr.evolve(config, seed=args.seed)
    return config


def _Run(args: argparse.Namespace) -> None:
    if args.command == "compare":
        CmdCompare(args.report_a, args.report_b, args.out or RunConfig().out_dir)
        return
    if args.command == "compare-horizons":
        CmdCompareHorizons(args.model, args.baseline, args.out or RunConfig().out_dir)
        return

    config = _LoadConfig(args)
    out_dir = args.out or config.out_dir
    if args.command == "train":
        CmdTrain(config, out_dir)
    elif args.command == "eval":
        CmdEval(args.checkpoint, config, out_dir, split=args.split, method=args.method)
    elif args.command == "forecast":
        CmdForecast(args.checkpoint, config, out_dir, input_path=args.input)
    elif args.command == "decompose":
        CmdDecompose(
            args.checkpoint, config, out_dir, input_path=args.input, coefficients=args.coefficients
        )
    else:
        assert args.command == "synth", args.command
        CmdSynth(config, out_dir)


def _ReportError(error: BaseException) -> None:
    cause = " ".join(str(error).split()) or type(error).__name__
    print(f"nftcast: error: {cause}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Entry point of the ``nftcast`` command.

    :returns:
        The exit code: 0 on success, 2 for errors in the command line, config or inputs, 1 for
        any other failure.
    """
    parser = _BuildParser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USER_ERROR

    handler = _ConfigureLogging(args.verbose)
    try:
        _Run(args)
    except USER_ERRORS as e:
        _ReportError(e)
        return EXIT_USER_ERROR
    except Exception as e:
        logger.debug("Command %s failed", args.command, exc_info=True)
        _ReportError(e)
        return EXIT_INTERNAL_ERROR
    finally:
        logging.getLogger("nftcast").removeHandler(handler)
    return EXIT_OK
