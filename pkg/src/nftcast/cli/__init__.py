"""
Command-line entry points: train, eval, forecast, decompose, synth, compare and
compare-horizons.
"""

from ._commands import CHECKPOINT_FILE
from ._commands import COEFFICIENTS_FILE
from ._commands import COMPARISON_FILE
from ._commands import CONFIG_ECHO_FILE
from ._commands import DECOMPOSITION_FILE
from ._commands import FORECAST_FILE
from ._commands import HISTORY_FILE
from ._commands import HORIZON_SWEEP_FILE
from ._commands import REPORT_FILE
from ._commands import SYNTH_DATA_FILE
from ._commands import SYNTH_SERIES_DIR
from ._commands import SYNTH_SPEC_FILE
from ._commands import CmdCompare
from ._commands import CmdCompareHorizons
from ._commands import CmdDecompose
from ._commands import CmdEval
from ._commands import CmdForecast
from ._commands import CmdSynth
from ._commands import CmdTrain
from ._commands import DrawRunSynthSpec
from ._commands import LoadRunDataset
from ._commands import LoadRunSeries
from ._config import DumpRunConfig
from ._config import LoadRunConfig
from ._config import RunConfig
from ._main import EXIT_INTERNAL_ERROR
from ._main import EXIT_OK
from ._main import EXIT_USER_ERROR
from ._main import main

__all__ = [
    "CHECKPOINT_FILE",
    "COEFFICIENTS_FILE",
    "COMPARISON_FILE",
    "CONFIG_ECHO_FILE",
    "CmdCompare",
    "CmdCompareHorizons",
    "CmdDecompose",
    "CmdEval",
    "CmdForecast",
    "CmdSynth",
    "CmdTrain",
    "DECOMPOSITION_FILE",
    "DrawRunSynthSpec",
    "DumpRunConfig",
    "EXIT_INTERNAL_ERROR",
    "EXIT_OK",
    "EXIT_USER_ERROR",
    "FORECAST_FILE",
    "HISTORY_FILE",
    "HORIZON_SWEEP_FILE",
    "LoadRunConfig",
    "LoadRunDataset",
    "LoadRunSeries",
    "REPORT_FILE",
    "RunConfig",
    "SYNTH_DATA_FILE",
    "SYNTH_SERIES_DIR",
    "SYNTH_SPEC_FILE",
    "main",
]
