"""
Data pipeline: CSV ingestion, preprocessing (IQR outliers, mean imputation, standardization),
windowing, the two evaluation protocols and a synthetic generator.
"""

from ._preprocess import ComputeStats
from ._preprocess import Destandardize
from ._preprocess import ImputeMean
from ._preprocess import PreprocessSeries
from ._preprocess import PreprocessStats
from ._preprocess import RemoveOutliersIqr
from ._preprocess import Standardize
from ._preprocess import TrainRegion
from ._series import LoadCsv
from ._series import LoadCsvDirectory
from ._series import RawSeries
from ._series import WriteCsv
from ._synth import DrawSynthSpec
from ._synth import GenerateSeriesList
from ._synth import LoadSynthSpec
from ._synth import NoiseFloorMse
from ._synth import SynthGenerate
from ._synth import SynthSpec
from ._synth import WriteSynthSpec
from ._windows import SPLITS
from ._windows import AssignSeriesProtocol2
from ._windows import BuildDataset
from ._windows import MakeWindows
from ._windows import Protocol1Boundaries
from ._windows import Split
from ._windows import SplitProtocol1
from ._windows import SplitProtocol2
from ._windows import SplitSpec
from ._windows import Window
from ._windows import WindowedDataset

__all__ = [
    "AssignSeriesProtocol2",
    "BuildDataset",
    "ComputeStats",
    "Destandardize",
    "DrawSynthSpec",
    "GenerateSeriesList",
    "ImputeMean",
    "LoadCsv",
    "LoadCsvDirectory",
    "LoadSynthSpec",
    "MakeWindows",
    "NoiseFloorMse",
    "PreprocessSeries",
    "PreprocessStats",
    "Protocol1Boundaries",
    "RawSeries",
    "RemoveOutliersIqr",
    "SPLITS",
    "Split",
    "SplitProtocol1",
    "SplitProtocol2",
    "SplitSpec",
    "Standardize",
    "SynthGenerate",
    "SynthSpec",
    "TrainRegion",
    "Window",
    "WindowedDataset",
    "WriteCsv",
    "WriteSynthSpec",
]
