"""
Evaluation statistics: improvement percentages, Pearson correlation, paired t-tests and the
report files they are computed from.
"""

from ._report import Comparison
from ._report import CompareHorizonSweep
from ._report import CompareReports
from ._report import GetForecastLength
from ._report import HorizonSweep
from ._report import LoadReport
from ._report import MetricsReport
from ._report import WriteComparison
from ._report import WriteHorizonSweep
from ._report import WriteReport
from ._stats import ImprovementPercent
from ._stats import PairedTTest
from ._stats import PearsonCorrelation
from ._stats import StudentTTwoSidedPValue
from ._stats import TTestResult

__all__ = [
    "Comparison",
    "CompareHorizonSweep",
    "CompareReports",
    "GetForecastLength",
    "HorizonSweep",
    "ImprovementPercent",
    "LoadReport",
    "MetricsReport",
    "PairedTTest",
    "PearsonCorrelation",
    "StudentTTwoSidedPValue",
    "TTestResult",
    "WriteComparison",
    "WriteHorizonSweep",
    "WriteReport",
]
