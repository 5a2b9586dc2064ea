import csv
import logging
import re
from pathlib import Path
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import attr
import numpy
import pandas

from nftcast.exceptions import DimensionError
from nftcast.exceptions import ParseError

__all__ = ["LoadCsv", "LoadCsvDirectory", "RawSeries", "WriteCsv"]

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

TIMESTAMP_COLUMN = "timestamp"


def _ReadOnly(value: numpy.ndarray) -> numpy.ndarray:
    value = numpy.array(value, order="C")
    value.flags.writeable = False
    return value


@attr.s(auto_attribs=True, frozen=True)
class RawSeries:
    """
    One multivariate series of M variables over T time steps.

    :ivar id:
        Series label (e.g. the patient, melody or station). For series read from a directory,
        the file stem.

    :ivar names:
        The M variable labels.

    :ivar values:
        [M × T] float64. Missing entries hold NaN.

    :ivar mask:
        [M × T] bool, True where the value is missing.
    """

    id: str
    names: Tuple[str, ...] = attr.ib(converter=tuple)
    values: numpy.ndarray = attr.ib(
        converter=lambda v: _ReadOnly(numpy.asarray(v, dtype=numpy.float64)), eq=False
    )
    mask: numpy.ndarray = attr.ib(
        default=None,
        converter=attr.converters.optional(lambda v: _ReadOnly(numpy.asarray(v, dtype=bool))),
        eq=False,
    )

    def __attrs_post_init__(self) -> None:
        if self.values.ndim != 2 or self.values.shape[1] < 1:
            raise DimensionError(
                "RawSeries", self.values.shape, detail="expected [M × T] with T ≥ 1"
            )
        if len(self.names) != self.values.shape[0]:
            raise DimensionError("RawSeries", (len(self.names),), self.values.shape)
        if self.mask is None:
            object.__setattr__(self, "mask", _ReadOnly(numpy.isnan(self.values)))
        elif self.mask.shape != self.values.shape:
            raise DimensionError("RawSeries", self.values.shape, self.mask.shape)
        else:
            mask = self.mask | numpy.isnan(self.values)
            object.__setattr__(self, "mask", _ReadOnly(mask))
            object.__setattr__(self, "values", _ReadOnly(numpy.where(mask, numpy.nan, self.values)))

    def GetVariables(self) -> int:
        return self.values.shape[0]

    variables = property(GetVariables)

    def GetLength(self) -> int:
        return self.values.shape[1]

    length = property(GetLength)

    def HasMissing(self) -> bool:
        return bool(self.mask.any())

    def WithValues(
        self, values: numpy.ndarray, mask: Optional[numpy.ndarray] = None
    ) -> "RawSeries":
        """
        :returns:
            A copy of this series with new values (and mask, derived from NaN entries when not
            given).
        """
        return RawSeries(self.id, self.names, values, mask)


def _ParseCell(cell: str) -> Optional[float]:
    if not cell.strip():
        return None
    return float(cell)


def LoadCsv(path: PathLike, series_id: Optional[str] = None) -> RawSeries:
    """
    Reads one series from a CSV file with a header row of variable names and one row per time
    step.

    A leading timestamp column is detected (header "timestamp", or a first data cell that is not a
    number) and dropped. Empty cells become missing entries.

    :param series_id:
        Defaults to the file stem.

    :raises ParseError:
        If the file cannot be read, a row is ragged, a cell is not a number, or there are no
        variables or no rows.
    """
    path = Path(path)
    if not path.is_file():
        raise ParseError(path, "file not found")
    try:
        frame = pandas.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=True)
    except pandas.errors.EmptyDataError:
        raise ParseError(path, "file is empty") from None
    except pandas.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        line = int(match.group(1)) if match else None
        raise ParseError(path, "ragged row (wrong number of fields)", line) from None
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(path, f"cannot read file: {e}") from None

    columns = [str(c).strip() for c in frame.columns]
    if frame.shape[0] == 0:
        raise ParseError(path, "no data rows")

    _CheckFieldCounts(path, len(columns))

    cells = frame.to_numpy()
    if columns and (columns[0].lower() == TIMESTAMP_COLUMN or not _IsNumber(cells[0, 0])):
        columns = columns[1:]
        cells = cells[:, 1:]
    if not columns:
        raise ParseError(path, "no variables")

    values = numpy.empty(cells.shape, dtype=numpy.float64)
    for row in range(cells.shape[0]):
        for col in range(cells.shape[1]):
            try:
                value = _ParseCell(cells[row, col])
            except ValueError:
                raise ParseError(
                    path, f"invalid number {cells[row, col]!r} in column {columns[col]!r}", row + 2
                ) from None
            values[row, col] = numpy.nan if value is None else value

    values[~numpy.isfinite(values)] = numpy.nan
    series = RawSeries(series_id or path.stem, columns, values.T)
    logger.debug(
        "Loaded %s: %d variables, %d steps, %d missing",
        path,
        series.variables,
        series.length,
        int(series.mask.sum()),
    )
    return series


def _CheckFieldCounts(path: Path, expected: int) -> None:
    """
    Every non-blank row must have as many fields as the header; `read_csv` pads short rows with
    empty cells.
    """
    with path.open(newline="") as stream:
        reader = csv.reader(stream)
        next(reader, None)
        for row in reader:
            if row and len(row) != expected:
                raise ParseError(
                    path,
                    f"ragged row (expected {expected} fields, got {len(row)})",
                    reader.line_num,
                )


def _IsNumber(cell: str) -> bool:
    try:
        _ParseCell(cell)
    except ValueError:
        return False
    return True


def LoadCsvDirectory(path: PathLike) -> List[RawSeries]:
    """
    Reads every `*.csv` file of a directory as one series (series id = file stem), sorted by
    file name.

    :raises ParseError:
        If the directory has no CSV file or the files disagree on the variable names.
    """
    path = Path(path)
    if not path.is_dir():
        raise ParseError(path, "directory not found")
    files = sorted(path.glob("*.csv"))
    if not files:
        raise ParseError(path, "no CSV files in directory")

    result = [LoadCsv(f) for f in files]
    for f, series in zip(files, result):
        if series.names != result[0].names:
            raise ParseError(
                f, f"variables {list(series.names)} differ from {list(result[0].names)}"
            )
    return result


def WriteCsv(
    series: RawSeries, path: PathLike, time_index: Optional[Sequence[int]] = None
) -> None:
    """
    Writes a series in the format read by `LoadCsv`; missing entries are written as empty
    cells. Floats are written with their shortest exact representation.

    :param time_index:
        When given, written as a leading "timestamp" column.
    """
    frame = pandas.DataFrame(series.values.T, columns=list(series.names))
    if time_index is not None:
        frame.insert(0, TIMESTAMP_COLUMN, list(time_index))
    frame.to_csv(Path(path), index=False, na_rep="", lineterminator="\n")
