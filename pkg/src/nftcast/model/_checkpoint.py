"""
Checkpoint files.

Layout (version 1)::

    NFTCAST-CHECKPOINT 1\\n
    config <model config as JSON, sorted keys>\\n
    stats <preprocessing statistics as JSON, or null>\\n
    parameters <count>\\n
    then, for each parameter in model order:
        <id> <comma separated shape> <byte count>\\n
        <raw little-endian float64 values, row-major>\\n

The text lines are ASCII. Given the same model the file is byte-identical, since nothing in it
depends on time or on the machine.
"""

import json
import logging
from pathlib import Path
from typing import BinaryIO
from typing import List
from typing import Optional
from typing import Tuple
from typing import Union

import attr
import numpy

from nftcast.data import PreprocessStats
from nftcast.exceptions import CheckpointError
from nftcast.exceptions import ConfigurationError

from ._model import BuildModel
from ._model import ModelConfig
from ._model import NFTModel

__all__ = ["CHECKPOINT_VERSION", "Checkpoint", "LoadCheckpoint", "SaveCheckpoint"]

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = "NFTCAST-CHECKPOINT"
CHECKPOINT_VERSION = 1
_DTYPE = numpy.dtype("<f8")


@attr.s(auto_attribs=True, frozen=True)
class Checkpoint:
    """
    :ivar stats:
        Statistics used to standardize the training data, needed to map forecasts back to the
        raw scale.
    """

    model: NFTModel
    stats: Optional[PreprocessStats] = None


def _WriteLine(stream: BinaryIO, line: str) -> None:
    stream.write(line.encode("ascii") + b"\n")


def SaveCheckpoint(
    path: Union[str, Path], model: NFTModel, stats: Optional[PreprocessStats] = None
) -> None:
    params = model.GetParameters()
    config_json = json.dumps(model.config.ToDict(), sort_keys=True)
    stats_json = json.dumps(None if stats is None else stats.ToDict(), sort_keys=True)
    with open(path, "wb") as stream:
        _WriteLine(stream, f"{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}")
        _WriteLine(stream, f"config {config_json}")
        _WriteLine(stream, f"stats {stats_json}")
        _WriteLine(stream, f"parameters {len(params)}")
        for param in params:
            raw = numpy.ascontiguousarray(param.value, dtype=_DTYPE).tobytes()
            shape = ",".join(str(s) for s in param.shape)
            _WriteLine(stream, f"{param.id} {shape} {len(raw)}")
            stream.write(raw)
            stream.write(b"\n")
    logger.debug("Saved checkpoint with %d parameters to %s", len(params), path)


class _Reader:
    def __init__(self, path: Union[str, Path], contents: bytes) -> None:
        self.path = path
        self.contents = contents
        self.position = 0

    def Fail(self, reason: str) -> CheckpointError:
        return CheckpointError(f"{self.path}: {reason}")

    def ReadLine(self) -> str:
        end = self.contents.find(b"\n", self.position)
        if end < 0:
            raise self.Fail("unexpected end of file")
        line = self.contents[self.position : end]
        self.position = end + 1
        try:
            return line.decode("ascii")
        except UnicodeDecodeError:
            raise self.Fail("malformed header line")

    def ReadField(self, name: str) -> str:
        line = self.ReadLine()
        key, _, value = line.partition(" ")
        if key != name:
            raise self.Fail(f"expected {name!r}, got {key!r}")
        return value

    def ReadBytes(self, count: int) -> bytes:
        end = self.position + count
        if end + 1 > len(self.contents) or self.contents[end : end + 1] != b"\n":
            raise self.Fail("truncated parameter data")
        data = self.contents[self.position : end]
        self.position = end + 1
        return data


def _ParseParameterHeader(reader: _Reader, line: str) -> Tuple[str, Tuple[int, ...], int]:
    try:
        id, shape_str, count_str = line.split(" ")
        shape = tuple(int(s) for s in shape_str.split(",")) if shape_str else ()
        return id, shape, int(count_str)
    except ValueError:
        raise reader.Fail(f"malformed parameter header {line!r}")


def LoadCheckpoint(path: Union[str, Path]) -> Checkpoint:
    """
    Rebuilds the model recorded in a checkpoint and restores its parameter values.

    :raises FileNotFoundError:
        If the file does not exist.

    :raises CheckpointError:
        If the file is malformed, of another version, or its parameters do not match the
        recorded configuration.
    """
    reader = _Reader(path, Path(path).read_bytes())

    magic, _, version = reader.ReadLine().partition(" ")
    if magic != CHECKPOINT_MAGIC:
        raise reader.Fail("not a nftcast checkpoint")
    if version != str(CHECKPOINT_VERSION):
        raise reader.Fail(
            f"unsupported checkpoint version {version!r} (expected {CHECKPOINT_VERSION})"
        )

    try:
        config = ModelConfig.FromDict(json.loads(reader.ReadField("config")))
        stats_contents = json.loads(reader.ReadField("stats"))
    except (ValueError, TypeError, ConfigurationError) as e:
        raise reader.Fail(f"invalid header: {e}")
    stats = None if stats_contents is None else PreprocessStats.FromDict(stats_contents)

    model = BuildModel(config)
    params = model.GetParameters()
    try:
        count = int(reader.ReadField("parameters"))
    except ValueError:
        raise reader.Fail("invalid parameter count")
    if count != len(params):
        raise reader.Fail(f"has {count} parameters, the recorded model needs {len(params)}")

    values: List[numpy.ndarray] = []
    for param in params:
        id, shape, byte_count = _ParseParameterHeader(reader, reader.ReadLine())
        if id != param.id or shape != param.shape:
            raise reader.Fail(
                f"parameter {id!r} {list(shape)} does not match {param.id!r} {list(param.shape)}"
            )
        if byte_count != _DTYPE.itemsize * int(numpy.prod(shape, dtype=int)):
            raise reader.Fail(f"parameter {id!r} has an inconsistent byte count")
        values.append(numpy.frombuffer(reader.ReadBytes(byte_count), dtype=_DTYPE).reshape(shape))

    if reader.position != len(reader.contents):
        raise reader.Fail("trailing data after the last parameter")
    for param, value in zip(params, values):
        param.SetValue(value)
    return Checkpoint(model, stats)
