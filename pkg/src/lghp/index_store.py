"""The in-memory dataset index and its versioned binary file format.

Layout (all integers little-endian, counts unsigned 32-bit):

    magic             8 bytes  b"LGHPIDX1"
    version           u32      currently 1
    kind              u8       0 = lghp, 1 = lbp
    radius_limit      u32
    side              u32
    binning           u8       0 = full-512, 1 = paper-256, 2 = u2
    grid              u32
    gabor kernels     u32      0 when Gabor is off
      per kernel: frequency f64, sigma_s f64, sigma_t f64, orientation u32
    descriptor length u64
    entry count       u64
    per entry:
      label           u32
      path            u32 byte length + UTF-8 bytes
      counts          descriptor length x u32

Files are immutable once written; the writer goes through a temp file and an
atomic rename. Raw counts are stored, not normalized floats, so L1 matching
stays exact.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import (
    BINNING_KINDS,
    DESCRIPTOR_KINDS,
    Descriptor,
    ExtractionConfig,
    GaborSpec,
    LghpParams,
)
from .errors import (
    BadMagicError,
    CorruptFileError,
    InvalidParameterError,
    IoError,
    UnsupportedVersionError,
)

MAGIC = b"LGHPIDX1"
VERSION = 1


@dataclass(eq=False)
class DatasetIndex:
    """Ordered (label, path, descriptor) triples under one extraction config.

    Row position is the image id: dense, 0-based.
    """

    labels: np.ndarray
    paths: tuple[str, ...]
    matrix: np.ndarray
    config: ExtractionConfig

    def __post_init__(self) -> None:
        if self.matrix.ndim != 2:
            raise InvalidParameterError("descriptor matrix must be 2-D")
        n = self.matrix.shape[0]
        if len(self.labels) != n or len(self.paths) != n:
            raise InvalidParameterError("labels, paths and matrix rows must agree")
        if self.matrix.shape[1] != self.config.descriptor_length:
            raise InvalidParameterError(
                f"descriptor length {self.matrix.shape[1]} does not match config "
                f"({self.config.descriptor_length})"
            )

    def __len__(self) -> int:
        return self.matrix.shape[0]

    def descriptor(self, image_id: int) -> Descriptor:
        return Descriptor(self.matrix[image_id], self.config)


def _config_bytes(config: ExtractionConfig) -> bytes:
    p = config.params
    parts = [
        struct.pack(
            "<BIIBI",
            DESCRIPTOR_KINDS.index(config.kind),
            p.radius_limit,
            p.side,
            BINNING_KINDS.index(p.binning),
            p.grid,
        ),
        struct.pack("<I", len(config.gabor_bank)),
    ]
    for spec in config.gabor_bank:
        parts.append(
            struct.pack("<dddI", spec.frequency, spec.sigma_s, spec.sigma_t, spec.orientation)
        )
    return b"".join(parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise CorruptFileError("index file truncated")
        vals = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return vals

    def take_bytes(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise CorruptFileError("index file truncated")
        out = self.data[self.pos : self.pos + size]
        self.pos += size
        return out


def save_index(index: DatasetIndex, path: str | Path) -> None:
    """Serialize to the binary layout above; deterministic byte-for-byte."""
    if index.matrix.size and (index.matrix.min() < 0 or index.matrix.max() >= 2**32):
        raise IoError("descriptor counts do not fit in unsigned 32-bit storage")
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", VERSION))
            fh.write(_config_bytes(index.config))
            fh.write(struct.pack("<QQ", index.config.descriptor_length, len(index)))
            for i in range(len(index)):
                encoded = index.paths[i].encode("utf-8")
                fh.write(struct.pack("<II", int(index.labels[i]), len(encoded)))
                fh.write(encoded)
                fh.write(index.matrix[i].astype("<u4").tobytes())
        os.replace(tmp, path)
    except OSError as exc:
        tmp.unlink(missing_ok=True)
        raise IoError(f"cannot write index file {path}: {exc}") from exc


def load_index(path: str | Path) -> DatasetIndex:
    """Read and validate an index file written by save_index."""
    try:
        data = Path(path).read_bytes()
    except FileNotFoundError:
        raise
    except OSError as exc:
        raise IoError(f"cannot read index file {path}: {exc}") from exc

    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise BadMagicError(f"not an index file: {path}")
    r = _Reader(data)
    r.take_bytes(len(MAGIC))
    (version,) = r.take("<I")
    if version != VERSION:
        raise UnsupportedVersionError(f"index version {version} not supported")

    kind_code, radius, side, binning_code, grid = r.take("<BIIBI")
    if kind_code >= len(DESCRIPTOR_KINDS) or binning_code >= len(BINNING_KINDS):
        raise CorruptFileError("unknown descriptor kind or binning code")
    (n_kernels,) = r.take("<I")
    bank = []
    for _ in range(n_kernels):
        freq, ss, st, orient = r.take("<dddI")
        try:
            bank.append(GaborSpec(freq, ss, st, int(orient)))
        except InvalidParameterError as exc:
            raise CorruptFileError(f"invalid Gabor parameters in header: {exc}") from exc
    try:
        config = ExtractionConfig(
            kind=DESCRIPTOR_KINDS[kind_code],
            params=LghpParams(radius, side, BINNING_KINDS[binning_code], grid),
            gabor_bank=tuple(bank),
        )
    except InvalidParameterError as exc:
        raise CorruptFileError(f"invalid extraction config in header: {exc}") from exc

    length, count = r.take("<QQ")
    if length != config.descriptor_length:
        raise CorruptFileError(
            f"declared descriptor length {length} does not match config "
            f"({config.descriptor_length})"
        )
    # cheapest possible entry is label + empty path + counts; reject oversized
    # declared counts before allocating anything
    min_record = 8 + 4 * length
    if count * min_record > len(data) - r.pos:
        raise CorruptFileError(
            f"declared entry count {count} exceeds what the file can hold"
        )
    labels = np.zeros(count, dtype=np.int64)
    paths = []
    matrix = np.zeros((count, length), dtype=np.int64)
    for i in range(count):
        label, path_len = r.take("<II")
        raw = r.take_bytes(path_len)
        try:
            paths.append(raw.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise CorruptFileError("entry path is not valid UTF-8") from exc
        counts = np.frombuffer(r.take_bytes(4 * length), dtype="<u4")
        labels[i] = label
        matrix[i] = counts
    if r.pos != len(data):
        raise CorruptFileError(f"{len(data) - r.pos} trailing bytes in index file")
    return DatasetIndex(labels, tuple(paths), matrix, config)
