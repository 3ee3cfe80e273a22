"""Minimal NPY v1.0 writer/reader for float64 C-order arrays.

Layout, fixed byte for byte so any NPY implementation interoperates:
magic ``\\x93NUMPY``, version bytes (1, 0), little-endian uint16 header
length, then the ASCII header dict ``{'descr': '<f8', 'fortran_order':
False, 'shape': (...), }`` padded with spaces so the payload starts on a
64-byte boundary, terminated by a newline, followed by the raw
little-endian float64 payload.
"""

from __future__ import annotations

import ast
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError

MAGIC = b"\x93NUMPY"
VERSION = (1, 0)
ALIGN = 64


def _header_bytes(shape: tuple[int, ...]) -> bytes:
    header = "{'descr': '<f8', 'fortran_order': False, 'shape': %s, }" % (
        repr(tuple(int(n) for n in shape)),
    )
    base = len(MAGIC) + 2 + 2
    pad = ALIGN - (base + len(header) + 1) % ALIGN
    if pad == ALIGN:
        pad = 0
    header = header + " " * pad + "\n"
    if len(header) > 0xFFFF:
        raise FormatError("header too long for NPY v1.0", base)
    return struct.pack("<BB", *VERSION) + struct.pack("<H", len(header)) \
        + header.encode("latin1")


def array_bytes(array: np.ndarray) -> bytes:
    """Serialize a float64 array to NPY v1.0 bytes."""
    a = np.asarray(array, dtype="<f8")
    # ascontiguousarray would promote 0-d arrays to 1-d; keep the shape.
    payload = np.ascontiguousarray(a).tobytes()
    return MAGIC + _header_bytes(a.shape) + payload


def save_array(path, array: np.ndarray) -> None:
    Path(path).write_bytes(array_bytes(array))


def parse_array(data: bytes) -> np.ndarray:
    """Parse NPY v1.0 bytes; validates magic, version, header and size."""
    if data[: len(MAGIC)] != MAGIC:
        raise FormatError("bad NPY magic", 0)
    if len(data) < len(MAGIC) + 4:
        raise FormatError("truncated NPY prelude", len(data))
    major, minor = data[6], data[7]
    if (major, minor) != VERSION:
        raise FormatError(f"unsupported NPY version {(major, minor)}", 6)
    (hlen,) = struct.unpack_from("<H", data, 8)
    header_end = 10 + hlen
    if len(data) < header_end:
        raise FormatError("truncated NPY header", len(data))
    try:
        header = ast.literal_eval(data[10:header_end].decode("latin1"))
    except (ValueError, SyntaxError) as exc:
        raise FormatError(f"unparseable NPY header: {exc}", 10) from None
    if not isinstance(header, dict) or set(header) != {
        "descr", "fortran_order", "shape",
    }:
        raise FormatError("NPY header must have exactly descr/fortran_order/shape", 10)
    if header["descr"] != "<f8":
        raise FormatError(f"unsupported descr {header['descr']!r}; need '<f8'", 10)
    if header["fortran_order"] is not False:
        raise FormatError("fortran_order arrays are not supported", 10)
    shape = header["shape"]
    if not isinstance(shape, tuple) or not all(
        isinstance(n, int) and n >= 0 for n in shape
    ):
        raise FormatError(f"bad shape {shape!r}", 10)
    count = 1
    for n in shape:
        count *= n
    expected = count * 8
    if len(data) - header_end != expected:
        raise FormatError(
            f"payload is {len(data) - header_end} bytes, shape {shape} "
            f"needs {expected}",
            header_end,
        )
    return np.frombuffer(data, dtype="<f8", offset=header_end).reshape(shape).copy()


def load_array(path) -> np.ndarray:
    return parse_array(Path(path).read_bytes())
