"""The ``.volt`` tensor container.

Layout: 4-byte magic ``VOLT``, a little-endian u32 header length, a UTF-8
JSON header ``{"dtype":"f32","shape":[...],"order":"row-major","kind":...}``
and the raw little-endian float32 payload in row-major order. ``kind`` is
``"volume"`` (rank 4), ``"image"`` (rank 3, channels last) or ``"mask"``
(rank 3, H x W x D occupancy). Round trips are bit-exact.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .tensor import Image, Volume
from .voxelize import PartMask

__all__ = ["read_volt", "write_volt", "MAGIC"]

MAGIC = b"VOLT"

_KINDS = {"volume": 4, "image": 3, "mask": 3}


def _kind_of(tensor) -> str:
    if isinstance(tensor, Volume):
        return "volume"
    if isinstance(tensor, PartMask):
        return "mask"
    if isinstance(tensor, Image):
        return "image"
    raise TypeError(f"cannot serialize {type(tensor).__name__} as a volt tensor")


def write_volt(path, tensor) -> None:
    """Write a Volume, Image, or PartMask to ``path`` bit-exactly."""
    kind = _kind_of(tensor)
    data = tensor.data
    header = json.dumps(
        {
            "dtype": "f32",
            "shape": list(data.shape),
            "order": "row-major",
            "kind": kind,
        },
        separators=(",", ":"),
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(np.ascontiguousarray(data, dtype="<f4").tobytes())


def _reject_constant(token):
    raise ValueError(f"volt header must not contain {token}")


def read_volt(path):
    """Read a ``.volt`` file back into a Volume, Image, or PartMask."""
    blob = Path(path).read_bytes()
    if len(blob) < 8:
        raise ValueError(f"{path}: file too short for a volt header")
    if blob[:4] != MAGIC:
        raise ValueError(f"{path}: bad magic {blob[:4]!r}, expected {MAGIC!r}")
    (hlen,) = struct.unpack("<I", blob[4:8])
    if len(blob) < 8 + hlen:
        raise ValueError(f"{path}: truncated header")
    try:
        header = json.loads(
            blob[8 : 8 + hlen].decode("utf-8"), parse_constant=_reject_constant
        )
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ValueError(f"{path}: malformed volt header: {exc}") from None
    if not isinstance(header, dict):
        raise ValueError(f"{path}: volt header must be a JSON object")
    if header.get("dtype") != "f32":
        raise ValueError(f"{path}: unsupported dtype {header.get('dtype')!r}")
    if header.get("order") != "row-major":
        raise ValueError(f"{path}: unsupported order {header.get('order')!r}")
    kind = header.get("kind")
    if kind not in _KINDS:
        raise ValueError(f"{path}: unknown kind {kind!r}")
    shape = header.get("shape")
    if (
        not isinstance(shape, list)
        or not shape
        or any(isinstance(s, bool) or not isinstance(s, int) or s < 1 for s in shape)
    ):
        raise ValueError(f"{path}: invalid shape {shape!r}")
    if len(shape) != _KINDS[kind]:
        raise ValueError(f"{path}: kind {kind!r} requires rank {_KINDS[kind]}, got {len(shape)}")
    payload = blob[8 + hlen :]
    expected = 4 * int(np.prod(shape))
    if len(payload) != expected:
        raise ValueError(
            f"{path}: payload holds {len(payload)} bytes, header shape needs {expected}"
        )
    arr = np.frombuffer(payload, dtype="<f4").reshape(shape)
    if kind == "volume":
        return Volume(arr)
    if kind == "mask":
        return PartMask(arr)
    return Image(arr)
