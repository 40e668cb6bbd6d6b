"""Binary checkpoint format for long runs.

Layout (all integers little-endian):
    8 bytes  magic  "SANDCUB1"
    u32      format version (currently 1)
    u32      d
    u64      N
    i64      background k
    u64      step t
    payload  simplex-ranked odometer, u64 x simplex_size
"""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import CorruptCheckpointError
from .lattice import CubeSpec, simplex_size

MAGIC = b"SANDCUB1"
VERSION = 1
_HEADER = struct.Struct("<8sIIQqQ")


@dataclass
class Checkpoint:
    spec: CubeSpec
    background: int
    t: int
    v: np.ndarray


def save_checkpoint(path, spec: CubeSpec, background: int, t: int, v: np.ndarray) -> None:
    v = np.ascontiguousarray(v, dtype="<u8")
    if v.shape != (simplex_size(spec),):
        raise ValueError(
            f"payload has {v.shape} entries, expected {simplex_size(spec)}"
        )
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, spec.d, spec.N, background, t))
        f.write(v.tobytes())


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _HEADER.size:
        raise CorruptCheckpointError(f"file too short for header: {len(raw)} bytes")
    magic, version, d, N, k, t = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CorruptCheckpointError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise CorruptCheckpointError(f"unsupported version {version}, expected {VERSION}")
    spec = CubeSpec(d, N)
    want = simplex_size(spec) * 8
    payload = raw[_HEADER.size:]
    if len(payload) != want:
        raise CorruptCheckpointError(
            f"payload is {len(payload)} bytes, expected {want} for (d={d}, N={N})"
        )
    v = np.frombuffer(payload, dtype="<u8").astype(np.int64)
    return Checkpoint(spec, k, t, v)
