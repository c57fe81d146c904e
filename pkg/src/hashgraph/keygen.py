"""Deterministic key generators and the binary key-file format.

Two input kinds are supported: the sequence ``1..n`` and uniform draws over
``[1, K]`` with ``K = max(1, round(n / R))`` so that each key of the range
appears ``R`` times on average. ``R`` below one (for example
``Fraction(1, 8)``) widens the range past ``n``.

Random draws use numpy's PCG64 bit generator, seeded with ``spec.seed``.

Key files are ``b"HGKEYS01"``, a little-endian uint64 count, then that many
little-endian uint64 keys.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

MAGIC = b"HGKEYS01"
_HEADER = struct.Struct("<8sQ")

SEQUENCE = "sequence"
UNIFORM = "uniform_multiplicity"


class KeyFileError(ValueError):
    """A key file is truncated, has the wrong magic, or an inconsistent length."""


@dataclass(frozen=True)
class KeySpec:
    kind: str
    n: int
    multiplicity: Fraction | float | int = 1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (SEQUENCE, UNIFORM):
            raise ValueError(f"unknown key kind {self.kind!r}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.kind == UNIFORM and not self.multiplicity > 0:
            raise ValueError(f"multiplicity must be positive, got {self.multiplicity}")

    @classmethod
    def sequence(cls, n: int) -> KeySpec:
        return cls(SEQUENCE, n)

    @classmethod
    def uniform(cls, n: int, multiplicity, seed: int = 0) -> KeySpec:
        return cls(UNIFORM, n, multiplicity, seed)

    @property
    def key_range(self) -> int:
        """Largest key that can be generated (keys start at 1)."""
        if self.kind == SEQUENCE:
            return self.n
        return max(1, round(Fraction(self.n) / Fraction(self.multiplicity)))


def generate(spec: KeySpec) -> np.ndarray:
    if spec.kind == SEQUENCE:
        return np.arange(1, spec.n + 1, dtype=np.uint64)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    return rng.integers(1, spec.key_range, size=spec.n, dtype=np.uint64, endpoint=True)


def empirical_multiplicity(keys: np.ndarray, key_range: int) -> float:
    """Mean number of appearances per key of ``[1, key_range]`` in ``keys``.

    Keys that were never drawn count as zero appearances, so this is the
    realized average over the whole range, not over distinct keys only.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    if keys.size and int(keys.max()) > key_range:
        raise ValueError("keys fall outside the stated range")
    hist = np.bincount(keys.astype(np.int64), minlength=key_range + 1)[1:]
    return float(hist.mean())


def distinct_multiplicity(keys: np.ndarray) -> float:
    """Mean appearances per distinct key actually present."""
    keys = np.asarray(keys)
    if keys.size == 0:
        return 0.0
    return keys.size / np.unique(keys).size


def write_keys(path: str | Path, keys) -> None:
    keys = np.ascontiguousarray(keys, dtype="<u8")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, keys.shape[0]))
        f.write(keys.tobytes())


def read_keys(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise KeyFileError(f"{path}: file too short for header ({len(data)} bytes)")
    magic, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise KeyFileError(f"{path}: bad magic {magic!r}")
    body = len(data) - _HEADER.size
    if body % 8:
        raise KeyFileError(f"{path}: payload of {body} bytes is not a multiple of 8")
    if body // 8 != count:
        raise KeyFileError(f"{path}: header says {count} keys, payload holds {body // 8}")
    return np.frombuffer(data, dtype="<u8", offset=_HEADER.size).astype(np.uint64)
