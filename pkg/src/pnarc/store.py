"""Bit-packed persistence for harvested embeddings.

Each probed value is a member of a declared level set (binary +/-1 by
default, up to eight levels for 3-bit probing) and is stored as a q-bit
code, little-endian bit order within bytes.  The payload is exactly
series_length * n_magnets * q bits, padded with zero bits to a whole byte.

File layout ("PNAE" store, all integers little-endian):

    magic   4 bytes  b"PNAE"
    version u8       1
    topo    u8       0 square, 1 pinwheel, 255 unspecified
    m       u16      lattice order (0 if unspecified)
    D       u32      values per embedding
    T       u32      number of embeddings
    q       u8       bits per value (1..8)
    L       u8       number of levels (<= 2**q)
    levels  L * f64  level values, ascending
    payload ceil(T*D*q / 8) bytes
"""

import struct
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParameterError, LevelCodeError, StoreFormatError

_MAGIC = b"PNAE"
_VERSION = 1
_TOPO_CODES = {"square": 0, "pinwheel": 1, None: 255}
_TOPO_NAMES = {0: "square", 1: "pinwheel", 255: None}


def default_levels(q: int) -> tuple:
    """Binary +/-1 for q=1, else 2**q evenly spaced levels in [-1, 1]."""
    if q == 1:
        return (-1.0, 1.0)
    return tuple(np.linspace(-1.0, 1.0, 2 ** q))


@dataclass(frozen=True)
class EmbeddingStore:
    series_length: int
    n_values: int          # values per embedding (D)
    q: int                 # bits per value
    levels: tuple
    payload: bytes
    topology: str | None = None
    m: int = 0

    @property
    def payload_bits(self) -> int:
        return self.series_length * self.n_values * self.q


def pack_embeddings(values, q: int, levels=None, topology=None, m: int = 0) -> EmbeddingStore:
    """Pack a (T, D) array of level-set values into q-bit codes."""
    if not 1 <= q <= 8:
        raise InvalidParameterError("q must be in 1..8")
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        if arr.size == 0:
            arr = arr.reshape(0, 0)
        else:
            raise InvalidParameterError("values must be a (T, D) array")
    levels = tuple(float(v) for v in (levels if levels is not None else default_levels(q)))
    if len(levels) > 2 ** q:
        raise InvalidParameterError(f"{len(levels)} levels do not fit in {q} bits")

    level_arr = np.asarray(levels)
    codes = np.searchsorted(level_arr, arr.ravel())
    codes = np.clip(codes, 0, len(levels) - 1)
    if arr.size and not np.array_equal(level_arr[codes], arr.ravel()):
        bad = arr.ravel()[level_arr[codes] != arr.ravel()][0]
        raise LevelCodeError(f"value {bad!r} is not in the level set {levels}")

    if arr.size:
        bits = ((codes[:, None].astype(np.uint8) >> np.arange(q, dtype=np.uint8)) & 1)
        payload = np.packbits(bits.ravel(), bitorder="little").tobytes()
    else:
        payload = b""
    return EmbeddingStore(
        series_length=arr.shape[0],
        n_values=arr.shape[1] if arr.size else 0,
        q=q,
        levels=levels,
        payload=payload,
        topology=topology,
        m=m,
    )


def unpack_embeddings(store: EmbeddingStore) -> np.ndarray:
    """Recover the exact (T, D) value array from a store."""
    n_bits = store.payload_bits
    if n_bits == 0:
        return np.zeros((store.series_length, store.n_values))
    raw = np.frombuffer(store.payload, dtype=np.uint8)
    bits = np.unpackbits(raw, count=n_bits, bitorder="little")
    codes = bits.reshape(-1, store.q) @ (1 << np.arange(store.q))
    if codes.max(initial=0) >= len(store.levels):
        raise StoreFormatError("payload contains a code outside the level set")
    values = np.asarray(store.levels)[codes]
    return values.reshape(store.series_length, store.n_values)


def store_to_bytes(store: EmbeddingStore) -> bytes:
    header = struct.pack(
        "<4sBBHIIBB",
        _MAGIC,
        _VERSION,
        _TOPO_CODES[store.topology],
        store.m,
        store.n_values,
        store.series_length,
        store.q,
        len(store.levels),
    )
    levels = struct.pack(f"<{len(store.levels)}d", *store.levels)
    return header + levels + store.payload


def store_from_bytes(data: bytes) -> EmbeddingStore:
    head_size = struct.calcsize("<4sBBHIIBB")
    if len(data) < head_size:
        raise StoreFormatError("truncated store header")
    magic, version, topo, m, d, t, q, n_levels = struct.unpack(
        "<4sBBHIIBB", data[:head_size]
    )
    if magic != _MAGIC:
        raise StoreFormatError(f"bad magic {magic!r}")
    if version != _VERSION:
        raise StoreFormatError(f"unsupported store version {version}")
    if topo not in _TOPO_NAMES:
        raise StoreFormatError(f"unknown topology code {topo}")
    off = head_size
    levels = struct.unpack(f"<{n_levels}d", data[off: off + 8 * n_levels])
    off += 8 * n_levels
    n_payload = (t * d * q + 7) // 8
    payload = data[off: off + n_payload]
    if len(payload) != n_payload:
        raise StoreFormatError("truncated payload")
    return EmbeddingStore(
        series_length=t, n_values=d, q=q, levels=levels, payload=payload,
        topology=_TOPO_NAMES[topo], m=m,
    )


def write_store(store: EmbeddingStore, path) -> None:
    with open(path, "wb") as fh:
        fh.write(store_to_bytes(store))


def read_store(path) -> EmbeddingStore:
    with open(path, "rb") as fh:
        return store_from_bytes(fh.read())
