"""Bitstream extraction and byte packing for the map generator.

Bits come from thresholding orbit samples at tau = 0.5 (sample >= tau maps
to 1), starting with the seed itself when burn_in == 0.  Packing is
MSB-first within each byte so exported streams are stable across tools.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MapKey, Trajectory, orbit_chunks

THRESHOLD = 0.5


@dataclass(frozen=True, eq=False)
class BitStream:
    """Thresholded binary sequence tagged with its generating key."""

    bits: np.ndarray
    key_fingerprint: str

    def __post_init__(self):
        self.bits.flags.writeable = False

    @property
    def length(self) -> int:
        return self.bits.size

    def __len__(self) -> int:
        return self.bits.size


def bits_from_values(values: np.ndarray) -> np.ndarray:
    """Threshold orbit samples at 0.5 into a uint8 0/1 array."""
    return (np.asarray(values) >= THRESHOLD).astype(np.uint8)


def generate_bits(key: MapKey, n: int, burn_in: int = 0) -> BitStream:
    """Generate n bits from the orbit of ``key``; deterministic per key."""
    out = np.empty(n, dtype=np.uint8)
    pos = 0
    for block in orbit_chunks(key, n, burn_in):
        out[pos:pos + block.size] = block >= THRESHOLD
        pos += block.size
    return BitStream(bits=out, key_fingerprint=key.fingerprint())


def segmented_streams(key: MapKey, streams: int, bits_per_stream: int,
                      burn_in: int = 0) -> list[BitStream]:
    """Split one long orbit into disjoint consecutive bit segments.

    Segment i covers orbit positions [i*bits_per_stream, (i+1)*bits_per_stream)
    after burn_in; fingerprints carry the segment index.
    """
    if streams < 1:
        raise ValueError(f"streams must be >= 1, got {streams}")
    whole = generate_bits(key, streams * bits_per_stream, burn_in)
    fp = key.fingerprint()
    return [
        BitStream(bits=whole.bits[i * bits_per_stream:(i + 1) * bits_per_stream],
                  key_fingerprint=f"{fp}:{i}")
        for i in range(streams)
    ]


def pack_bytes(bits: BitStream | np.ndarray) -> tuple[bytes, int]:
    """Pack bits MSB-first into bytes.

    The first bit becomes the most significant bit of byte 0.  Returns
    (payload, pad_bits) where pad_bits zero bits were appended to fill the
    final byte; lengths divisible by 8 pad nothing.
    """
    arr = bits.bits if isinstance(bits, BitStream) else np.asarray(bits, dtype=np.uint8)
    pad = (-arr.size) % 8
    return np.packbits(arr).tobytes(), pad


def unpack_bits(data: bytes, n_bits: int | None = None) -> np.ndarray:
    """Inverse of :func:`pack_bytes`; n_bits trims the zero padding."""
    arr = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    return arr if n_bits is None else arr[:n_bits]


def quantize_values(values: np.ndarray) -> np.ndarray:
    """8-bit quantization floor(x * 256) with 1.0 clamped to 255."""
    v = np.floor(np.asarray(values, dtype=np.float64) * 256.0)
    return np.minimum(v, 255.0).astype(np.uint8)


def quantize_bytes(traj: Trajectory | np.ndarray) -> np.ndarray:
    """Quantize a trajectory's samples to one byte each."""
    values = traj.values if isinstance(traj, Trajectory) else traj
    return quantize_values(values)


def generate_quantized(key: MapKey, n: int, burn_in: int = 0) -> np.ndarray:
    """n quantized orbit bytes, streamed so long runs stay memory-flat."""
    out = np.empty(n, dtype=np.uint8)
    pos = 0
    for block in orbit_chunks(key, n, burn_in):
        out[pos:pos + block.size] = quantize_values(block)
        pos += block.size
    return out
