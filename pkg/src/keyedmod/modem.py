"""Bit-stream modulation and nearest-point (maximum-likelihood) demodulation.

Bit streams are 1-D integer arrays of 0/1 values; symbol streams are 1-D
complex arrays. All functions are pure and stateless: safe to run over
symbol blocks in parallel with no shared mutable state.
"""

from __future__ import annotations

import numpy as np

from .constellations import ConstellationScheme

__all__ = [
    "modulate",
    "demodulate",
    "nearest_point_values",
    "cross_decode_bits",
    "bits_to_values",
    "values_to_bits",
]

_DEMOD_CHUNK = 1 << 17


def _as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ValueError("bit stream must be one-dimensional")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("bit stream may only contain 0 and 1")
    return arr.astype(np.uint8, copy=False)


def bits_to_values(bits: np.ndarray, bits_per_symbol: int) -> np.ndarray:
    """Group a bit stream MSB-first into integer symbol values."""
    bits = _as_bits(bits)
    if bits.size % bits_per_symbol:
        raise ValueError(
            f"bit stream length {bits.size} is not divisible by {bits_per_symbol}"
        )
    weights = 1 << np.arange(bits_per_symbol - 1, -1, -1)
    return bits.reshape(-1, bits_per_symbol) @ weights


def values_to_bits(values: np.ndarray, bits_per_symbol: int) -> np.ndarray:
    """Expand integer symbol values into an MSB-first bit stream."""
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(bits_per_symbol - 1, -1, -1)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def modulate(bits, scheme: ConstellationScheme) -> np.ndarray:
    """Map a bit stream onto constellation points, one per m-bit group."""
    values = bits_to_values(bits, scheme.bits_per_symbol)
    return scheme.mapped_points[values]


def nearest_point_values(symbols, scheme: ConstellationScheme) -> np.ndarray:
    """Decode each symbol to the bit value whose point is nearest in Euclidean distance.

    Ties resolve to the lowest bit value (argmin keeps the first minimum).
    """
    y = np.asarray(symbols, dtype=np.complex128)
    if y.ndim != 1:
        raise ValueError("symbol stream must be one-dimensional")
    pts = scheme.mapped_points
    pr, pi = pts.real, pts.imag
    out = np.empty(y.size, dtype=np.int64)
    for start in range(0, y.size, _DEMOD_CHUNK):
        chunk = y[start : start + _DEMOD_CHUNK]
        d2 = (chunk.real[:, None] - pr) ** 2
        d2 += (chunk.imag[:, None] - pi) ** 2
        out[start : start + _DEMOD_CHUNK] = np.argmin(d2, axis=1)
    return out


def demodulate(symbols, scheme: ConstellationScheme) -> np.ndarray:
    """Minimum-distance demodulation: symbol stream back to a bit stream."""
    values = nearest_point_values(symbols, scheme)
    return values_to_bits(values, scheme.bits_per_symbol)


def cross_decode_bits(
    tx_bits,
    tx_scheme: ConstellationScheme,
    rx_scheme: ConstellationScheme,
    received=None,
) -> tuple[np.ndarray, int, int]:
    """Decode a transmission with a (possibly different) receive scheme.

    ``received`` defaults to the noiseless transmit symbols; pass the
    post-channel symbol stream to decode a noisy transmission. When the
    receiver resolves fewer bits per symbol (m' < m), its m' decoded
    bits are compared against the first m' bits of the corresponding
    transmitted m-bit group.

    Returns ``(rx_bits, compared, errors)`` where ``compared`` counts
    the positions entering the comparison and ``errors`` the mismatches.
    """
    tx_bits = _as_bits(tx_bits)
    m_tx = tx_scheme.bits_per_symbol
    m_rx = rx_scheme.bits_per_symbol
    if m_rx > m_tx:
        raise ValueError(
            f"receiver resolves {m_rx} bits/symbol but sender packs only {m_tx};"
            " alignment is undefined"
        )
    if received is None:
        received = modulate(tx_bits, tx_scheme)
    else:
        received = np.asarray(received, dtype=np.complex128)
        if received.size * m_tx != tx_bits.size:
            raise ValueError(
                f"{received.size} received symbols do not match"
                f" {tx_bits.size} transmitted bits at {m_tx} bits/symbol"
            )
    rx_bits = demodulate(received, rx_scheme)
    tx_groups = tx_bits.reshape(-1, m_tx)
    rx_groups = rx_bits.reshape(-1, m_rx)
    mismatch = tx_groups[:, :m_rx] != rx_groups
    return rx_bits, int(mismatch.size), int(np.count_nonzero(mismatch))
