"""Extended-precision settings (SPECDEC_PRECISION, mantissa bits)."""

import os

import mpmath

DEFAULT_BITS = 128
MIN_BITS = 64


def precision_bits():
    raw = os.environ.get("SPECDEC_PRECISION", "")
    if not raw.strip():
        return DEFAULT_BITS
    try:
        bits = int(raw)
    except ValueError:
        raise ValueError(f"SPECDEC_PRECISION must be an integer, got {raw!r}") from None
    if bits < MIN_BITS:
        raise ValueError(f"SPECDEC_PRECISION must be >= {MIN_BITS}, got {bits}")
    return bits


def workprec():
    """Context manager setting mpmath to the configured precision."""
    return mpmath.workprec(precision_bits())
