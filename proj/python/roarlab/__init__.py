"""Roaring, WAH and Concise bitmaps plus the synthetic generators."""

from ._core import (
    ConciseBitmap,
    RoaringBitmap,
    WahBitmap,
    build_index,
    gen_beta,
    gen_uniform,
    multi_or,
)

__all__ = [
    "ConciseBitmap",
    "RoaringBitmap",
    "WahBitmap",
    "build_index",
    "gen_beta",
    "gen_uniform",
    "multi_or",
]
