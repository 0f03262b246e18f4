"""p-sums of finite-dimensional sup-norm blocks.

The target spaces throughout the package are direct sums of blocks
R^{m_1}, R^{m_2}, ... where each block carries the sup norm and the block
norms are aggregated either by a p-th power sum (1 <= p < inf) or by a
plain maximum (the c0-style model, written ``SUP``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTriple

__all__ = [
    "SUP",
    "SumSpaceSpec",
    "BlockVector",
    "norm",
    "block_profile",
    "project",
    "flat_triple_check",
    "FLAT_PROPORTIONAL",
    "FLAT_NOT_PROPORTIONAL",
    "NOT_FLAT",
]

# Aggregation-by-maximum sentinel.  Stored as the float infinity so that
# p-comparisons stay ordinary comparisons.
SUP = math.inf

FLAT_PROPORTIONAL = "FLAT_PROPORTIONAL"
FLAT_NOT_PROPORTIONAL = "FLAT_NOT_PROPORTIONAL"
NOT_FLAT = "NOT_FLAT"


@dataclass(frozen=True)
class SumSpaceSpec:
    """Shape of a block sum: aggregation exponent and block dimensions.

    ``p`` is a real in [1, inf); ``SUP`` selects max aggregation.  Block
    indices are 1-based everywhere in the package.
    """

    p: float
    block_dims: tuple[int, ...]

    def __post_init__(self):
        if not (self.p == SUP or self.p >= 1.0):
            raise ValueError(f"aggregation exponent must be >= 1 or SUP, got {self.p}")
        if len(self.block_dims) == 0:
            raise ValueError("need at least one block")
        if any(int(d) != d or d < 1 for d in self.block_dims):
            raise ValueError(f"block dims must be positive integers, got {self.block_dims}")
        object.__setattr__(self, "block_dims", tuple(int(d) for d in self.block_dims))

    @property
    def is_sup(self) -> bool:
        return self.p == SUP

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)


@dataclass(frozen=True)
class BlockVector:
    """Sparse vector of a block sum: only nonzero blocks are stored.

    ``blocks`` maps 1-based block index -> float array of that block's
    dimension.  Absent blocks are zero.
    """

    spec: SumSpaceSpec
    blocks: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, arr in self.blocks.items():
            k = int(k)
            if not 1 <= k <= self.spec.num_blocks:
                raise ValueError(f"block index {k} outside 1..{self.spec.num_blocks}")
            arr = np.asarray(arr, dtype=float)
            if arr.shape != (self.spec.block_dims[k - 1],):
                raise ValueError(
                    f"block {k} has shape {arr.shape}, expected ({self.spec.block_dims[k - 1]},)"
                )
            clean[k] = arr
        object.__setattr__(self, "blocks", clean)

    def __add__(self, other: "BlockVector") -> "BlockVector":
        if other.spec != self.spec:
            raise ValueError("mismatched specs")
        out = {k: v.copy() for k, v in self.blocks.items()}
        for k, v in other.blocks.items():
            out[k] = out[k] + v if k in out else v.copy()
        return BlockVector(self.spec, out)

    def __sub__(self, other: "BlockVector") -> "BlockVector":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "BlockVector":
        return BlockVector(self.spec, {k: v * scalar for k, v in self.blocks.items()})

    __rmul__ = __mul__


def block_profile(v: BlockVector) -> np.ndarray:
    """Per-block sup norms over the full block range, zeros included."""
    prof = np.zeros(v.spec.num_blocks)
    for k, arr in v.blocks.items():
        prof[k - 1] = np.max(np.abs(arr)) if arr.size else 0.0
    return prof


def aggregate_profile(prof: np.ndarray, p: float) -> float:
    """Aggregate per-block sup norms into the sum-space norm.

    Scaled by the leading block to stay exact on single-block profiles and
    overflow-safe when entries^p would leave double range.
    """
    m = float(np.max(prof)) if prof.size else 0.0
    if m == 0.0:
        return 0.0
    if p == SUP:
        return m
    z = prof / m
    return m * float(np.sum(z**p)) ** (1.0 / p)


def norm(v: BlockVector) -> float:
    """Sum-space norm: (sum_n ||v_n||_inf^p)^(1/p), or the max under SUP."""
    return aggregate_profile(block_profile(v), v.spec.p)


def project(v: BlockVector, k: int) -> BlockVector:
    """Keep blocks 1..k, zero the rest."""
    if not 1 <= k <= v.spec.num_blocks:
        raise IndexError(f"projection level {k} outside 1..{v.spec.num_blocks}")
    return BlockVector(v.spec, {i: arr for i, arr in v.blocks.items() if i <= k})


def flat_triple_check(
    x: BlockVector, y: BlockVector, z: BlockVector, tol: float = 1e-8
) -> tuple[str, float | None]:
    """Classify a triple by the additivity ||x-z|| = ||x-y|| + ||y-z||.

    Returns (verdict, ratio).  A triple is FLAT when the norm identity
    holds to ``tol``; a flat triple is PROPORTIONAL when the per-block
    profile of x - y is a positive multiple of the profile of y - z
    (least-squares multiplier, sup-norm residual <= tol).  For finite
    p strictly between 1 and infinity flatness forces proportionality;
    at p = 1 it need not, which the verdict records.
    """
    if x.spec.p == SUP:
        raise ValueError("flat-triple classification needs a finite aggregation exponent")
    d_xy = norm(x - y)
    d_yz = norm(y - z)
    d_xz = norm(x - z)
    scale = max(d_xy, d_yz, d_xz, 1.0)
    if min(d_xy, d_yz, d_xz) <= tol * scale:
        raise DegenerateTriple(f"coincident points in triple: distances {(d_xy, d_yz, d_xz)}")
    if abs(d_xz - (d_xy + d_yz)) > tol * scale:
        return NOT_FLAT, None
    a = block_profile(x - y)
    b = block_profile(y - z)
    denom = float(b @ b)
    ratio = float(a @ b) / denom
    if ratio > 0 and float(np.max(np.abs(a - ratio * b))) <= tol * scale:
        return FLAT_PROPORTIONAL, ratio
    return FLAT_NOT_PROPORTIONAL, None
