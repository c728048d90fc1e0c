"""Node and anchor placement in the unit cube, with reproducible randomness.

All randomness in the toolkit flows through :class:`Seed`, which derives an
independent, counter-based stream for each (master, trial, purpose) triple.
Two calls with the same triple produce bit-identical draws, regardless of
call order, which keeps parallel Monte-Carlo sweeps reproducible.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

UNIT_SIMPLEX = "simplex"
RANDOM_SUBSET = "random"

_MAX_UINT64 = 2**64

# SplitMix64 constants (Steele et al. mixing finalizer).
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64(values: np.ndarray | int) -> np.ndarray:
    """Vectorized SplitMix64 finalizer: uint64 -> well-mixed uint64."""
    z = np.asarray(values, dtype=np.uint64) + _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class Seed:
    """Master seed plus trial index; purpose tags split off substreams.

    ``rng(tag)`` returns a Philox generator for bulk draws (placement),
    while ``pair_uniforms(codes, tag)`` produces one uniform per integer
    code via a stateless hash, so a draw is a pure function of its code.
    """

    master: int
    trial: int = 0

    def __post_init__(self):
        if not 0 <= self.master < _MAX_UINT64:
            raise ValueError("master seed must be a 64-bit unsigned integer")
        if self.trial < 0:
            raise ValueError("trial index must be non-negative")

    def _entropy(self, tag: str) -> np.random.SeedSequence:
        return np.random.SeedSequence([self.master, self.trial, zlib.crc32(tag.encode())])

    def rng(self, tag: str) -> np.random.Generator:
        """Counter-based generator for the given purpose tag."""
        return np.random.Generator(np.random.Philox(self._entropy(tag)))

    def stream_key(self, tag: str) -> np.uint64:
        return self._entropy(tag).generate_state(1, np.uint64)[0]

    def pair_uniforms(self, codes: np.ndarray, tag: str) -> np.ndarray:
        """Uniform [0,1) draw per code, independent of evaluation order."""
        key = self.stream_key(tag)
        bits = splitmix64(splitmix64(codes) ^ key)
        return bits.astype(np.float64) / float(_MAX_UINT64)


@dataclass(frozen=True)
class AnchorLayout:
    """Anchor positions with the mode they were generated under."""

    mode: str
    positions: np.ndarray

    @property
    def count(self) -> int:
        return self.positions.shape[0]


def _check_dim(dim: int):
    if dim not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {dim}")


def place_uniform(count: int, dim: int, seed: Seed) -> np.ndarray:
    """Draw ``count`` i.i.d. uniform points in [0,1]^dim.

    Deterministic given the seed; rows are node positions.
    """
    _check_dim(dim)
    if count < 1:
        raise ValueError("need at least one node")
    return seed.rng("place").random((count, dim))


def make_anchors(mode: str, dim: int, n: int, seed: Seed, m: int | None = None) -> AnchorLayout:
    """Generate anchor positions.

    ``UNIT_SIMPLEX`` gives the d+1 canonical anchors (origin plus the d
    standard unit vectors).  ``RANDOM_SUBSET`` draws ``m`` extra uniform
    positions; it requires d+1 <= m <= n.
    """
    _check_dim(dim)
    if mode == UNIT_SIMPLEX:
        positions = np.vstack([np.zeros((1, dim)), np.eye(dim)])
        return AnchorLayout(UNIT_SIMPLEX, positions)
    if mode == RANDOM_SUBSET:
        if m is None:
            raise ValueError("random anchor mode needs an explicit anchor count")
        if m < dim + 1:
            raise ValueError(f"need at least {dim + 1} anchors in {dim}-d, got {m}")
        if m > n:
            raise ValueError("cannot use more anchors than nodes")
        return AnchorLayout(RANDOM_SUBSET, seed.rng("anchor").random((m, dim)))
    raise ValueError(f"unknown anchor mode {mode!r}")
