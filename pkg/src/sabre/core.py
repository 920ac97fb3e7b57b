"""Core data types and permutation/comparison algebra.

Conventions used across the package:

* Permutations store 1-based positions (values in {1, ..., n}), matching the
  file formats and the score extraction identity; array axes are 0-based.
* Symmetric matrices are validated for exact bit-level symmetry at
  construction and frozen; every stage treats them as immutable.
* Comparison matrices hold pairwise order evidence: entry (i, j) is -1 when
  item i is believed to precede item j, +1 for the opposite, 0 for undecided.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _frozen_array(values, dtype) -> np.ndarray:
    out = np.array(values, dtype=dtype, copy=True, order="C")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric real matrix; the carrier for F, A, D, D* and friends."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {values.shape}")
        if values.shape[0] < 1:
            raise ValueError("matrix must be at least 1x1")
        if not np.array_equal(values, values.T):
            raise ValueError("matrix is not symmetric")
        object.__setattr__(self, "values", _frozen_array(values, np.float64))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def row(self, i: int) -> np.ndarray:
        return self.values[i]

    def __getitem__(self, key):
        return self.values[key]


@dataclass(frozen=True)
class Permutation:
    """Latent ordering: positions[i] is the rank of item i, 1-based.

    zeta == 0 demands an exact permutation (a bijection of {1,...,n});
    zeta > 0 admits approximate permutations whose values merely cover
    every target rank within spacing zeta.
    """

    positions: np.ndarray
    zeta: int = 0

    def __post_init__(self) -> None:
        positions = np.asarray(self.positions)
        if positions.ndim != 1:
            raise ValueError("positions must be one-dimensional")
        if not np.issubdtype(positions.dtype, np.integer):
            as_int = positions.astype(np.int64)
            if not np.array_equal(as_int, positions):
                raise ValueError("positions must be integers")
            positions = as_int
        n = positions.shape[0]
        if n < 1:
            raise ValueError("empty permutation")
        if positions.min() < 1 or positions.max() > n:
            raise ValueError("positions must lie in {1, ..., n}")
        if self.zeta < 0:
            raise ValueError("zeta must be nonnegative")
        if self.zeta >= n:
            raise ValueError("zeta must be smaller than n")
        if self.zeta == 0:
            if np.unique(positions).size != n:
                raise ValueError("exact permutation must be a bijection")
        else:
            targets = np.arange(1, n + 1)
            spread = np.abs(np.sort(positions)[None, :] - targets[:, None]).min(axis=1)
            if spread.max() > self.zeta:
                k = int(targets[np.argmax(spread)])
                raise ValueError(
                    f"rank {k} is not covered within spacing {self.zeta}"
                )
        object.__setattr__(self, "positions", _frozen_array(positions, np.int64))

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def is_bijective(self) -> bool:
        return np.unique(self.positions).size == self.n


@dataclass(frozen=True)
class ComparisonMatrix:
    """Antisymmetric sign matrix with entries in {-1, 0, +1} and zero diagonal."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {values.shape}")
        values = values.astype(np.int8)
        if not np.isin(values, (-1, 0, 1)).all():
            raise ValueError("entries must be in {-1, 0, +1}")
        if np.any(np.diagonal(values) != 0):
            raise ValueError("diagonal must be zero")
        if not np.array_equal(values, -values.T):
            raise ValueError("matrix must be antisymmetric")
        object.__setattr__(self, "values", _frozen_array(values, np.int8))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, key):
        return self.values[key]


def permute_matrix(F: SymMatrix, pi: Permutation) -> SymMatrix:
    """Read F through the ordering: result[i][j] = F[pi_i][pi_j]."""
    if pi.n != F.n:
        raise ValueError(f"permutation length {pi.n} does not match matrix size {F.n}")
    if not pi.is_bijective:
        raise ValueError("permute_matrix requires a bijective permutation")
    idx = pi.positions - 1
    return SymMatrix(F.values[np.ix_(idx, idx)])


def reverse_permutation(pi: Permutation) -> Permutation:
    """Mirror the ordering: position p becomes n + 1 - p. Preserves zeta."""
    return Permutation(pi.n + 1 - pi.positions, zeta=pi.zeta)


def oracle_comparison_matrix(pi: Permutation) -> ComparisonMatrix:
    """Complete comparison matrix of an exact permutation.

    Entry (i, j) is -1 when pi_i < pi_j, so the strictly first item of the
    ordering has an all--1 row off the diagonal.
    """
    if not pi.is_bijective:
        raise ValueError("comparison oracle requires a bijective permutation")
    pos = pi.positions
    return ComparisonMatrix(np.sign(pos[:, None] - pos[None, :]).astype(np.int8))


def permutation_from_comparison(H: ComparisonMatrix) -> np.ndarray:
    """Position scores from row sums: score_i = (sum_k H[i][k] + n + 1) / 2.

    For a complete comparison matrix of an exact permutation the scores equal
    the permutation itself; undecided entries pull the affected scores toward
    the midpoint and can make them half-integers.
    """
    n = H.n
    sums = H.values.sum(axis=1, dtype=np.int64)
    return (sums + n + 1) / 2.0


def round_scores(scores: np.ndarray) -> np.ndarray:
    """Round real scores to integer positions: nearest integer, ties downward."""
    scores = np.asarray(scores, dtype=np.float64)
    return np.ceil(scores - 0.5).astype(np.int64)
