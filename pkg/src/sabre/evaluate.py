"""Losses between an estimated ordering and the latent one.

The latent ordering is only identified up to reversal, so every loss takes
the smaller value against the truth and its mirror.  l_max and l_one accept
real-valued score vectors; inversion counting and matrix permutation are
only defined on integers, so l_kendall wants integer scores (ties allowed,
they contribute no inversions) and l_frobenius a full permutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sabre.core import Permutation, SymMatrix, permute_matrix, reverse_permutation


def _scores(est, truth: Permutation) -> np.ndarray:
    est = np.asarray(est, dtype=np.float64)
    if est.shape != (truth.n,):
        raise ValueError(f"expected {truth.n} scores, got shape {est.shape}")
    return est


def _both_sides(truth: Permutation) -> tuple[np.ndarray, np.ndarray]:
    pos = truth.positions.astype(np.float64)
    return pos, truth.n + 1 - pos


def l_max(est, truth: Permutation) -> float:
    """Normalized worst-coordinate error, minimized over reversal."""
    est = _scores(est, truth)
    pos, rev = _both_sides(truth)
    return min(np.abs(est - pos).max(), np.abs(est - rev).max()) / truth.n


def l_one(est, truth: Permutation) -> float:
    """Normalized l1 error, minimized over reversal."""
    est = _scores(est, truth)
    pos, rev = _both_sides(truth)
    return min(np.abs(est - pos).sum(), np.abs(est - rev).sum()) / truth.n


def _integer_scores(est, truth: Permutation) -> np.ndarray:
    est = _scores(est, truth)
    if not np.array_equal(est, np.round(est)):
        raise ValueError("integer scores required; round first")
    return est


def l_kendall(est, truth: Permutation) -> float:
    """Normalized inversion count, minimized over reversal.

    A pair counts when the two orderings disagree strictly; tied estimated
    scores contribute nothing.
    """
    est = _integer_scores(est, truth)
    diff_est = est[:, None] - est[None, :]
    pos = truth.positions
    diff_truth = (pos[:, None] - pos[None, :]).astype(np.float64)
    product = np.triu(diff_est * diff_truth, k=1)
    # reversal negates diff_truth, turning concordant pairs into inversions
    return min(int((product < 0).sum()), int((product > 0).sum())) / truth.n


def l_frobenius(F: SymMatrix, est, truth: Permutation) -> float:
    """Frobenius distance between the signal read through the two orderings,
    minimized over reversal; needs a bijective estimate."""
    est = _integer_scores(est, truth)
    est_perm = Permutation(est.astype(np.int64))
    if not est_perm.is_bijective:
        raise ValueError("l_frobenius requires a bijective estimate")
    through_est = permute_matrix(F, est_perm).values
    direct = np.linalg.norm(through_est - permute_matrix(F, truth).values)
    mirrored = np.linalg.norm(
        through_est - permute_matrix(F, reverse_permutation(truth)).values)
    return min(direct, mirrored)


@dataclass(frozen=True)
class LossReport:
    """Loss bundle for one trial; sides name the orientation that won each
    loss.  l_kendall and l_frobenius are None when the estimate does not
    support them (non-integer scores, no signal matrix, ties)."""

    l_max: float
    l_one: float
    l_kendall: float | None
    l_frobenius: float | None
    sides: tuple

    def __post_init__(self) -> None:
        for name in ("l_max", "l_one", "l_kendall", "l_frobenius"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be nonnegative")


def _side(direct: float, mirrored: float) -> str:
    return "pi" if direct <= mirrored else "reverse"


def loss_report(est, truth: Permutation, F: SymMatrix | None = None) -> LossReport:
    """All applicable losses at once, with the winning orientation of each."""
    est = _scores(est, truth)
    pos, rev = _both_sides(truth)
    sides = [("l_max", _side(np.abs(est - pos).max(), np.abs(est - rev).max())),
             ("l_one", _side(np.abs(est - pos).sum(), np.abs(est - rev).sum()))]
    kendall = None
    frobenius = None
    if np.array_equal(est, np.round(est)):
        diff_est = est[:, None] - est[None, :]
        diff_truth = pos[:, None] - pos[None, :]
        product = np.triu(diff_est * diff_truth, k=1)
        inv_direct = int((product < 0).sum())
        inv_mirrored = int((product > 0).sum())
        kendall = min(inv_direct, inv_mirrored) / truth.n
        sides.append(("l_kendall", _side(inv_direct, inv_mirrored)))
        if (F is not None and np.unique(est).size == truth.n
                and est.min() >= 1 and est.max() <= truth.n):
            est_perm = Permutation(est.astype(np.int64))
            through_est = permute_matrix(F, est_perm).values
            direct = np.linalg.norm(
                through_est - permute_matrix(F, truth).values)
            mirrored = np.linalg.norm(
                through_est - permute_matrix(F, reverse_permutation(truth)).values)
            frobenius = min(direct, mirrored)
            sides.append(("l_frobenius", _side(direct, mirrored)))
    return LossReport(l_max(est, truth), l_one(est, truth), kendall,
                      frobenius, tuple(sides))
