"""Refined seriation: re-evaluate the pairs stage 1 left undecided.

For an undecided pair (i, j), indices that stage 1 placed on a common side
of both rows form the preliminary comparison sets; these are thinned to a
reference part of a sample split (so the filtering distances are independent
of rows i and j) and to indices far from the pair's local anchor.  The side
sums of A_i - A_j over the thinned sets then decide the pair when they clear
a noise threshold.

Two split modes exist: a seeded balanced tripartition (one distance
re-estimate per part), and leave-one-out subsets (one re-estimate per pair,
n^5 total work) for approximate orderings where a fixed partition can leave
reference parts too sparse near the pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sabre.core import ComparisonMatrix, SymMatrix
from sabre.distance import DistanceEstimate, estimate_distance

_MODES = ("tripartition", "leave-one-out")

_CHUNK = 512


@dataclass(frozen=True)
class SplitPlan:
    """Sample-split specification: the mode, the parts (tripartition only),
    and the seed that produced them."""

    mode: str
    parts: tuple | None
    seed: int

    def __post_init__(self) -> None:
        if self.mode not in _MODES:
            raise ValueError(f"unknown split mode {self.mode!r}")
        if self.mode == "leave-one-out":
            if self.parts is not None:
                raise ValueError("leave-one-out plans carry no parts")
            return
        if self.parts is None or len(self.parts) != 3:
            raise ValueError("tripartition needs exactly three parts")
        parts = tuple(np.sort(np.array(p, dtype=np.int64)) for p in self.parts)
        merged = np.concatenate(parts)
        n = merged.size
        if not np.array_equal(np.sort(merged), np.arange(n)):
            raise ValueError("parts must disjointly cover the index range")
        low, high = n // 3, -(-n // 3)
        if not all(low <= p.size <= high for p in parts):
            raise ValueError("parts must be balanced")
        for p in parts:
            p.setflags(write=False)
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int | None:
        if self.parts is None:
            return None
        return sum(p.size for p in self.parts)


def tripartition(n: int, seed: int) -> SplitPlan:
    """Uniform balanced split of range(n) into three parts; needs n >= 9 so
    each part can support a distance estimate."""
    if n < 9:
        raise ValueError("tripartition needs n >= 9")
    rng = np.random.default_rng(seed)
    shuffled = rng.permutation(n)
    base, rem = divmod(n, 3)
    sizes = [base + (1 if t < rem else 0) for t in range(3)]
    bounds = np.cumsum([0] + sizes)
    parts = tuple(np.sort(shuffled[bounds[t]:bounds[t + 1]]) for t in range(3))
    return SplitPlan("tripartition", parts, seed)


def leave_one_out_plan() -> SplitPlan:
    """Plan selecting per-pair reference sets [n] minus the pair itself."""
    return SplitPlan("leave-one-out", None, 0)


def preliminary_sets(H: ComparisonMatrix, i: int, j: int):
    """Indices lying on a common side of both i and j according to H."""
    h = H.values
    left = np.flatnonzero((h[i] == 1) & (h[j] == 1))
    right = np.flatnonzero((h[i] == -1) & (h[j] == -1))
    return left, right


@dataclass(frozen=True)
class PairContext:
    """Everything needed to re-evaluate one pair: the reference set, the
    anchor closest to i inside it, and the thinned side sets."""

    i: int
    j: int
    reference: np.ndarray
    anchor: int
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self) -> None:
        ref = set(self.reference.tolist())
        if self.i in ref or self.j in ref:
            raise ValueError("reference set must exclude the pair")
        if self.anchor not in ref:
            raise ValueError("anchor must belong to the reference set")
        if not set(self.left.tolist()) <= ref or not set(self.right.tolist()) <= ref:
            raise ValueError("side sets must lie inside the reference set")


def modified_sets(D: SymMatrix, Dref: DistanceEstimate, H: ComparisonMatrix,
                  i: int, j: int, delta4: float) -> PairContext:
    """Thin the preliminary sets of an undecided pair to the reference set.

    The anchor p is the reference index closest to i in the stage-1
    distances (ties to the smallest index); only indices the reference
    estimate places at least delta4 away from p survive.
    """
    if H[i, j] != 0:
        raise ValueError("pair is already decided")
    ref = Dref.subset
    if i in ref or j in ref:
        raise ValueError("reference set must exclude the pair")
    anchor = int(ref[np.argmin(D.values[i, ref])])
    left, right = preliminary_sets(H, i, j)
    far = Dref.matrix.values[anchor] >= delta4
    in_ref = np.zeros(D.n, dtype=bool)
    in_ref[ref] = True
    keep = far & in_ref
    return PairContext(i, j, ref, anchor,
                       left[keep[left]], right[keep[right]])


def evaluate_comparison(a_i: np.ndarray, a_j: np.ndarray, L, R,
                        sigma: float) -> int:
    """Side-sum decision rule; the left statistic is tested first.

    Returns -sign(l) when |l| clears 5 sigma sqrt(n ln n), else sign(r) when
    |r| does, else 0.
    """
    a_i = np.asarray(a_i, dtype=np.float64)
    a_j = np.asarray(a_j, dtype=np.float64)
    if a_i.shape != a_j.shape or a_i.ndim != 1:
        raise ValueError("rows must be one-dimensional and equal length")
    n = a_i.size
    L = np.asarray(L, dtype=np.int64)
    R = np.asarray(R, dtype=np.int64)
    threshold = 5.0 * sigma * math.sqrt(n * math.log(n)) if n > 1 else 0.0
    l = float((a_i[L] - a_j[L]).sum())
    if abs(l) >= threshold:
        return -int(np.sign(l))
    r = float((a_i[R] - a_j[R]).sum())
    if abs(r) >= threshold:
        return int(np.sign(r))
    return 0


def refine(H: ComparisonMatrix, D: SymMatrix, A: SymMatrix, sigma: float,
           delta4: float, plan: SplitPlan, *, loo_cap: int = 400) -> ComparisonMatrix:
    """Fill undecided entries of H; decided entries are never touched.

    The update matrix is computed on pairs with H_ij = 0 only and mirrored,
    so the supports of H and the update stay disjoint.  loo_cap guards the
    n^5 leave-one-out mode; pass a larger value deliberately to exceed it.
    """
    n = A.n
    if H.n != n or D.n != n:
        raise ValueError("H, D and A must share one size")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if delta4 < 0:
        raise ValueError("delta4 must be nonnegative")
    if plan.mode == "tripartition":
        if plan.n != n:
            raise ValueError("plan size does not match the data")
        update = _refine_tripartition(H.values, D.values, A, sigma, delta4,
                                      plan)
    else:
        if n > loo_cap:
            raise ValueError(
                f"leave-one-out refinement at n={n} exceeds the cap {loo_cap};"
                " raise loo_cap explicitly to proceed")
        if n < 5:
            raise ValueError("leave-one-out refinement needs n >= 5")
        update = _refine_leave_one_out(H.values, D.values, A.values, sigma,
                                       delta4)
    return ComparisonMatrix((H.values + update).astype(np.int8))


def _bulk_decide(l: np.ndarray, r: np.ndarray, threshold: float) -> np.ndarray:
    """Vector form of the evaluate_comparison rule."""
    return np.where(np.abs(l) >= threshold, -np.sign(l),
                    np.where(np.abs(r) >= threshold, np.sign(r), 0.0))


def _refine_tripartition(h, Dvals, A, sigma, delta4, plan):
    n = h.shape[0]
    Avals = A.values
    parts = plan.parts
    estimates = [estimate_distance(A, p) for p in parts]
    part_of = np.empty(n, dtype=np.int64)
    for t, p in enumerate(parts):
        part_of[p] = t
    # t_ij: smallest part index avoiding both items' parts
    choice = np.empty((3, 3), dtype=np.int64)
    for a in range(3):
        for b in range(3):
            choice[a, b] = min({0, 1, 2} - {a, b})
    in_part = np.zeros((3, n), dtype=bool)
    for t, p in enumerate(parts):
        in_part[t, p] = True

    iu, ju = np.nonzero(np.triu(h == 0, k=1))
    t_pair = choice[part_of[iu], part_of[ju]]
    threshold = 5.0 * sigma * math.sqrt(n * math.log(n)) if n > 1 else 0.0
    update = np.zeros((n, n), dtype=np.int8)
    for t in range(3):
        sel = np.flatnonzero(t_pair == t)
        if sel.size == 0:
            continue
        S = parts[t]
        dhat = estimates[t].matrix.values
        for start in range(0, sel.size, _CHUNK):
            block = sel[start:start + _CHUNK]
            I, J = iu[block], ju[block]
            anchors = S[np.argmin(Dvals[I][:, S], axis=1)]
            keep = (dhat[anchors] >= delta4) & in_part[t]
            hi, hj = h[I], h[J]
            lmask = (hi == 1) & (hj == 1) & keep
            rmask = (hi == -1) & (hj == -1) & keep
            diff = Avals[I] - Avals[J]
            l = (diff * lmask).sum(axis=1)
            r = (diff * rmask).sum(axis=1)
            vals = _bulk_decide(l, r, threshold).astype(np.int8)
            update[I, J] = vals
            update[J, I] = -vals
    return update


def _refine_leave_one_out(h, Dvals, Avals, sigma, delta4):
    n = h.shape[0]
    update = np.zeros((n, n), dtype=np.int8)
    iu, ju = np.nonzero(np.triu(h == 0, k=1))
    keep = np.ones(n, dtype=bool)
    for i, j in zip(iu.tolist(), ju.tolist()):
        left = np.flatnonzero((h[i] == 1) & (h[j] == 1))
        right = np.flatnonzero((h[i] == -1) & (h[j] == -1))
        if left.size == 0 and right.size == 0:
            continue  # empty sums never clear the threshold
        keep[:] = True
        keep[i] = keep[j] = False
        idx = np.flatnonzero(keep)
        block = Avals[np.ix_(idx, idx)]
        Gsub = block @ block.T
        pos_in_idx = np.cumsum(keep) - 1  # ambient -> local index
        anchor = int(np.argmin(Dvals[i, idx]))
        cand = pos_in_idx[np.concatenate([left, right])]
        dist = _lazy_distances(Gsub, anchor, cand, n)
        far = dist >= delta4
        lsel = left[far[:left.size]]
        rsel = right[far[left.size:]]
        val = evaluate_comparison(Avals[i], Avals[j], lsel, rsel, sigma)
        update[i, j] = val
        update[j, i] = -val
    return update


def _lazy_distances(Gsub: np.ndarray, anchor: int, cand: np.ndarray,
                    n: int) -> np.ndarray:
    """Distance-estimate entries (anchor, cand) without the full matrix.

    Reproduces estimate_distance on the subset float for float: proxies are
    searched only for the rows consulted, and the roundoff symmetrization
    averages both Gram orientations.
    """
    m = Gsub.shape[0]
    rows = np.unique(np.append(cand, anchor))
    self_inner = np.zeros(m)
    plane = np.arange(m)
    for start in range(0, rows.size, 16):
        sub = rows[start:start + 16]
        local = np.arange(sub.size)
        spread = np.abs(Gsub[:, sub][:, :, None] - Gsub[:, None, :])
        spread[sub, local, :] = -np.inf  # k = i excluded
        spread[plane, :, plane] = -np.inf  # k = j excluded
        criterion = spread.max(axis=0)
        criterion[local, sub] = np.inf  # j = i excluded
        best = np.argmin(criterion, axis=1)
        self_inner[sub] = Gsub[sub, best]
    pair_sum = self_inner[anchor] + self_inner[cand]
    fwd = np.sqrt(n * np.clip(pair_sum - 2.0 * Gsub[anchor, cand], 0.0, None))
    bwd = np.sqrt(n * np.clip(pair_sum - 2.0 * Gsub[cand, anchor], 0.0, None))
    dist = 0.5 * (fwd + bwd)
    dist[cand == anchor] = 0.0
    return dist
