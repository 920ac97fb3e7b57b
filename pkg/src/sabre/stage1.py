"""First seriation stage: bisections, orientation, aggregation.

Each index i splits the remaining vertices into far-side groups: close pairs
(distance at most delta1) are linked when at least one endpoint sits far from
i (delta2), and only components reaching past delta3 survive.  The two
largest surviving components are the tentative left and right sides of i.
An anchor index with the most balanced split fixes a global orientation,
every other bisection is aligned to it, and the aligned sides are aggregated
into a partial comparison matrix H with entries in {-1, 0, +1}.

The whole stage is deterministic: ties in component selection go to the
component with the smallest minimum vertex, and the anchor argmax takes the
smallest index.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from sabre.core import ComparisonMatrix, SymMatrix

_EMPTY = np.empty(0, dtype=np.int64)

_EDGE_RULES = ("or", "and")


@dataclass(frozen=True)
class Thresholds:
    """Stage thresholds delta1..delta4.

    The ordering delta1 <= delta2 <= delta3 is the intended regime but only
    warned about, since useful configurations near the caps may violate it.
    """

    delta1: float
    delta2: float
    delta3: float
    delta4: float

    def __post_init__(self) -> None:
        for name in ("delta1", "delta2", "delta3", "delta4"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not self.delta1 <= self.delta2 <= self.delta3:
            warnings.warn(
                "thresholds are not ordered delta1 <= delta2 <= delta3",
                stacklevel=2)


@dataclass(frozen=True)
class OrientedBisections:
    """Left/right label masks per index: left[i][k] means k ∈ L_i."""

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self) -> None:
        left = np.asarray(self.left, dtype=bool)
        right = np.asarray(self.right, dtype=bool)
        if left.shape != right.shape or left.ndim != 2 or left.shape[0] != left.shape[1]:
            raise ValueError("left and right must be square masks of equal shape")
        if (left & right).any():
            raise ValueError("left and right sides must be disjoint")
        if np.diagonal(left).any() or np.diagonal(right).any():
            raise ValueError("an index cannot lie on its own side")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        left.setflags(write=False)
        right.setflags(write=False)

    @property
    def n(self) -> int:
        return self.left.shape[0]

    def sides(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """(L_i, R_i) as sorted index arrays."""
        return np.flatnonzero(self.left[i]), np.flatnonzero(self.right[i])


def _close_pairs(vals: np.ndarray, delta1: float) -> np.ndarray:
    """Unordered pairs (k, l), k < l, with D_kl <= delta1."""
    return np.argwhere(np.triu(vals <= delta1, k=1))


def _bisect_with_edges(vals: np.ndarray, i: int, edges: np.ndarray,
                       thresholds: Thresholds, edge_rule: str):
    n = vals.shape[0]
    di = vals[i]
    if edges.size:
        k, l = edges[:, 0], edges[:, 1]
        keep = (k != i) & (l != i)
        if edge_rule == "or":
            keep &= np.maximum(di[k], di[l]) >= thresholds.delta2
        else:
            keep &= np.minimum(di[k], di[l]) >= thresholds.delta2
        k, l = k[keep], l[keep]
    else:
        k = l = _EMPTY
    graph = csr_matrix((np.ones(k.size, dtype=bool), (k, l)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    far = di >= thresholds.delta3
    far[i] = False
    # a component survives iff one of its vertices is far from i; i itself is
    # isolated (its edges were dropped) so it can never sneak in
    components = [np.flatnonzero(labels == lab) for lab in np.unique(labels[far])]
    components.sort(key=lambda m: (-m.size, int(m[0])))
    first = components[0] if components else _EMPTY
    second = components[1] if len(components) > 1 else _EMPTY
    return first, second


def build_bisection(D: SymMatrix, i: int, thresholds: Thresholds,
                    edge_rule: str = "or"):
    """Two largest far-reaching components around index i.

    Returns (G_i, G_i') as sorted index arrays, larger first; ties by the
    smallest minimum vertex.  Either may be empty.
    """
    if D.n < 3:
        raise ValueError("need at least 3 indices")
    if not 0 <= i < D.n:
        raise ValueError("index out of range")
    if edge_rule not in _EDGE_RULES:
        raise ValueError(f"unknown edge rule {edge_rule!r}")
    edges = _close_pairs(D.values, thresholds.delta1)
    return _bisect_with_edges(D.values, i, edges, thresholds, edge_rule)


def bisect_all(D: SymMatrix, thresholds: Thresholds, edge_rule: str = "or"):
    """build_bisection for every index, sharing one close-pair scan."""
    if D.n < 3:
        raise ValueError("need at least 3 indices")
    if edge_rule not in _EDGE_RULES:
        raise ValueError(f"unknown edge rule {edge_rule!r}")
    edges = _close_pairs(D.values, thresholds.delta1)
    return [_bisect_with_edges(D.values, i, edges, thresholds, edge_rule)
            for i in range(D.n)]


def orient(bisections) -> OrientedBisections:
    """Propagate a consistent left/right labeling from the most balanced index.

    The anchor c maximizes min(|G_c|, |G_c'|) (ties to the smallest index) and
    keeps its sides as-is.  Indices with a single side are labeled by which
    side of the anchor they fall on; indices with two sides are aligned by
    the intersection rule.  The global sign stays arbitrary.
    """
    n = len(bisections)
    if n == 0 or all(g.size == 0 for g, _ in bisections):
        raise ValueError("all bisections are empty")
    balance = np.array([min(g.size, gp.size) for g, gp in bisections])
    c = int(np.argmax(balance))
    left = np.zeros((n, n), dtype=bool)
    right = np.zeros((n, n), dtype=bool)
    g_c, gp_c = bisections[c]
    left[c, g_c] = True
    right[c, gp_c] = True
    for i in range(n):
        if i == c:
            continue
        g, gp = bisections[i]
        if gp.size == 0:
            if left[c, i]:
                right[i, g] = True
            else:
                left[i, g] = True
        else:
            if not left[c, g].any() or not right[c, gp].any():
                right[i, g] = True
                left[i, gp] = True
            else:
                left[i, g] = True
                right[i, gp] = True
    return OrientedBisections(left, right)


def aggregate(oriented: OrientedBisections) -> tuple[ComparisonMatrix, int]:
    """Partial comparison matrix from the oriented sides, plus a conflict count.

    For i < j: H_ij = -1 when i ∈ L_j or j ∈ R_i, else +1 when i ∈ R_j or
    j ∈ L_i, else 0; the lower triangle mirrors.  When a pair carries both
    kinds of evidence (impossible for distance matrices satisfying the local
    equivalence, but possible for arbitrary inputs), the -1 branch wins and
    the pair is counted as a conflict.
    """
    neg = oriented.left.T | oriented.right
    pos = oriented.right.T | oriented.left
    upper = np.triu(np.ones((oriented.n, oriented.n), dtype=bool), k=1)
    conflicts = int((neg & pos & upper).sum())
    signs = np.where(neg, -1, np.where(pos, 1, 0)).astype(np.int8)
    H = np.where(upper, signs, 0)
    H = H - H.T
    return ComparisonMatrix(H.astype(np.int8)), conflicts
