"""Row-distance estimation from a noisy similarity matrix.

The estimator compares rows through inner products with all other rows,
using a robust nearest-neighbor proxy to replace the biased self-inner
product.  Everything is expressed through the Gram matrix of the
subset-restricted observation, which keeps the proxy search cubic overall
instead of quartic.  Subsets matter because later stages re-estimate
distances on sample splits; entries outside S x S are identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from sabre.core import Permutation, SymMatrix
from sabre.models import read_through


def _subset_array(S, n: int) -> np.ndarray:
    """Validated subset as a sorted array of distinct 0-based indices."""
    s = np.unique(np.asarray(S, dtype=np.int64))
    if s.size == 0:
        raise ValueError("subset must be nonempty")
    if s[0] < 0 or s[-1] >= n:
        raise ValueError("subset indices out of range")
    return s


@dataclass(frozen=True)
class DistanceEstimate:
    """Estimated distances on a subset: matrix, the subset itself, and the
    nearest-neighbor proxy chosen for each subset element."""

    matrix: SymMatrix
    subset: np.ndarray
    proxies: dict[int, int] = field(compare=False)

    def __post_init__(self) -> None:
        vals = self.matrix.values
        n = self.matrix.n
        s = _subset_array(self.subset, n)
        object.__setattr__(self, "subset", s)
        if vals.min() < 0:
            raise ValueError("distances must be nonnegative")
        if np.diagonal(vals).any():
            raise ValueError("diagonal must be zero")
        outside = np.ones(n, dtype=bool)
        outside[s] = False
        if vals[outside, :].any() or vals[:, outside].any():
            raise ValueError("entries outside the subset must be zero")
        if set(self.proxies) != set(s.tolist()):
            raise ValueError("proxies must cover exactly the subset")
        for i, m in self.proxies.items():
            if m == i or m not in self.proxies:
                raise ValueError("proxy must be a different subset element")


def gram(A: SymMatrix, S) -> SymMatrix:
    """Gram matrix of the subset-restricted observation.

    Rows and columns outside S are zeroed before the product, so the result
    vanishes on them too.
    """
    n = A.n
    s = _subset_array(S, n)
    block = A.values[np.ix_(s, s)]
    G = np.zeros((n, n))
    G[np.ix_(s, s)] = block @ block.T
    return SymMatrix(G)


def _proxies_from_gram(G: np.ndarray, s: np.ndarray) -> dict[int, int]:
    """Minimax nearest-neighbor proxy for each i in s.

    m_i minimizes, over j in s (j != i), the worst inner product
    |<A_k, A_i - A_j>| over k in s excluding i and j; that inner product is
    G[k, i] - G[k, j].  Ties go to the smallest j.
    """
    m = s.size
    Gss = G[np.ix_(s, s)]
    out: dict[int, int] = {}
    for a in range(m):
        # rows: candidate k, columns: candidate j
        spread = np.abs(Gss[:, a][:, None] - Gss)
        spread[a, :] = -np.inf  # k = i excluded
        np.fill_diagonal(spread, -np.inf)  # k = j excluded
        criterion = spread.max(axis=0)
        criterion[a] = np.inf  # j = i excluded
        out[int(s[a])] = int(s[int(np.argmin(criterion))])
    return out


def nn_proxy(A: SymMatrix, S) -> dict[int, int]:
    """Robust nearest-neighbor proxy on the subset; needs at least 3 points."""
    s = _subset_array(S, A.n)
    if s.size < 3:
        raise ValueError("subset must contain at least 3 indices")
    return _proxies_from_gram(gram(A, s).values, s)


def estimate_distance(A: SymMatrix, S) -> DistanceEstimate:
    """Distance estimate on S x S from proxy-corrected inner products.

    Squared distances are n * max(0, <A_i, A_{m_i}> + <A_j, A_{m_j}>
    - 2 <A_i, A_j>) on the restricted matrix, with the ambient n as the
    multiplier even on proper subsets.
    """
    n = A.n
    s = _subset_array(S, n)
    if s.size < 3:
        raise ValueError("subset must contain at least 3 indices")
    G = gram(A, s).values
    proxies = _proxies_from_gram(G, s)
    prox_arr = np.array([proxies[int(i)] for i in s], dtype=np.int64)
    self_inner = G[s, prox_arr]
    Gss = G[np.ix_(s, s)]
    sq = n * np.clip(self_inner[:, None] + self_inner[None, :] - 2.0 * Gss, 0.0, None)
    block = np.sqrt(sq)
    np.fill_diagonal(block, 0.0)
    D = np.zeros((n, n))
    D[np.ix_(s, s)] = 0.5 * (block + block.T)  # symmetric up to roundoff
    return DistanceEstimate(SymMatrix(D), s, proxies)


def population_distance(F: SymMatrix, pi: Permutation, S) -> SymMatrix:
    """Signal row distances on the subset, zero elsewhere.

    D_{ij}(S) = n sqrt( (1/|S|) sum_{k in S} (F[pi_i][pi_k] - F[pi_j][pi_k])^2 ).
    For S = [n] this equals sqrt(n) times the row distance of the permuted
    signal.
    """
    n = F.n
    s = _subset_array(S, n)
    B = read_through(F, pi)[:, s][s, :]
    G = B @ B.T
    d = np.diagonal(G)
    sq = np.clip(d[:, None] + d[None, :] - 2.0 * G, 0.0, None)
    block = n * np.sqrt(sq / s.size)
    np.fill_diagonal(block, 0.0)
    out = np.zeros((n, n))
    out[np.ix_(s, s)] = 0.5 * (block + block.T)
    return SymMatrix(out)
