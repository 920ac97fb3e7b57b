"""Synthetic Robinson matrices, the observation model, and class validators.

The generators produce the banded Toeplitz family F_alpha and the three
boundary examples (vanishing long-range similarities, a localized jump,
local plateaus), all through profiles a_ell with F[i][j] = a_{|i-j|} / n.

The validators are executable versions of the structural definitions:
Robinson monotonicity, the pointwise bi-Lipschitz class, the averaged
Lipschitz class (optionally read through a latent ordering), and local
distance equivalence.  Each report-style validator returns the binding
constraint with its margin, so callers can see how much slack a pass has
or where a failure occurs.  Companion fitters return the extremal
constants a matrix can support, found by direct evaluation of the same
inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sabre.core import Permutation, SymMatrix

# trim fraction for the averaged one-sided sums
C0 = 1.0 / 32.0

# slack for definitional comparisons on float inputs; entries live in [0, 1]
# so an absolute tolerance is scale-appropriate
_FLOAT_SLACK = 1e-9

_NOISE_KINDS = ("gaussian", "rademacher", "bernoulli-graph")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model for observations: kind, scale, and the draw seed."""

    kind: str
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in _NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")

    @property
    def effective_sigma(self) -> float:
        """Scale to feed into thresholds downstream.

        A centered Bernoulli variable is sub-Gaussian with proxy 1/2
        regardless of its mean, so the graph model reports 1/2.
        """
        if self.kind == "bernoulli-graph":
            return 0.5
        return self.sigma


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a class validator: pass/fail plus the binding constraint."""

    passed: bool
    worst_condition: str
    worst_location: tuple
    worst_margin: float

    def __bool__(self) -> bool:
        return self.passed


def gen_f_alpha(n: int, alpha: float) -> SymMatrix:
    """Banded Toeplitz matrix with entries 1 - alpha |i - j| / n."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if n < 2:
        raise ValueError("n must be at least 2")
    idx = np.arange(n)
    gaps = np.abs(idx[:, None] - idx[None, :])
    return SymMatrix(1.0 - alpha * gaps / n)


def gen_example(n: int, which: str, *, alpha: float | None = None,
                delta: float | None = None, ell0: int | None = None,
                c: int = 2) -> SymMatrix:
    """Boundary examples built from a profile a_ell, F[i][j] = a_{|i-j|} / n.

    vanishing: a_ell = n/2 - ell up to ell = n/2, zero beyond.
    jump:      a_ell = n - alpha*ell, dropping by an extra delta past ell0.
    plateau:   a_ell = n - floor(ell / c), flat segments of length c.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    ell = np.arange(n, dtype=np.float64)
    if which == "vanishing":
        a = np.maximum(n / 2.0 - ell, 0.0)
    elif which == "jump":
        if alpha is None or delta is None or ell0 is None:
            raise ValueError("jump example needs alpha, delta and ell0")
        a = n - alpha * ell - delta * (ell > ell0)
    elif which == "plateau":
        if c < 2:
            raise ValueError("plateau length c must be at least 2")
        a = n - np.floor(ell / c)
    else:
        raise ValueError(f"unknown example {which!r}")
    profile = a / n
    if profile.min() < 0.0 or profile.max() > 1.0:
        raise ValueError("parameters produce entries outside [0, 1]")
    idx = np.arange(n)
    return SymMatrix(profile[np.abs(idx[:, None] - idx[None, :])])


def read_through(F: SymMatrix, pi: Permutation) -> np.ndarray:
    """Entries of F indexed through the ordering: out[i][j] = F[pi_i][pi_j].

    Unlike permute_matrix this accepts approximate (non-bijective) orderings,
    in which case rows of F are repeated.
    """
    if pi.n != F.n:
        raise ValueError("permutation length does not match matrix size")
    idx = pi.positions - 1
    return F.values[np.ix_(idx, idx)]


def sample_observation(F: SymMatrix, pi: Permutation, noise: NoiseSpec) -> SymMatrix:
    """Draw an observation: the permuted signal plus symmetric noise.

    The upper triangle including the diagonal is drawn independently and
    mirrored.  Deterministic given the seed in the noise spec.
    """
    n = F.n
    signal = read_through(F, pi)
    rng = np.random.default_rng(noise.seed)
    if noise.kind == "gaussian":
        draw = signal + noise.sigma * rng.standard_normal((n, n))
    elif noise.kind == "rademacher":
        draw = signal + noise.sigma * (2.0 * rng.integers(0, 2, size=(n, n)) - 1.0)
    else:  # bernoulli-graph
        if F.values.min() < 0.0 or F.values.max() > 1.0:
            raise ValueError("bernoulli-graph noise needs F entries in [0, 1]")
        draw = (rng.random((n, n)) < signal).astype(np.float64)
    upper = np.triu(draw)
    return SymMatrix(upper + np.triu(draw, 1).T)


def sample_approx_permutation(n: int, zeta: int, seed: int) -> Permutation:
    """Random member of the spacing-zeta class.

    zeta == 0 gives a uniform exact permutation.  For zeta > 0 every value is
    drawn uniformly from {1,...,n} and spread violations are repaired by
    moving the nearest value onto each uncovered rank until the class
    invariant holds.  One valid sampling scheme among many; no canonical
    distribution is intended.
    """
    if zeta < 0 or zeta >= n:
        raise ValueError("zeta must satisfy 0 <= zeta < n")
    rng = np.random.default_rng(seed)
    if zeta == 0:
        return Permutation(rng.permutation(n) + 1)
    values = rng.integers(1, n + 1, size=n)
    targets = np.arange(1, n + 1)
    for _ in range(10 * n):
        spread = np.abs(values[None, :] - targets[:, None]).min(axis=1)
        bad = np.flatnonzero(spread > zeta)
        if bad.size == 0:
            break
        k = int(targets[bad[0]])
        mover = int(np.argmin(np.abs(values - k)))
        values = values.copy()
        values[mover] = k
    return Permutation(values, zeta=zeta)


def check_robinson(F: SymMatrix, mode: str = "weak") -> bool:
    """Monotone decay away from the diagonal, column by column.

    strict demands strictly decreasing entries moving away from the diagonal;
    weak allows ties.
    """
    if mode not in ("strict", "weak"):
        raise ValueError(f"unknown mode {mode!r}")
    vals = F.values
    n = F.n
    for k in range(n):
        down = vals[k:, k]
        up = vals[: k + 1, k]
        d_down = np.diff(down)
        d_up = np.diff(up)
        if mode == "strict":
            if d_down.size and d_down.max() >= 0:
                return False
            if d_up.size and d_up.min() <= 0:
                return False
        else:
            if d_down.size and d_down.max() > 0:
                return False
            if d_up.size and d_up.min() < 0:
                return False
    return True


def _pointwise_margins(vals: np.ndarray, alpha: float, beta: float):
    """Margins of the pointwise conditions for every pair i < j.

    Yields (i, j, upper margin, lower margin) where positive means slack.
    Lower margins cover both one-sided ranges (k <= i and k >= j); the
    binding side is recovered on demand by the caller.
    """
    n = vals.shape[0]
    # prefix/suffix extrema over k for the one-sided lower bounds
    for g in range(1, n):
        i = np.arange(0, n - g)
        j = i + g
        diff = vals[i] - vals[j]  # rows: pair index, cols: k
        upper = beta * g / n - np.abs(diff).max(axis=1)
        run_min = np.minimum.accumulate(diff, axis=1)
        left = run_min[np.arange(i.size), i]
        run_min_rev = np.minimum.accumulate((-diff)[:, ::-1], axis=1)[:, ::-1]
        right = run_min_rev[np.arange(i.size), j]
        lower = np.minimum(left, right) - alpha * g / n
        yield i, j, upper, lower


def check_bilipschitz(F: SymMatrix, alpha: float, beta: float) -> CheckReport:
    """Pointwise two-sided Lipschitz control on row differences."""
    vals = F.values
    n = F.n
    worst = (np.inf, "", ())
    for i, j, upper, lower in _pointwise_margins(vals, alpha, beta):
        for tag, margins in (("upper", upper), ("lower", lower)):
            pos = int(np.argmin(margins))
            m = float(margins[pos])
            if m < worst[0]:
                worst = (m, tag, (int(i[pos]), int(j[pos])))
    margin, tag, loc = worst
    if tag == "upper":
        i, j = loc
        k = int(np.argmax(np.abs(vals[i] - vals[j])))
        loc = (i, j, k)
    elif tag == "lower":
        i, j = loc
        diff = vals[i] - vals[j]
        cand_left = int(np.argmin(diff[: i + 1]))
        cand_right = j + int(np.argmin(-diff[j:]))
        if diff[cand_left] <= -diff[cand_right]:
            tag, loc = "lower-left", (i, j, cand_left)
        else:
            tag, loc = "lower-right", (i, j, cand_right)
    return CheckReport(margin >= -_FLOAT_SLACK, tag, loc, margin)


def fit_bilipschitz(F: SymMatrix) -> tuple[float, float]:
    """Extremal constants: the largest alpha and smallest beta the matrix
    supports under the pointwise conditions.  alpha may come out
    nonpositive when no positive constant works."""
    vals = F.values
    n = F.n
    beta_star = 0.0
    alpha_star = np.inf
    for i, j, upper, lower in _pointwise_margins(vals, 0.0, 0.0):
        g = j[0] - i[0]
        # margins were computed with alpha = beta = 0, so they reduce to
        # -max|diff| and min one-sided difference
        beta_star = max(beta_star, float((-upper).max()) * n / g)
        alpha_star = min(alpha_star, float(lower.min()) * n / g)
    return float(alpha_star), float(beta_star)


class _AveragedView:
    """Shared geometry for the averaged checks: positions, trimmed one-sided
    sums, and row norms, optionally read through an ordering.

    Without pi the canonical ordering 1..n is used.  q[i] is the position of
    item i; lsum[x][i] sums F[q_x][q_k] over items k with q_k < q_i - trim;
    rsum[x][j] sums over q_k > q_j + trim; norms holds the full canonical
    row distances ||F_{q_x} - F_{q_y}||.
    """

    def __init__(self, F: SymMatrix, pi: Permutation | None):
        n = F.n
        if pi is None:
            q = np.arange(1, n + 1)
            B = F.values
        else:
            q = pi.positions
            B = read_through(F, pi)
        trim = int(np.floor(C0 * n))
        order = np.argsort(q, kind="stable")
        sorted_q = q[order]
        prefix = np.cumsum(B[:, order], axis=1)

        cut_l = np.searchsorted(sorted_q, q - trim, side="left")
        cut_r = np.searchsorted(sorted_q, q + trim, side="right")
        picked_l = prefix[:, np.maximum(cut_l - 1, 0)]
        picked_r = prefix[:, np.maximum(cut_r - 1, 0)]
        self.lsum = np.where(cut_l[None, :] > 0, picked_l, 0.0)
        self.rsum = prefix[:, -1][:, None] - np.where(cut_r[None, :] > 0, picked_r, 0.0)

        G = F.values @ F.values.T
        row = q - 1
        sq = G[row, row][:, None] + G[row, row][None, :] - 2.0 * G[np.ix_(row, row)]
        self.norms = np.sqrt(np.clip(sq, 0.0, None))
        self.q = q.astype(np.float64)
        self.n = n

    def pairs_from(self, i: int):
        """Partners j with a strictly larger position, split local/far."""
        gaps = self.q - self.q[i]
        js = np.flatnonzero(gaps > 0)
        return js, gaps[js]

    def lower_sums(self, i: int, jl: np.ndarray) -> np.ndarray:
        """Best one-sided trimmed sum for the pairs (i, j), j in jl."""
        lower_left = self.lsum[i, i] - self.lsum[jl, i]
        lower_right = self.rsum[jl, jl] - self.rsum[i, jl]
        return np.maximum(lower_left, lower_right)


def check_average_lipschitz(F: SymMatrix, alpha: float, beta: float,
                            r: float, r_prime: float,
                            pi: Permutation | None = None) -> CheckReport:
    """Averaged Lipschitz class membership.

    Local pairs (position gap at most r n) must satisfy the averaged l2 upper
    bound and the trimmed one-sided l1 lower bound; distant pairs must stay
    separated (non-collapse).  With pi supplied, gaps and row indices are
    read through the ordering and each item k contributes once to the
    trimmed sums, duplicates included.
    """
    if min(alpha, beta, r, r_prime) <= 0:
        raise ValueError("parameters must be positive")
    view = _AveragedView(F, pi)
    n = view.n
    worst_by_tag: dict[str, tuple[float, tuple]] = {}

    def consider(margins, tag, i, jj):
        if margins.size == 0:
            return
        pos = int(np.argmin(margins))
        m = float(margins[pos])
        if tag not in worst_by_tag or m < worst_by_tag[tag][0]:
            worst_by_tag[tag] = (m, (i, int(jj[pos])))

    for i in range(n):
        js, g = view.pairs_from(i)
        local = g <= r * n
        jl, gl = js[local], g[local]
        if jl.size:
            consider(beta * gl / np.sqrt(n) - view.norms[i, jl], "l2-upper", i, jl)
            consider(view.lower_sums(i, jl) - alpha * gl, "l1-lower", i, jl)
        jf = js[~local]
        if jf.size:
            consider(view.norms[i, jf] - r_prime * np.sqrt(n), "non-collapse", i, jf)

    if not worst_by_tag:
        return CheckReport(True, "none", (), np.inf)
    # non-collapse is a strict inequality; the averaged bounds are closed,
    # so each condition is judged with its own strictness
    violations = []
    for tag, (m, loc) in worst_by_tag.items():
        ok = m > 0.0 if tag == "non-collapse" else m >= -_FLOAT_SLACK
        if not ok:
            violations.append((m, tag, loc))
    if violations:
        margin, tag, loc = min(violations)
        return CheckReport(False, tag, loc, margin)
    margin, tag, loc = min((m, tag, loc) for tag, (m, loc) in worst_by_tag.items())
    return CheckReport(True, tag, loc, margin)


def fit_average_lipschitz(F: SymMatrix, r: float,
                          pi: Permutation | None = None) -> tuple[float, float, float]:
    """Extremal constants for the averaged class at a given locality radius:
    largest alpha, smallest beta, and the largest r_prime bound (the validator
    needs r_prime strictly below the returned value)."""
    view = _AveragedView(F, pi)
    n = view.n
    alpha_star = np.inf
    beta_star = 0.0
    rp_star = np.inf

    for i in range(n):
        js, g = view.pairs_from(i)
        local = g <= r * n
        jl, gl = js[local], g[local]
        if jl.size:
            beta_star = max(beta_star, float((view.norms[i, jl] * np.sqrt(n) / gl).max()))
            alpha_star = min(alpha_star, float((view.lower_sums(i, jl) / gl).min()))
        jf = js[~local]
        if jf.size:
            rp_star = min(rp_star, float(view.norms[i, jf].min()) / np.sqrt(n))

    return float(alpha_star), float(beta_star), float(rp_star)


def check_local_distance_equivalence(D: SymMatrix, pi: Permutation,
                                     alpha: float, beta: float,
                                     omega: float, r: float) -> bool:
    """Sandwich check: alpha*gap - omega <= D <= beta*gap + omega on every
    pair whose gap or distance estimate is within r n."""
    if pi.n != D.n:
        raise ValueError("permutation length does not match matrix size")
    n = D.n
    pos = pi.positions.astype(np.float64)
    gap = np.abs(pos[:, None] - pos[None, :])
    vals = D.values
    triggered = np.minimum(gap, vals) <= r * n
    np.fill_diagonal(triggered, False)
    low_ok = vals >= alpha * gap - omega - _FLOAT_SLACK
    high_ok = vals <= beta * gap + omega + _FLOAT_SLACK
    return bool(np.all(~triggered | (low_ok & high_ok)))
