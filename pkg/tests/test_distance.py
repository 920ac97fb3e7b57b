"""Distance estimation: Gram plumbing, the minimax proxy, and D-hat/D-star.

The proxy is checked against a quartic reference that evaluates every inner
product directly, with no Gram shortcut.
"""

from __future__ import annotations

import numpy as np
import pytest

from sabre.core import Permutation, SymMatrix
from sabre.distance import (
    DistanceEstimate,
    estimate_distance,
    gram,
    nn_proxy,
    population_distance,
)
from sabre.models import (
    check_local_distance_equivalence,
    fit_average_lipschitz,
    gen_f_alpha,
    read_through,
)


def random_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    draw = rng.uniform(0.0, 1.0, size=(n, n))
    upper = np.triu(draw)
    return SymMatrix(upper + np.triu(draw, 1).T)


def duplicate_first_rows(F):
    """Symmetric matrix whose rows (and columns) 0 and 1 coincide."""
    n = F.n
    values = np.concatenate([[1, 1], np.arange(3, n + 1)])
    return SymMatrix(read_through(F, Permutation(values, zeta=1)))


def naive_proxy(A, S):
    """Quartic reference: direct inner products, no Gram reuse."""
    s = sorted(int(x) for x in set(S))
    n = A.n
    B = np.zeros((n, n))
    B[np.ix_(s, s)] = A.values[np.ix_(s, s)]
    out = {}
    for i in s:
        best = np.inf
        best_j = None
        for j in s:
            if j == i:
                continue
            worst = max(abs(float(B[k] @ (B[i] - B[j])))
                        for k in s if k not in (i, j))
            if worst < best:
                best = worst
                best_j = j
        out[i] = best_j
    return out


class TestGram:
    def test_identity_is_fixed_point(self):
        G = gram(SymMatrix(np.eye(5)), range(5))
        assert np.array_equal(G.values, np.eye(5))

    def test_inner_product_oracle_full(self):
        A = random_symmetric(6, 0)
        G = gram(A, range(6)).values
        for k in range(6):
            for i in range(6):
                for j in range(6):
                    direct = float(A.values[k] @ (A.values[i] - A.values[j]))
                    assert abs((G[k, i] - G[k, j]) - direct) < 1e-9

    def test_inner_product_oracle_subset(self):
        A = random_symmetric(7, 1)
        s = [0, 2, 3, 6]
        B = np.zeros((7, 7))
        B[np.ix_(s, s)] = A.values[np.ix_(s, s)]
        G = gram(A, s).values
        for k in s:
            for i in s:
                for j in s:
                    direct = float(B[k] @ (B[i] - B[j]))
                    assert abs((G[k, i] - G[k, j]) - direct) < 1e-9

    def test_excluded_row_zeroed(self):
        A = random_symmetric(6, 2)
        G = gram(A, [0, 1, 3, 4, 5]).values
        assert not G[2, :].any()
        assert not G[:, 2].any()

    def test_positive_semidefinite(self):
        A = random_symmetric(8, 3)
        G = gram(A, range(8)).values
        assert np.linalg.eigvalsh(G).min() > -1e-9

    def test_empty_subset_rejected(self):
        with pytest.raises(ValueError):
            gram(random_symmetric(4, 0), [])

    def test_out_of_range_subset_rejected(self):
        with pytest.raises(ValueError):
            gram(random_symmetric(4, 0), [0, 4])


class TestNNProxy:
    def test_duplicate_rows_attract(self):
        A = duplicate_first_rows(random_symmetric(7, 5))
        proxies = nn_proxy(A, range(7))
        assert proxies[0] == 1
        assert proxies[1] == 0

    def test_noiseless_banded_picks_neighbors(self):
        A = gen_f_alpha(6, 1.0)
        proxies = nn_proxy(A, range(6))
        for i in range(1, 5):
            assert proxies[i] in (i - 1, i + 1)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_naive_reference_full(self, seed):
        A = random_symmetric(8, seed)
        assert nn_proxy(A, range(8)) == naive_proxy(A, range(8))

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_naive_reference_subset(self, seed):
        A = random_symmetric(10, 100 + seed)
        s = [0, 1, 4, 6, 7, 9]
        assert nn_proxy(A, s) == naive_proxy(A, s)

    def test_small_subset_rejected(self):
        with pytest.raises(ValueError):
            nn_proxy(random_symmetric(5, 0), [1, 2])


class TestEstimateDistance:
    def test_duplicate_rows_at_zero_distance(self):
        A = duplicate_first_rows(random_symmetric(9, 8))
        est = estimate_distance(A, range(9))
        assert est.matrix[0, 1] == 0.0

    def test_invariants_on_subset(self):
        A = random_symmetric(10, 4)
        s = [0, 2, 3, 5, 8]
        est = estimate_distance(A, s)
        vals = est.matrix.values
        assert vals.min() >= 0
        assert not np.diagonal(vals).any()
        outside = np.setdiff1d(np.arange(10), s)
        assert not vals[outside, :].any()
        assert not vals[:, outside].any()
        assert set(est.proxies) == set(s)
        assert all(m in s and m != i for i, m in est.proxies.items())

    def test_noiseless_banded_adjacent_error(self):
        # population distance of adjacent rows is exactly 1; the plug-in
        # estimate keeps a dimension-scale bias that stays well under sqrt(n)
        A = gen_f_alpha(100, 1.0)
        est = estimate_distance(A, range(100))
        adjacent = np.array([est.matrix[i, i + 1] for i in range(99)])
        assert np.abs(adjacent - 1.0).max() <= 15.0

    def test_ignores_entries_outside_subset(self):
        A = random_symmetric(10, 6)
        s = list(range(6))
        est1 = estimate_distance(A, s)
        altered = A.values.copy()
        rng = np.random.default_rng(7)
        fresh = rng.uniform(0, 1, size=(10, 10))
        fresh = np.triu(fresh) + np.triu(fresh, 1).T
        altered[6:, :] = fresh[6:, :]
        altered[:, 6:] = fresh[:, 6:]
        est2 = estimate_distance(SymMatrix(altered), s)
        assert np.array_equal(est1.matrix.values, est2.matrix.values)
        assert est1.proxies == est2.proxies

    def test_small_subset_rejected(self):
        with pytest.raises(ValueError):
            estimate_distance(random_symmetric(5, 0), [0, 1])


class TestDistanceEstimateType:
    def test_rejects_leakage_outside_subset(self):
        vals = np.zeros((5, 5))
        vals[0, 4] = vals[4, 0] = 1.0
        with pytest.raises(ValueError):
            DistanceEstimate(SymMatrix(vals), [0, 1, 2], {0: 1, 1: 0, 2: 0})

    def test_rejects_negative_entries(self):
        vals = np.zeros((4, 4))
        vals[0, 1] = vals[1, 0] = -1.0
        with pytest.raises(ValueError):
            DistanceEstimate(SymMatrix(vals), [0, 1, 2], {0: 1, 1: 0, 2: 0})

    def test_rejects_nonzero_diagonal(self):
        vals = np.eye(4)
        with pytest.raises(ValueError):
            DistanceEstimate(SymMatrix(vals), range(4), {0: 1, 1: 0, 2: 0, 3: 0})

    def test_rejects_proxy_mismatch(self):
        vals = np.zeros((4, 4))
        with pytest.raises(ValueError):
            DistanceEstimate(SymMatrix(vals), range(4), {0: 1, 1: 0})
        with pytest.raises(ValueError):
            DistanceEstimate(SymMatrix(vals), range(4), {0: 0, 1: 0, 2: 0, 3: 0})


class TestPopulationDistance:
    def test_adjacent_banded_pair_is_one(self):
        F = gen_f_alpha(4, 1.0)
        D = population_distance(F, Permutation(np.arange(1, 5)), range(4))
        assert D[0, 1] == pytest.approx(1.0, abs=1e-12)
        assert D[2, 2] == 0.0

    def test_full_subset_matches_row_norm_formula(self):
        F = random_symmetric(9, 10)
        rng = np.random.default_rng(11)
        pi = Permutation(rng.permutation(9) + 1)
        D = population_distance(F, pi, range(9))
        rows = read_through(F, pi)
        for i in range(9):
            for j in range(9):
                direct = np.sqrt(9) * np.linalg.norm(rows[i] - rows[j])
                assert D[i, j] == pytest.approx(direct, abs=1e-9)

    def test_subset_formula_oracle(self):
        F = random_symmetric(9, 12)
        pi = Permutation(np.array([1, 1, 3, 4, 5, 6, 7, 8, 9]), zeta=1)
        s = [1, 3, 4, 6, 8]
        D = population_distance(F, pi, s)
        rows = read_through(F, pi)
        for i in s:
            for j in s:
                mean_sq = np.mean([(rows[i, k] - rows[j, k]) ** 2 for k in s])
                assert D[i, j] == pytest.approx(9 * np.sqrt(mean_sq), abs=1e-9)
        outside = np.setdiff1d(np.arange(9), s)
        assert not D.values[outside, :].any()

    def test_banded_upper_bound_by_gap(self):
        n = 100
        F = gen_f_alpha(n, 1.0)
        D = population_distance(F, Permutation(np.arange(1, n + 1)), range(n))
        idx = np.arange(n, dtype=float)
        gaps = np.abs(idx[:, None] - idx[None, :])
        assert np.all(D.values <= gaps + 1e-9)

    def test_satisfies_local_equivalence_with_fitted_constants(self):
        # the averaged-class constants transfer to the distance matrix with
        # zero additive slack and radius r ^ r'
        n = 100
        F = gen_f_alpha(n, 1.0)
        pi = Permutation(np.arange(1, n + 1))
        r = 0.25
        alpha_star, beta_star, rp_star = fit_average_lipschitz(F, r)
        D = population_distance(F, pi, range(n))
        assert check_local_distance_equivalence(
            D, pi, alpha_star, beta_star, 0.0, min(r, rp_star))

    def test_corrupted_entry_fails_equivalence(self):
        n = 20
        F = gen_f_alpha(n, 1.0)
        pi = Permutation(np.arange(1, n + 1))
        vals = population_distance(F, pi, range(n)).values.copy()
        vals[0, 1] = vals[1, 0] = float(n)
        assert not check_local_distance_equivalence(
            SymMatrix(vals), pi, 0.9, 1.0, 0.5, 1.0)
