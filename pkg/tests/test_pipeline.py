"""Pipeline orchestration and tuning-preset tests.

Preset arithmetic is checked against hand-computed values and the defining
recursions; the feasibility and cap diagnostics are exercised on both sides
of their boundaries.  End-to-end runs stay small; the statistical behavior
of the full pipeline lives in the acceptance suite.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from sabre.core import Permutation, oracle_comparison_matrix, permutation_from_comparison
from sabre.evaluate import l_max
from sabre.models import NoiseSpec, gen_f_alpha, sample_observation
from sabre.pipeline import (
    SabreConfig,
    Tuning,
    default_tuning_approx,
    default_tuning_practical,
    default_tuning_theoretical,
    sabre,
)


def observed_instance(n: int, sigma: float, seed: int):
    rng = np.random.default_rng(seed)
    pi = Permutation(rng.permutation(n) + 1)
    A = sample_observation(gen_f_alpha(n, 1.0), pi,
                           NoiseSpec("gaussian", sigma, seed=seed + 1000))
    return A, pi


class TestTuning:
    def test_deltas_property(self):
        t = Tuning(1.0, 2.0, 3.0, 4.0)
        assert t.deltas == (1.0, 2.0, 3.0, 4.0)

    @pytest.mark.parametrize("field", ["delta1", "delta2", "delta3", "delta4"])
    def test_positive_deltas_required(self, field):
        values = {"delta1": 1.0, "delta2": 2.0, "delta3": 3.0, "delta4": 4.0}
        values[field] = 0.0
        with pytest.raises(ValueError, match=f"{field} must be positive"):
            Tuning(**values)

    def test_unknown_preset_rejected(self):
        with pytest.raises(ValueError, match="unknown preset"):
            Tuning(1.0, 2.0, 3.0, 4.0, preset="mystery")

    def test_notes_coerced_to_strings(self):
        t = Tuning(1.0, 2.0, 3.0, 4.0, notes=[1, "two"])
        assert t.notes == ("1", "two")


class TestTheoreticalPreset:
    def test_small_n_arithmetic(self):
        t = default_tuning_theoretical(20)
        assert t.delta1 == pytest.approx(20 ** 0.75 * math.log(20))
        assert t.delta1 == pytest.approx(28.33, abs=0.01)
        assert t.delta2 == pytest.approx(84.9, abs=0.1)

    def test_defining_recursion_exact(self):
        t = default_tuning_theoretical(20)
        lg = math.log(20)
        assert t.delta2 == t.delta1 * lg
        assert t.delta3 == t.delta2 * lg
        assert t.delta4 == t.delta3 * lg

    def test_desk_scale_flagged_infeasible(self):
        t = default_tuning_theoretical(1000)
        assert t.delta2 == pytest.approx(8485, abs=5)
        assert not t.feasible
        assert any("n/8" in note for note in t.notes)

    def test_feasibility_frontier(self):
        # delta2 = n^{3/4} ln^2 n crosses n/8 between 1e16 and 1e17
        assert not default_tuning_theoretical(10 ** 16).feasible
        assert default_tuning_theoretical(10 ** 17).feasible

    def test_minimum_n(self):
        with pytest.raises(ValueError, match="need n >= 3"):
            default_tuning_theoretical(2)

    def test_preset_tag(self):
        assert default_tuning_theoretical(50).preset == "theoretical"


class TestPracticalPreset:
    def test_worked_example_n1000(self):
        t = default_tuning_practical(1000)
        assert t.delta1 == pytest.approx(865.7, abs=2)
        assert t.delta2 == 125.0
        assert t.delta3 == 125.0
        assert t.delta4 == 125.0
        assert sum("capped at n/8" in note for note in t.notes) == 3

    def test_uncapped_small_ladder(self):
        # kappa1 small enough that the ratio chain stays under n/8
        t = default_tuning_practical(1000, kappa1=0.1, ratio=1.2)
        assert t.delta1 == pytest.approx(0.1 * 1000 ** 0.75 * math.log(1000) ** 0.25)
        assert t.delta2 == pytest.approx(1.2 * t.delta1)
        assert t.notes == ()

    def test_mixed_caps(self):
        # first step fits, later steps bind
        t = default_tuning_practical(64, kappa1=0.08, ratio=2.5)
        assert t.delta2 == pytest.approx(2.5 * t.delta1)
        assert t.delta3 == 8.0
        assert t.delta4 == 8.0

    @pytest.mark.parametrize("kwargs", [{"kappa1": 0.0}, {"kappa1": -1.0},
                                        {"ratio": 0.0}, {"ratio": -2.0}])
    def test_nonpositive_knobs_rejected(self, kwargs):
        with pytest.raises(ValueError, match="must be positive"):
            default_tuning_practical(100, **kwargs)

    def test_monotone_in_kappa1(self):
        lo = default_tuning_practical(200, kappa1=1.0)
        hi = default_tuning_practical(200, kappa1=2.5)
        assert all(h >= l for h, l in zip(hi.deltas, lo.deltas))

    def test_minimum_n(self):
        with pytest.raises(ValueError, match="need n >= 30"):
            default_tuning_practical(29)


class TestApproxPreset:
    def test_worked_example(self):
        t = default_tuning_approx(100, 0)
        expected = 100 ** 0.75 * math.log(100) + 10.0 * math.log(100)
        assert t.delta1 == pytest.approx(expected)
        assert t.delta1 == pytest.approx(191.7, abs=0.1)

    def test_zeta_zero_reduction(self):
        t = default_tuning_approx(100, 0)
        assert t.delta1 == pytest.approx(100 ** 0.75 * math.log(100)
                                         + math.sqrt(100) * math.log(100))

    def test_defining_recursion(self):
        t = default_tuning_approx(200, 5)
        lg = math.log(200 / 11)
        assert t.delta2 == pytest.approx(t.delta1 * lg)
        assert t.delta3 == pytest.approx(t.delta2 * lg)

    def test_monotone_in_zeta_below_knee(self):
        # the spacing term sqrt((2z+1)n) ln(n/(2z+1)) rises only while
        # 2z+1 < n/e^2; at n=100 that covers zeta <= 5
        deltas = [default_tuning_approx(100, z).delta1 for z in range(6)]
        assert all(b > a for a, b in zip(deltas, deltas[1:]))

    @pytest.mark.parametrize("zeta", [-1, 50, 60])
    def test_zeta_range_enforced(self, zeta):
        with pytest.raises(ValueError, match="zeta"):
            default_tuning_approx(100, zeta)

    def test_preset_tag(self):
        assert default_tuning_approx(100, 3).preset == "approx"


class TestSabreConfig:
    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError, match="sigma"):
            SabreConfig(Tuning(1, 2, 3, 4), -0.1)

    def test_unknown_split_rejected(self):
        with pytest.raises(ValueError, match="split"):
            SabreConfig(Tuning(1, 2, 3, 4), 0.5, split="bipartition")

    def test_unknown_rounding_rejected(self):
        with pytest.raises(ValueError, match="rounding"):
            SabreConfig(Tuning(1, 2, 3, 4), 0.5, rounding="floor")

    def test_unknown_edge_rule_rejected(self):
        with pytest.raises(ValueError, match="edge_rule"):
            SabreConfig(Tuning(1, 2, 3, 4), 0.5, edge_rule="xor")


class TestSabre:
    def test_oracle_comparison_round_trip(self):
        pi = Permutation(np.random.default_rng(3).permutation(25) + 1)
        scores = permutation_from_comparison(oracle_comparison_matrix(pi))
        assert np.array_equal(scores, pi.positions.astype(np.float64))

    def test_deterministic(self):
        A, _ = observed_instance(40, 0.05, 11)
        cfg = SabreConfig(Tuning(8.0, 12.0, 12.0, 3.0), 0.05, seed=7)
        first = sabre(A, cfg)
        second = sabre(A, cfg)
        assert np.array_equal(first.scores, second.scores)
        assert np.array_equal(first.comparisons.values, second.comparisons.values)

    def test_seed_changes_split(self):
        A, _ = observed_instance(40, 0.05, 12)
        cfg = lambda s: SabreConfig(Tuning(8.0, 12.0, 12.0, 3.0), 0.05, seed=s)
        base = sabre(A, cfg(0)).diagnostics
        assert base.undecided_final <= base.undecided_initial

    def test_rounded_scores_in_range(self):
        A, _ = observed_instance(45, 0.3, 13)
        res = sabre(A, SabreConfig(Tuning(10.0, 15.0, 15.0, 4.0), 0.3, seed=1))
        assert res.scores.dtype == np.int64
        assert res.scores.min() >= 1
        assert res.scores.max() <= 45

    def test_raw_rounds_to_round(self):
        A, _ = observed_instance(40, 0.1, 14)
        tune = Tuning(8.0, 12.0, 12.0, 3.0)
        raw = sabre(A, SabreConfig(tune, 0.1, rounding="raw", seed=2))
        rounded = sabre(A, SabreConfig(tune, 0.1, rounding="round", seed=2))
        assert raw.scores.dtype == np.float64
        assert np.array_equal(np.ceil(raw.scores - 0.5).astype(np.int64),
                              rounded.scores)

    def test_support_only_grows(self):
        A, _ = observed_instance(50, 0.2, 15)
        res = sabre(A, SabreConfig(Tuning(9.0, 14.0, 14.0, 4.0), 0.2, seed=3))
        d = res.diagnostics
        assert d.undecided_final <= d.undecided_initial

    def test_noiseless_recovery(self):
        A, pi = observed_instance(60, 0.0, 16)
        res = sabre(A, SabreConfig(Tuning(9.0, 13.0, 15.0, 3.0), 0.0, seed=4))
        assert l_max(res.scores.astype(float), pi) <= 0.05

    def test_moderate_noise_recovery_n600(self):
        # pilot-calibrated practical constants (kappa1=0.3, ratio=3.0):
        # the kappa1 window at sigma=0.05 is roughly [0.25, 0.33]; 0.35
        # already tips half the runs into the merged regime
        n, sigma = 600, 0.05
        tune = default_tuning_practical(n, kappa1=0.3, ratio=3.0)
        hits = 0
        for seed in range(10):
            A, pi = observed_instance(n, sigma, seed)
            res = sabre(A, SabreConfig(tune, sigma, seed=seed))
            hits += l_max(res.scores.astype(float), pi) <= 0.05
        assert hits >= 9

    def test_tripartition_needs_nine(self):
        A, _ = observed_instance(8, 0.0, 17)
        with pytest.raises(ValueError, match="needs n >= 9"):
            sabre(A, SabreConfig(Tuning(2.0, 3.0, 3.0, 1.0), 0.0))

    def test_leave_one_out_smoke(self):
        A, pi = observed_instance(30, 0.0, 18)
        res = sabre(A, SabreConfig(Tuning(6.0, 9.0, 10.0, 2.0), 0.0,
                                   split="leave-one-out", seed=5))
        assert res.scores.shape == (30,)
        assert res.diagnostics.undecided_final <= res.diagnostics.undecided_initial

    def test_high_noise_degenerate_path(self):
        # theoretical ladder at this n sits far above every estimated
        # distance, so stage 1 decides nothing and the scores collapse
        A, pi = observed_instance(200, 20.0, 19)
        tune = default_tuning_theoretical(200)
        res = sabre(A, SabreConfig(tune, 20.0, seed=6))
        d = res.diagnostics
        assert d.degenerate
        assert d.undecided_final == 200 * 199 // 2
        assert np.unique(res.scores).size == 1
        assert l_max(res.scores.astype(float), pi) == pytest.approx(0.5, abs=0.01)

    def test_diagnostics_shape(self):
        A, _ = observed_instance(40, 0.05, 20)
        res = sabre(A, SabreConfig(Tuning(8.0, 12.0, 12.0, 3.0), 0.05, seed=8))
        d = res.diagnostics
        assert d.n == 40
        assert d.side_sizes.shape == (40, 2)
        assert not d.side_sizes.flags.writeable
        assert d.conflicts >= 0

    def test_disordered_practical_ladder_noted(self):
        # default practical constants at n=40 cap the upper deltas below
        # delta1; the threshold-order warning must surface in diagnostics
        A, _ = observed_instance(40, 0.05, 21)
        tune = default_tuning_practical(40)
        res = sabre(A, SabreConfig(tune, 0.05, seed=9))
        assert any("not ordered" in note for note in res.diagnostics.notes)
