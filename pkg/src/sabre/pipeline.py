"""End-to-end seriation: distances, aggregated bisections, refinement, scores.

Threshold presets come in two regimes.  The asymptotic ladder (delta1 =
n^{3/4} ln n, ratio ln n) is kept verbatim for fidelity but violates the
n/8 working cap at any desk-scale n, so it carries a feasibility flag.  The
practical ladder trades the log factors for calibration constants kappa1
and ratio, capping the upper thresholds at n/8; it is the experiment
default.  The approximate-ordering ladder adds the spacing-driven term to
delta1 and shrinks the ratio to ln(n/(2 zeta + 1)).
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np

from sabre.core import (
    ComparisonMatrix,
    SymMatrix,
    permutation_from_comparison,
    round_scores,
)
from sabre.distance import estimate_distance
from sabre.stage1 import Thresholds, aggregate, bisect_all, orient
from sabre.stage2 import leave_one_out_plan, refine, tripartition

_PRESETS = ("theoretical", "practical", "approx", "ideal-test", "custom")
_SPLITS = ("tripartition", "leave-one-out")
_ROUNDINGS = ("round", "raw")


@dataclass(frozen=True)
class Tuning:
    """Threshold ladder plus its provenance and cap diagnostics."""

    delta1: float
    delta2: float
    delta3: float
    delta4: float
    preset: str = "custom"
    notes: tuple = ()
    feasible: bool = True

    def __post_init__(self) -> None:
        for name in ("delta1", "delta2", "delta3", "delta4"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.preset not in _PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}")
        object.__setattr__(self, "notes", tuple(str(m) for m in self.notes))

    @property
    def deltas(self) -> tuple:
        return (self.delta1, self.delta2, self.delta3, self.delta4)


def default_tuning_theoretical(n: int) -> Tuning:
    """Asymptotic ladder: delta1 = n^{3/4} ln n, then ratio ln n throughout.

    Flagged infeasible whenever delta2 exceeds the n/8 working cap, which at
    this growth happens for every n small enough to actually run.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    lg = math.log(n)
    d1 = n ** 0.75 * lg
    d2 = d1 * lg
    d3 = d2 * lg
    d4 = d3 * lg
    notes = ()
    feasible = d2 <= n / 8
    if not feasible:
        notes = (f"delta2 = {d2:.6g} exceeds the working cap n/8 = {n / 8:g};"
                 " the ladder is infeasible at this n",)
    return Tuning(d1, d2, d3, d4, "theoretical", notes, feasible)


def default_tuning_practical(n: int, kappa1: float = 3.0,
                             ratio: float = 3.0) -> Tuning:
    """Calibrated ladder: delta1 = kappa1 n^{3/4} (ln n)^{1/4}, geometric
    steps capped at n/8.  delta1 itself is never capped."""
    if n < 30:
        raise ValueError("need n >= 30")
    if kappa1 <= 0:
        raise ValueError("kappa1 must be positive")
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    cap = n / 8
    deltas = [kappa1 * n ** 0.75 * math.log(n) ** 0.25]
    notes = []
    for k in (2, 3, 4):
        step = ratio * deltas[-1]
        if step > cap:
            step = cap
            notes.append(f"delta{k} capped at n/8 = {cap:g}")
        deltas.append(step)
    return Tuning(*deltas, preset="practical", notes=tuple(notes))


def default_tuning_approx(n: int, zeta: int) -> Tuning:
    """Ladder for approximate orderings with spacing zeta.

    delta1 gains the sqrt((2 zeta + 1) n) ln(n / (2 zeta + 1)) term and the
    ratio shrinks to ln(n / (2 zeta + 1)); zeta = 0 recovers the asymptotic
    ladder with an extra sqrt(n) ln n summand.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if not 0 <= zeta < n / 2:
        raise ValueError("zeta must satisfy 0 <= zeta < n/2")
    width = 2 * zeta + 1
    lg = math.log(n / width)
    d1 = n ** 0.75 * math.log(n) + math.sqrt(width * n) * lg
    d2 = d1 * lg
    d3 = d2 * lg
    d4 = d3 * lg
    notes = ()
    feasible = d2 <= n / 8
    if not feasible:
        notes = (f"delta2 = {d2:.6g} exceeds the working cap n/8 = {n / 8:g};"
                 " the ladder is infeasible at this n",)
    return Tuning(d1, d2, d3, d4, "approx", notes, feasible)


@dataclass(frozen=True)
class SabreConfig:
    tuning: Tuning
    sigma: float
    split: str = "tripartition"
    rounding: str = "round"
    edge_rule: str = "or"
    seed: int = 0
    loo_cap: int = 400

    def __post_init__(self) -> None:
        if not isinstance(self.tuning, Tuning):
            raise TypeError("tuning must be a Tuning instance")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.split not in _SPLITS:
            raise ValueError(f"unknown split mode {self.split!r}")
        if self.rounding not in _ROUNDINGS:
            raise ValueError(f"unknown rounding mode {self.rounding!r}")
        if self.edge_rule not in ("or", "and"):
            raise ValueError(f"unknown edge_rule {self.edge_rule!r}")


@dataclass(frozen=True)
class Diagnostics:
    """What happened along the way, for experiment logs and debugging."""

    n: int
    preset: str
    notes: tuple
    feasible: bool
    degenerate: bool
    conflicts: int
    side_sizes: np.ndarray
    undecided_initial: int
    undecided_final: int
    timings_ms: tuple = ()


@dataclass(frozen=True)
class SabreResult:
    scores: np.ndarray
    comparisons: ComparisonMatrix
    diagnostics: Diagnostics


def _undecided_pairs(h: np.ndarray) -> int:
    return int(np.triu(h == 0, k=1).sum())


def sabre(A: SymMatrix, config: SabreConfig) -> SabreResult:
    """Full pass: estimate distances, aggregate bisections, refine, score.

    Scores are row-sum positions of the final comparison matrix, rounded per
    config; the global orientation stays arbitrary (losses minimize over the
    reversal).  When every bisection is empty (noise drowned the distance
    structure) the first stage decides nothing and the run degrades to the
    refinement alone instead of failing.
    """
    n = A.n
    t = config.tuning
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        thresholds = Thresholds(*t.deltas)
    notes = t.notes + tuple(str(w.message) for w in caught)

    tic = time.perf_counter
    t0 = tic()
    estimate = estimate_distance(A, np.arange(n))
    t1 = tic()
    bisections = bisect_all(estimate.matrix, thresholds, config.edge_rule)
    side_sizes = np.array([[g.size, gp.size] for g, gp in bisections],
                          dtype=np.int64)
    side_sizes.setflags(write=False)
    degenerate = bool((side_sizes[:, 0] == 0).all())
    if degenerate:
        H = ComparisonMatrix(np.zeros((n, n), dtype=np.int8))
        conflicts = 0
        notes += ("every bisection came out empty; stage 1 decided nothing",)
    else:
        H, conflicts = aggregate(orient(bisections))
    t2 = tic()

    if config.split == "tripartition":
        plan = tripartition(n, config.seed)
    else:
        plan = leave_one_out_plan()
    refined = refine(H, estimate.matrix, A, config.sigma, t.delta4, plan,
                     loo_cap=config.loo_cap)
    t3 = tic()

    scores = permutation_from_comparison(refined)
    if config.rounding == "round":
        scores = round_scores(scores)
    diagnostics = Diagnostics(
        n=n,
        preset=t.preset,
        notes=notes,
        feasible=t.feasible,
        degenerate=degenerate,
        conflicts=conflicts,
        side_sizes=side_sizes,
        undecided_initial=_undecided_pairs(H.values),
        undecided_final=_undecided_pairs(refined.values),
        timings_ms=(("distance", (t1 - t0) * 1e3),
                    ("bisections", (t2 - t1) * 1e3),
                    ("refine", (t3 - t2) * 1e3)),
    )
    return SabreResult(scores, refined, diagnostics)
