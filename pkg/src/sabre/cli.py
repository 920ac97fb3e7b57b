"""Command-line surface: file formats, seeded runs, and the rate harness.

Formats are deliberately boring.  Matrices travel as headerless CSV with
one row per line; permutations and score vectors as one value per line,
integers for exact positions and decimals for raw scores; manifests,
diagnostics, and reports as JSON carrying a schema_version field.  Floats
are serialized with shortest round-trip formatting, so rewriting a file
never drifts and byte-identical reruns are testable per platform.

Every command is a deterministic function of its inputs and seeds.  The
experiment harness derives one seed per (n, trial) cell from the master
seed through the fmix64 chain documented at trial_seed; trials may run in
a process pool (SABRE_THREADS caps the width) and rows are re-sorted by
(n, trial) before writing, so parallelism cannot reorder output.  The one
intentionally nondeterministic column is runtime_ms; reruns match byte for
byte everywhere outside it.

Exit codes: 0 success, 2 validation error (bad flags, bad file contents,
manifest schema violations), 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from sabre.core import Permutation, SymMatrix, round_scores
from sabre.evaluate import l_frobenius, loss_report
from sabre.models import (
    CheckReport,
    NoiseSpec,
    check_average_lipschitz,
    check_bilipschitz,
    check_local_distance_equivalence,
    check_robinson,
    fit_average_lipschitz,
    fit_bilipschitz,
    gen_example,
    gen_f_alpha,
    sample_approx_permutation,
    sample_observation,
)
from sabre.pipeline import (
    SabreConfig,
    Tuning,
    default_tuning_approx,
    default_tuning_practical,
    default_tuning_theoretical,
    sabre,
)

SCHEMA_VERSION = 1

_MASK64 = (1 << 64) - 1
_LOSSES = ("l_max", "l_kendall", "l_one", "l_frobenius")
_MODELS = ("f_alpha", "vanishing", "jump", "plateau")
_PRESET_CHOICES = ("practical", "theoretical", "approx", "custom")
_SEED_PERMUTATION = 1  # substream tags, fixed forever
_SEED_NOISE = 2
_SEED_SPLIT = 3


# ---------------------------------------------------------------- seeds


def mix64(z: int) -> int:
    """Murmur-style 64-bit finalizer (fmix64); bijective on 64-bit words."""
    z &= _MASK64
    z ^= z >> 33
    z = (z * 0xFF51AFD7ED558CCD) & _MASK64
    z ^= z >> 33
    z = (z * 0xC4CEB9FE1A85EC53) & _MASK64
    z ^= z >> 33
    return z

def trial_seed(master: int, n: int, trial: int) -> int:
    """Per-cell seed: mix64(mix64(mix64(master) ^ n) ^ trial).

    Each argument passes through a full finalizer round before the next is
    xored in, so neighboring (n, trial) cells land in unrelated streams.
    Injectivity over any concrete grid is asserted by the test suite rather
    than proved; the chain is fixed and documented in the README.
    """
    return mix64(mix64(mix64(master) ^ n) ^ trial)

def substream(seed: int, tag: int) -> int:
    """Named sub-seed of a cell seed: tag 1 draws the permutation, 2 the
    noise, 3 the sample split."""
    return mix64(mix64(seed) ^ tag)


# ---------------------------------------------------------- file formats


def _fmt(x: float) -> str:
    # repr of a Python float is the shortest string that round-trips
    return repr(float(x))


def write_matrix(path: str, values: np.ndarray) -> None:
    values = np.asarray(values)
    with open(path, "w", encoding="ascii") as fh:
        for row in values:
            fh.write(",".join(_fmt(v) for v in row))
            fh.write("\n")


def read_matrix(path: str) -> SymMatrix:
    values = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    if values.shape[0] != values.shape[1]:
        raise ValueError(
            f"matrix file {path} is {values.shape[0]}x{values.shape[1]}, not square")
    return SymMatrix(values)


def write_scores(path: str, scores: np.ndarray) -> None:
    """One value per line: integers for exact positions, decimals for raw."""
    scores = np.asarray(scores)
    integral = np.issubdtype(scores.dtype, np.integer)
    with open(path, "w", encoding="ascii") as fh:
        for v in scores:
            fh.write(str(int(v)) if integral else _fmt(v))
            fh.write("\n")


def read_scores(path: str) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"score file {path} is empty")
    try:
        return np.array([int(v) for v in lines], dtype=np.int64)
    except OverflowError:
        pass
    except ValueError:
        pass
    try:
        return np.array([float(v) for v in lines], dtype=np.float64)
    except ValueError as exc:
        raise ValueError(f"score file {path}: {exc}") from None


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def read_json(path: str) -> dict:
    with open(path, encoding="ascii") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: {exc}") from None
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return payload


# ------------------------------------------------------------- manifests


@dataclass(frozen=True)
class ExperimentManifest:
    """Validated experiment description; see the README for the JSON shape.

    tuning maps straight onto the pipeline presets, with an optional per_n
    table of explicit threshold ladders that overrides the preset at the
    listed sizes (calibration constants are pinned per n by pilot runs, so
    the override is the normal path for rate experiments, not an escape
    hatch).  l_max is always computed; losses only widens the output.
    """

    model: dict
    noise: dict
    n_grid: tuple
    trials: int
    tuning: dict
    split: str
    zeta: int
    losses: tuple
    output: str
    master_seed: int
    loo_cap: int = 400

    def __post_init__(self) -> None:
        name = self.model.get("name")
        if name not in _MODELS:
            raise ValueError(f"unknown model {name!r}")
        kind = self.noise.get("kind")
        sigma = self.noise.get("sigma")
        if kind is None or sigma is None:
            raise ValueError("noise needs kind and sigma")
        if sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if not self.n_grid or any(int(n) != n for n in self.n_grid):
            raise ValueError("n_grid must be a nonempty list of integers")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        preset = self.tuning.get("preset")
        if preset not in _PRESET_CHOICES:
            raise ValueError(f"unknown tuning preset {preset!r}")
        per_n = self.tuning.get("per_n", {})
        for key, ladder in per_n.items():
            if int(key) not in self.n_grid:
                raise ValueError(f"per_n override for n={key} not in n_grid")
            missing = {f"delta{k}" for k in (1, 2, 3, 4)} - set(ladder)
            if missing:
                raise ValueError(f"per_n override for n={key} misses {sorted(missing)}")
        if preset == "custom":
            uncovered = [n for n in self.n_grid if str(n) not in per_n]
            if uncovered:
                raise ValueError(
                    f"custom tuning needs per_n ladders for every n; missing {uncovered}")
        if self.split not in ("tripartition", "leave-one-out"):
            raise ValueError(f"unknown split mode {self.split!r}")
        if self.zeta < 0:
            raise ValueError("zeta must be nonnegative")
        unknown = set(self.losses) - set(_LOSSES)
        if unknown:
            raise ValueError(f"unknown losses {sorted(unknown)}")
        if "l_max" not in self.losses:
            object.__setattr__(self, "losses", ("l_max",) + tuple(self.losses))
        if not self.output:
            raise ValueError("output path must be nonempty")

    _FIELDS = ("schema_version", "model", "noise", "n_grid", "trials", "tuning",
               "split", "zeta", "losses", "output", "master_seed", "loo_cap")

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentManifest":
        unknown = set(payload) - set(cls._FIELDS)
        if unknown:
            raise ValueError(f"unknown manifest fields {sorted(unknown)}")
        missing = set(cls._FIELDS) - {"loo_cap", "zeta", "losses"} - set(payload)
        if missing:
            raise ValueError(f"manifest misses fields {sorted(missing)}")
        if payload["schema_version"] != SCHEMA_VERSION:
            raise ValueError(
                f"manifest schema_version {payload['schema_version']!r} unsupported")
        return cls(
            model=dict(payload["model"]),
            noise=dict(payload["noise"]),
            n_grid=tuple(int(n) for n in payload["n_grid"]),
            trials=int(payload["trials"]),
            tuning=dict(payload["tuning"]),
            split=payload["split"],
            zeta=int(payload.get("zeta", 0)),
            losses=tuple(payload.get("losses", ("l_max",))),
            output=payload["output"],
            master_seed=int(payload["master_seed"]),
            loo_cap=int(payload.get("loo_cap", 400)),
        )


def _model_matrix(model: dict, n: int) -> SymMatrix:
    params = {k: v for k, v in model.items() if k != "name"}
    name = model["name"]
    if name == "f_alpha":
        return gen_f_alpha(n, params.pop("alpha", 1.0))
    if name == "jump":
        return gen_example(n, "jump", alpha=params.pop("alpha"),
                           delta=params.pop("delta"), ell0=int(params.pop("ell0")))
    if name == "plateau":
        return gen_example(n, "plateau", c=int(params.pop("c", 2)))
    return gen_example(n, "vanishing")


def _resolve_tuning(manifest: ExperimentManifest, n: int) -> Tuning:
    per_n = manifest.tuning.get("per_n", {})
    if str(n) in per_n:
        ladder = per_n[str(n)]
        return Tuning(*(float(ladder[f"delta{k}"]) for k in (1, 2, 3, 4)))
    preset = manifest.tuning["preset"]
    if preset == "theoretical":
        return default_tuning_theoretical(n)
    if preset == "approx":
        return default_tuning_approx(n, int(manifest.tuning.get("zeta", manifest.zeta)))
    knobs = {}
    if "kappa1" in manifest.tuning:
        knobs["kappa1"] = float(manifest.tuning["kappa1"])
    if "ratio" in manifest.tuning:
        knobs["ratio"] = float(manifest.tuning["ratio"])
    return default_tuning_practical(n, **knobs)


# ------------------------------------------------------------ experiment


def _run_trial(payload: tuple) -> dict:
    """One (n, trial) cell: sample, seriate, score.  Top level for pickling."""
    mdict, n, trial = payload
    manifest = ExperimentManifest.from_dict(mdict)
    seed = trial_seed(manifest.master_seed, n, trial)
    tuning = _resolve_tuning(manifest, n)

    start = time.perf_counter()
    pi = sample_approx_permutation(n, manifest.zeta, seed=substream(seed, _SEED_PERMUTATION))
    F = _model_matrix(manifest.model, n)
    noise = NoiseSpec(manifest.noise["kind"], manifest.noise["sigma"],
                      seed=substream(seed, _SEED_NOISE))
    A = sample_observation(F, pi, noise)
    config = SabreConfig(tuning, manifest.noise["sigma"], split=manifest.split,
                         seed=substream(seed, _SEED_SPLIT), loo_cap=manifest.loo_cap)
    result = sabre(A, config)
    runtime_ms = int(round((time.perf_counter() - start) * 1e3))

    scores = result.scores
    losses: dict = {}
    report = loss_report(scores.astype(np.float64), pi)
    losses["l_max"] = report.l_max
    if "l_one" in manifest.losses:
        losses["l_one"] = report.l_one
    if "l_kendall" in manifest.losses:
        losses["l_kendall"] = report.l_kendall
    if "l_frobenius" in manifest.losses:
        try:
            losses["l_frobenius"] = l_frobenius(F, Permutation(scores), pi)
        except ValueError:
            losses["l_frobenius"] = None  # tied scores or approximate truth
    return {
        "n": n, "trial": trial, "seed": seed,
        "sigma": manifest.noise["sigma"], "model": manifest.model["name"],
        "deltas": tuning.deltas,
        "losses": losses,
        "undecided_pairs": result.diagnostics.undecided_final,
        "runtime_ms": runtime_ms,
    }


def _worker_count(jobs: int) -> int:
    raw = os.environ.get("SABRE_THREADS", "")
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise ValueError(f"SABRE_THREADS must be an integer, got {raw!r}") from None
        if cap < 1:
            raise ValueError("SABRE_THREADS must be at least 1")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(jobs, cap))


def fit_slope(ns, medians) -> float | None:
    """Least squares slope of log median against log n; None when the fit
    is undefined (single point or a zero median)."""
    if len(ns) < 2 or any(m <= 0 for m in medians):
        return None
    x = np.log(np.asarray(ns, dtype=np.float64))
    y = np.log(np.asarray(medians, dtype=np.float64))
    x -= x.mean()
    y -= y.mean()
    return float((x * y).sum() / (x * x).sum())


def experiment_summary(rows: list, losses: tuple) -> dict:
    """Per-n medians of every requested loss, the sqrt-log corrected l_max
    column, and the fitted slope of log median(l_max) against log n."""
    ns = sorted({row["n"] for row in rows})
    medians: dict = {}
    for n in ns:
        cell: dict = {}
        for name in losses:
            vals = [row["losses"][name] for row in rows
                    if row["n"] == n and row["losses"].get(name) is not None]
            cell[name] = float(np.median(vals)) if vals else None
        cell["corrected"] = (None if cell["l_max"] is None
                             else n * cell["l_max"] / math.sqrt(math.log(n)))
        medians[n] = cell
    slope = fit_slope(ns, [medians[n]["l_max"] for n in ns]) \
        if all(medians[n]["l_max"] is not None for n in ns) else None
    return {"ns": ns, "medians": medians, "slope": slope}


def write_results_csv(path: str, rows: list, losses: tuple, summary: dict) -> None:
    """Data rows, then the summary as # comment lines (pandas: comment='#').

    Summary grammar, one record per line:
      # median,<n>,<median l_max>,<n * median / sqrt(ln n)>
      # slope,<value or not-applicable>
    """
    header = ["n", "trial", "seed", "sigma", "model",
              "delta1", "delta2", "delta3", "delta4",
              *losses, "undecided_pairs", "runtime_ms"]
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [str(row["n"]), str(row["trial"]), str(row["seed"]),
                     _fmt(row["sigma"]), row["model"],
                     *(_fmt(d) for d in row["deltas"])]
            for name in losses:
                value = row["losses"].get(name)
                cells.append("" if value is None else _fmt(value))
            cells.append(str(row["undecided_pairs"]))
            cells.append(str(row["runtime_ms"]))
            fh.write(",".join(cells) + "\n")
        for n in summary["ns"]:
            cell = summary["medians"][n]
            med = "" if cell["l_max"] is None else _fmt(cell["l_max"])
            corr = "" if cell["corrected"] is None else _fmt(cell["corrected"])
            fh.write(f"# median,{n},{med},{corr}\n")
        slope = summary["slope"]
        fh.write(f"# slope,{'not-applicable' if slope is None else _fmt(slope)}\n")


def cmd_experiment(args) -> int:
    mdict = read_json(args.manifest)
    manifest = ExperimentManifest.from_dict(mdict)
    _model_matrix(manifest.model, manifest.n_grid[0])  # fail fast on bad params
    out = args.out or manifest.output

    jobs = [(mdict, n, t) for n in manifest.n_grid for t in range(manifest.trials)]
    workers = _worker_count(len(jobs))
    if workers == 1:
        rows = [_run_trial(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_trial, jobs))
    rows.sort(key=lambda row: (row["n"], row["trial"]))

    summary = experiment_summary(rows, manifest.losses)
    write_results_csv(out, rows, manifest.losses, summary)
    print(f"wrote {out} ({len(rows)} rows)")
    for n in summary["ns"]:
        cell = summary["medians"][n]
        print(f"n={n}: median l_max {cell['l_max']:.6g}"
              f"  corrected {cell['corrected']:.6g}")
    slope = summary["slope"]
    print("slope of log median(l_max) vs log n: "
          + ("not-applicable" if slope is None else f"{slope:.6g}"))
    return 0


# -------------------------------------------------------------- generate


def cmd_generate(args) -> int:
    if args.sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if args.zeta < 0:
        raise ValueError("zeta must be nonnegative")
    model = {"name": args.model}
    if args.model in ("f_alpha", "jump"):
        model["alpha"] = args.alpha
    if args.model == "jump":
        if args.delta is None or args.ell0 is None:
            raise ValueError("jump model needs --delta and --ell0")
        model["delta"] = args.delta
        model["ell0"] = args.ell0
    if args.model == "plateau":
        model["c"] = args.c
    F = _model_matrix(model, args.n)

    pi = sample_approx_permutation(args.n, args.zeta,
                                   seed=substream(args.seed, _SEED_PERMUTATION))
    noise = NoiseSpec(args.noise, args.sigma, seed=substream(args.seed, _SEED_NOISE))
    A = sample_observation(F, pi, noise)

    os.makedirs(args.out, exist_ok=True)
    files = {"A": os.path.join(args.out, "A.csv"),
             "pi": os.path.join(args.out, "pi.txt"),
             "manifest": os.path.join(args.out, "manifest.json")}
    write_matrix(files["A"], A.values)
    write_scores(files["pi"], pi.positions)
    if not args.no_signal:
        files["F"] = os.path.join(args.out, "F.csv")
        write_matrix(files["F"], F.values)
    write_json(files["manifest"], {
        "schema_version": SCHEMA_VERSION,
        "command": "generate",
        "model": model,
        "n": args.n,
        "zeta": args.zeta,
        "noise": {"kind": args.noise, "sigma": args.sigma},
        "seed": args.seed,
        "files": sorted(os.path.basename(p) for p in files.values()),
    })
    print(f"wrote {len(files)} files under {args.out}")
    return 0


# --------------------------------------------------------------- seriate


def _tuning_from_flags(args, n: int) -> Tuning:
    if args.tuning == "custom":
        deltas = (args.delta1, args.delta2, args.delta3, args.delta4)
        if any(d is None for d in deltas):
            raise ValueError("custom tuning needs --delta1 through --delta4")
        return Tuning(*deltas)
    if args.tuning == "theoretical":
        return default_tuning_theoretical(n)
    if args.tuning == "approx":
        if args.zeta is None:
            raise ValueError("approx tuning needs --zeta")
        return default_tuning_approx(n, args.zeta)
    knobs = {}
    if args.kappa1 is not None:
        knobs["kappa1"] = args.kappa1
    if args.ratio is not None:
        knobs["ratio"] = args.ratio
    return default_tuning_practical(n, **knobs)


def cmd_seriate(args) -> int:
    A = read_matrix(args.matrix)
    tuning = _tuning_from_flags(args, A.n)
    config = SabreConfig(tuning, args.sigma, split=args.mode,
                         rounding=args.rounding, edge_rule=args.edge_rule,
                         seed=args.seed, loo_cap=args.loo_cap)
    start = time.perf_counter()
    result = sabre(A, config)
    total_ms = int(round((time.perf_counter() - start) * 1e3))

    write_scores(args.out, result.scores)
    if args.comparisons:
        write_matrix(args.comparisons, result.comparisons.values.astype(np.int64))
    diag = result.diagnostics
    write_json(args.diagnostics, {
        "schema_version": SCHEMA_VERSION,
        "command": "seriate",
        "n": diag.n,
        "sigma": args.sigma,
        "split": args.mode,
        "rounding": args.rounding,
        "edge_rule": args.edge_rule,
        "seed": args.seed,
        "tuning": {"preset": diag.preset, "deltas": list(tuning.deltas),
                   "feasible": diag.feasible},
        "notes": list(diag.notes),
        "degenerate": diag.degenerate,
        "conflicts": diag.conflicts,
        "undecided_initial": diag.undecided_initial,
        "undecided_final": diag.undecided_final,
        "timings_ms": {**dict(diag.timings_ms), "total": total_ms},
    })
    print(f"n={diag.n} undecided {diag.undecided_initial} -> {diag.undecided_final}"
          f"  wrote {args.out}")
    return 0


# -------------------------------------------------------------- evaluate


def cmd_evaluate(args) -> int:
    requested = tuple(name.strip() for name in args.losses.split(","))
    unknown = set(requested) - set(_LOSSES)
    if unknown:
        raise ValueError(f"unknown losses {sorted(unknown)}")
    est = read_scores(args.est)
    truth_values = read_scores(args.truth)
    if not np.issubdtype(truth_values.dtype, np.integer):
        raise ValueError("truth file must contain integer positions")
    truth = Permutation(truth_values)

    F = None
    if "l_frobenius" in requested:
        if not args.matrix_f:
            raise ValueError("frobenius requires signal matrix")
        F = read_matrix(args.matrix_f)

    # real-valued estimates: max and l1 read them raw, the sign and matrix
    # losses need integer positions, so those two see the rounded vector
    integral = np.issubdtype(est.dtype, np.integer)
    raw_report = loss_report(est.astype(np.float64), truth)
    rounded = est if integral else round_scores(est)
    int_report = loss_report(rounded, truth, F=F)

    values: dict = {}
    sides = dict(int_report.sides) | dict(raw_report.sides)
    for name in requested:
        if name == "l_max":
            values[name] = raw_report.l_max
        elif name == "l_one":
            values[name] = raw_report.l_one
        elif name == "l_kendall":
            values[name] = int_report.l_kendall
        else:
            if int_report.l_frobenius is None:
                raise ValueError("frobenius requires a bijective estimate after rounding")
            values[name] = int_report.l_frobenius

    for name in requested:
        side = sides.get(name, "pi")
        print(f"{name:<12} {_fmt(values[name]):<24} side={side}")
    if args.out:
        write_json(args.out, {
            "schema_version": SCHEMA_VERSION,
            "command": "evaluate",
            "n": truth.n,
            "rounded_for_integer_losses": not integral,
            "losses": values,
            "sides": {name: sides.get(name, "pi") for name in requested},
        })
    return 0


# ----------------------------------------------------------------- check


def _robinson_worst(F: SymMatrix, mode: str):
    """Location of the largest monotonicity violation, for the report only
    (the verdict comes from check_robinson).  Returns the rise of F[., k]
    moving away from the diagonal; under strict mode ties count with rise 0.
    """
    vals, n = F.values, F.n
    floor = 0.0 if mode == "weak" else -np.inf
    worst, where = floor, None
    for k in range(n):
        col = vals[:, k]
        for i in range(n - 1):
            # above the diagonal row i is farther from k than row i+1
            rise = col[i] - col[i + 1] if i + 1 <= k else col[i + 1] - col[i]
            if rise > worst:
                worst, where = rise, (i, i + 1, k)
    return worst, where


def _flatness_witness(F: SymMatrix):
    """Smallest-gap triple (i, j, k) with nonpositive one-sided variation.

    Such a triple caps the feasible lower constant at zero, so it is the
    reason a fit could not place the matrix in the class.  Returns None when
    every one-sided minimum is positive.
    """
    vals, n = F.values, F.n
    for g in range(1, n):
        for i in range(n - g):
            j = i + g
            diff = vals[i] - vals[j]
            k_left = int(np.argmin(diff[: i + 1]))
            if diff[k_left] <= 0:
                return (i, j, k_left)
            k_right = j + int(np.argmax(diff[j:]))
            if -diff[k_right] <= 0:
                return (i, j, k_right)
    return None


def cmd_check(args) -> int:
    F = read_matrix(args.matrix)
    payload: dict = {"schema_version": SCHEMA_VERSION, "command": "check",
                     "class": args.cls, "n": F.n}
    if args.cls == "robinson":
        passed = check_robinson(F, mode=args.robinson_mode)
        payload["passed"] = passed
        if not passed:
            worst, where = _robinson_worst(F, args.robinson_mode)
            payload["worst_location"] = where
            payload["worst_margin"] = worst
    elif args.cls == "lde":
        if not args.pi:
            raise ValueError("lde check needs --pi")
        for name in ("alpha", "beta", "omega", "r"):
            if getattr(args, name) is None:
                raise ValueError(f"lde check needs --{name}")
        pi = Permutation(read_scores(args.pi))
        payload["passed"] = check_local_distance_equivalence(
            F, pi, args.alpha, args.beta, args.omega, args.r)
        payload["params"] = {"alpha": args.alpha, "beta": args.beta,
                             "omega": args.omega, "r": args.r}
    else:
        # class membership demands 0 < alpha; a fit that cannot find a
        # positive lower constant means the matrix sits outside the class,
        # so the verdict fails even though the inequalities hold vacuously
        if args.cls == "bl":
            if args.fit:
                alpha, beta = fit_bilipschitz(F)
            else:
                alpha, beta = args.alpha, args.beta
                if alpha is None or beta is None:
                    raise ValueError("bl check needs --alpha and --beta (or --fit)")
                if alpha <= 0:
                    raise ValueError("alpha must be positive")
            report = check_bilipschitz(F, alpha, beta)
            if args.fit and alpha <= 0:
                where = _flatness_witness(F)
                report = CheckReport(False, "lower", where or (), alpha)
            payload["params"] = {"alpha": alpha, "beta": beta}
        else:
            r = args.r if args.r is not None else 0.25
            if args.fit:
                alpha, beta, r_prime_max = fit_average_lipschitz(F, r)
                r_prime = r_prime_max * (1.0 - 1e-9)
            else:
                alpha, beta, r_prime = args.alpha, args.beta, args.rprime
                if alpha is None or beta is None or r_prime is None:
                    raise ValueError(
                        "al check needs --alpha, --beta and --rprime (or --fit)")
                if alpha <= 0:
                    raise ValueError("alpha must be positive")
            report = check_average_lipschitz(F, alpha, beta, r, r_prime)
            if args.fit and alpha <= 0:
                report = CheckReport(False, "lower", report.worst_location, alpha)
            payload["params"] = {"alpha": alpha, "beta": beta,
                                 "r": r, "r_prime": r_prime}
        payload["passed"] = report.passed
        payload["worst_condition"] = report.worst_condition
        payload["worst_location"] = list(report.worst_location)
        payload["worst_margin"] = report.worst_margin

    verdict = "pass" if payload["passed"] else "FAIL"
    line = f"class {args.cls}: {verdict}"
    if not payload["passed"] and payload.get("worst_location") is not None:
        line += (f"  worst at {tuple(payload['worst_location'])}"
                 f" margin {payload.get('worst_margin'):.6g}")
        if "worst_condition" in payload:
            line += f" ({payload['worst_condition']})"
    print(line)
    if args.out:
        write_json(args.out, payload)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sabre",
        description="Seriation of noisy Robinson similarity matrices.")
    sub = parser.add_subparsers(dest="command")

    g = sub.add_parser("generate", help="sample an observation matrix")
    g.add_argument("--model", choices=_MODELS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--alpha", type=float, default=1.0)
    g.add_argument("--delta", type=float, help="jump height (jump model)")
    g.add_argument("--ell0", type=int, help="jump location (jump model)")
    g.add_argument("--c", type=int, default=2, help="plateau width (plateau model)")
    g.add_argument("--sigma", type=float, required=True)
    g.add_argument("--noise", default="gaussian")
    g.add_argument("--zeta", type=int, default=0,
                   help="spacing of the sampled ordering; 0 draws an exact permutation")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--no-signal", action="store_true", help="skip F.csv")
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(entry=cmd_generate)

    s = sub.add_parser("seriate", help="estimate the ordering of a matrix")
    s.add_argument("--matrix", required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--tuning", choices=_PRESET_CHOICES, default="practical")
    s.add_argument("--kappa1", type=float, help="practical preset knob")
    s.add_argument("--ratio", type=float, help="practical preset knob")
    s.add_argument("--zeta", type=int, help="approx preset spacing")
    s.add_argument("--delta1", type=float, help="custom ladder rung")
    s.add_argument("--delta2", type=float, help="custom ladder rung")
    s.add_argument("--delta3", type=float, help="custom ladder rung")
    s.add_argument("--delta4", type=float, help="custom ladder rung")
    s.add_argument("--mode", choices=("tripartition", "leave-one-out"),
                   default="tripartition")
    s.add_argument("--rounding", choices=("round", "raw"), default="round")
    s.add_argument("--edge-rule", choices=("or", "and"), default="or")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--loo-cap", type=int, default=400,
                   help="size guard for leave-one-out; raise deliberately")
    s.add_argument("--out", default="pihat.txt")
    s.add_argument("--comparisons", help="optional comparison matrix CSV")
    s.add_argument("--diagnostics", default="diagnostics.json")
    s.set_defaults(entry=cmd_seriate)

    e = sub.add_parser("evaluate", help="losses between estimate and truth")
    e.add_argument("--est", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--losses", default="l_max,l_kendall,l_one")
    e.add_argument("--matrix-f", help="signal matrix (frobenius loss)")
    e.add_argument("--out", help="optional JSON report path")
    e.set_defaults(entry=cmd_evaluate)

    x = sub.add_parser("experiment", help="run a seeded manifest, write results CSV")
    x.add_argument("--manifest", required=True)
    x.add_argument("--out", help="override the manifest output path")
    x.set_defaults(entry=cmd_experiment)

    c = sub.add_parser("check", help="structural class membership of a matrix")
    c.add_argument("--matrix", required=True)
    c.add_argument("--class", dest="cls", required=True,
                   choices=("robinson", "bl", "al", "lde"))
    c.add_argument("--mode", dest="robinson_mode", choices=("weak", "strict"),
                   default="weak", help="robinson tie handling")
    c.add_argument("--fit", action="store_true",
                   help="fit extremal parameters before checking (bl, al)")
    c.add_argument("--alpha", type=float)
    c.add_argument("--beta", type=float)
    c.add_argument("--r", type=float)
    c.add_argument("--rprime", type=float)
    c.add_argument("--omega", type=float)
    c.add_argument("--pi", help="ordering file (lde check)")
    c.add_argument("--out", help="optional JSON report path")
    c.set_defaults(entry=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "entry"):
        parser.print_help()
        return 2
    try:
        return args.entry(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
