"""Seeded Monte-Carlo experiments: problem generation, paired sweeps, aggregation, output files.

Every trial draws from its own Philox stream keyed by
``(master_seed, spec_index, trial_index)``, so results do not depend on
execution order or worker count, and every algorithm in a sweep is run on
the very same instance of a given trial.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .baselines import imusic, ra_ormp, sa_music, scosamp, somp
from .errors import ConfigError, DegenerateStateError, InvalidInputError, NoSignalError
from .model import JsrProblem
from .noise import estimate_signal_subspace, noisy_epsilon, ss_music_noisy
from .solver import SolveResult, SsMusicConfig, music, ss_music

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_COLUMNS = (
    "algorithm", "n", "m", "K", "N", "snr_db", "trial", "seed", "success",
    "iterations", "fitness_final", "wall_time_us", "problem_hash",
)


@dataclass(frozen=True)
class EnsembleSpec:
    m: int
    K: int
    N: int
    n: int = 100
    snr_db: Optional[float] = None
    trials: int = 200
    master_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.K < self.n:
            raise InvalidInputError(f"need 1 <= K < n, got K={self.K}, n={self.n}")
        if self.m < 1 or self.N < 1:
            raise InvalidInputError("m and N must be positive")
        if self.trials < 1:
            raise InvalidInputError("trials must be positive")


@dataclass
class Trial:
    problem: JsrProblem
    seed: int
    noise_sigma: Optional[float] = None


@dataclass
class TrialRecord:
    algorithm: str
    trial_index: int
    seed: int
    success: bool
    iterations: int
    fitness_final: float
    wall_time_us: int
    problem_hash: str


@dataclass
class SweepResult:
    spec: EnsembleSpec
    t_max: int
    records: dict[str, list[TrialRecord]] = field(default_factory=dict)

    def success_rate(self, algorithm: str) -> float:
        recs = self.records[algorithm]
        return sum(r.success for r in recs) / len(recs)

    def histogram(self, algorithm: str) -> dict[int, int]:
        """Iteration counts of successful trials; failures land in bin ``t_max + 1``."""
        counts = Counter(
            r.iterations if r.success else self.t_max + 1 for r in self.records[algorithm]
        )
        return dict(sorted(counts.items()))

    def mean_wall_time_us(self, algorithm: str) -> float:
        recs = self.records[algorithm]
        return sum(r.wall_time_us for r in recs) / len(recs)

    def aggregate(self) -> dict:
        return {
            "spec": asdict(self.spec),
            "algorithms": {
                name: {
                    "success_rate": self.success_rate(name),
                    "histogram": {str(k): v for k, v in self.histogram(name).items()},
                    "mean_wall_time_us": self.mean_wall_time_us(name),
                }
                for name in self.records
            },
        }


def trial_seed(master_seed: int, spec_index: int, trial_index: int) -> int:
    ss = np.random.SeedSequence([master_seed, spec_index, trial_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def trial_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def generate_trial(spec: EnsembleSpec, trial_index: int, spec_index: int = 0) -> Trial:
    """Gaussian dictionary with unit atoms, Gaussian rows on a random K-support, optional noise."""
    seed = trial_seed(spec.master_seed, spec_index, trial_index)
    rng = trial_rng(seed)
    A = rng.standard_normal((spec.m, spec.n))
    A /= np.linalg.norm(A, axis=0)
    support = np.sort(rng.choice(spec.n, size=spec.K, replace=False))
    X = np.zeros((spec.n, spec.N))
    X[support] = rng.standard_normal((spec.K, spec.N))
    Y = A @ X
    sigma = None
    if spec.snr_db is not None:
        E = rng.standard_normal(Y.shape)
        scale = np.sqrt(np.sum(Y**2) / (np.sum(E**2) * 10.0 ** (spec.snr_db / 10.0)))
        E *= scale
        Y = Y + E
        sigma = float(np.linalg.norm(E) / np.sqrt(E.size))
    return Trial(JsrProblem(A, Y, spec.K, tuple(int(i) for i in support)), seed, sigma)


def generate_problem(spec: EnsembleSpec, trial_index: int, spec_index: int = 0) -> JsrProblem:
    return generate_trial(spec, trial_index, spec_index).problem


# Each runner receives the trial (for the noise level) and the base config.
Runner = Callable[[Trial, SsMusicConfig], SolveResult]


def _noisy_setup(trial: Trial, cfg: SsMusicConfig):
    """Estimated rank and a config with the noise-aware threshold."""
    est = estimate_signal_subspace(trial.problem.Y, trial.noise_sigma, rel_tol=cfg.rel_tol)
    eps = noisy_epsilon(trial.problem, trial.noise_sigma, cfg)
    return est.rank_estimate, replace(cfg, epsilon=eps, rank_override=est.rank_estimate)


def _run_music(trial, cfg):
    if trial.noise_sigma is None:
        return music(trial.problem, cfg=cfg)
    r, cfg = _noisy_setup(trial, cfg)
    return music(trial.problem, r, cfg)


def _run_ss_music(trial, cfg):
    if trial.noise_sigma is None:
        return ss_music(trial.problem, cfg)
    return ss_music_noisy(trial.problem, cfg, trial.noise_sigma)


def _run_somp(trial, cfg):
    if trial.noise_sigma is not None:
        _, cfg = _noisy_setup(trial, cfg)
    return somp(trial.problem, cfg)


def _run_scosamp(trial, cfg):
    if trial.noise_sigma is not None:
        _, cfg = _noisy_setup(trial, cfg)
    return scosamp(trial.problem, cfg.t_max, cfg)


def _run_ra_ormp(trial, cfg):
    if trial.noise_sigma is None:
        return ra_ormp(trial.problem, cfg=cfg)
    r, cfg = _noisy_setup(trial, cfg)
    return ra_ormp(trial.problem, r, cfg)


def _run_sa_music(trial, cfg):
    if trial.noise_sigma is None:
        return sa_music(trial.problem, cfg=cfg)
    r, cfg = _noisy_setup(trial, cfg)
    return sa_music(trial.problem, r, cfg)


def _run_imusic(trial, cfg):
    if trial.noise_sigma is not None:
        _, cfg = _noisy_setup(trial, cfg)
    return imusic(trial.problem, cfg)


ALGORITHMS: dict[str, Runner] = {
    "ss_music": _run_ss_music,
    "music": _run_music,
    "somp": _run_somp,
    "scosamp": _run_scosamp,
    "ra_ormp": _run_ra_ormp,
    "sa_music": _run_sa_music,
    "imusic": _run_imusic,
}


def check_algorithms(algorithms: Iterable[str]) -> list[str]:
    algorithms = list(algorithms)
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        raise ConfigError(f"unknown algorithm(s) {unknown}; known: {sorted(ALGORITHMS)}")
    if not algorithms:
        raise ConfigError("no algorithm selected")
    return algorithms


def run_trial(spec: EnsembleSpec, spec_index: int, trial_index: int, algorithms: Sequence[str],
              cfg: SsMusicConfig, timing: bool = False) -> list[TrialRecord]:
    """Generate one instance and run every algorithm on it."""
    trial = generate_trial(spec, trial_index, spec_index)
    problem = trial.problem
    out = []
    for name in algorithms:
        start = time.perf_counter()
        try:
            res = ALGORITHMS[name](trial, cfg)
            success = res.support == problem.true_support
            iterations, fit = res.iterations, res.final_fitness
        except (DegenerateStateError, NoSignalError) as exc:
            log.warning("%s failed on trial %d: %s", name, trial_index, exc)
            success, iterations, fit = False, cfg.t_max, float("nan")
        elapsed = int(round((time.perf_counter() - start) * 1e6)) if timing else 0
        out.append(TrialRecord(name, trial_index, trial.seed, bool(success), int(iterations),
                               float(fit), elapsed, problem.digest()))
    return out


def _run_chunk(args):
    spec, spec_index, trial_indices, algorithms, cfg, timing = args
    return spec_index, [run_trial(spec, spec_index, t, algorithms, cfg, timing) for t in trial_indices]


def run_sweep(specs: Sequence[EnsembleSpec], algorithms: Sequence[str],
              cfg: Optional[SsMusicConfig] = None, threads: int = 1,
              timing: bool = False) -> list[SweepResult]:
    """Run every (spec, trial) cell for every algorithm, paired per trial.

    ``threads > 1`` distributes chunks of trials over a process pool; the
    result is identical to a serial run.
    """
    algorithms = check_algorithms(algorithms)
    cfg = cfg or SsMusicConfig()
    results = [SweepResult(spec, cfg.t_max, {a: [] for a in algorithms}) for spec in specs]
    jobs = []
    for si, spec in enumerate(specs):
        chunk = max(1, spec.trials // max(1, 4 * threads))
        for lo in range(0, spec.trials, chunk):
            jobs.append((spec, si, list(range(lo, min(lo + chunk, spec.trials))), algorithms, cfg, timing))
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(_run_chunk, jobs))
    else:
        outputs = [_run_chunk(job) for job in jobs]
    for si, trials in outputs:
        for records in trials:
            for rec in records:
                results[si].records[rec.algorithm].append(rec)
    for res in results:
        for recs in res.records.values():
            recs.sort(key=lambda r: r.trial_index)
    return results


def phase_transition(m_grid: Sequence[int], K_grid: Sequence[int], N: int, trials: int,
                     algorithm: str = "ss_music", n: int = 100, master_seed: int = 0,
                     cfg: Optional[SsMusicConfig] = None, threads: int = 1):
    """Success-rate matrix over (m, K); also returns the mask of cells with m <= K."""
    check_algorithms([algorithm])
    specs = [EnsembleSpec(m=m, K=K, N=N, n=n, trials=trials, master_seed=master_seed)
             for m in m_grid for K in K_grid]
    results = run_sweep(specs, [algorithm], cfg, threads)
    rates = np.array([r.success_rate(algorithm) for r in results]).reshape(len(m_grid), len(K_grid))
    infeasible = np.array([[m <= K for K in K_grid] for m in m_grid])
    return rates, infeasible, results


def iteration_histogram(spec: EnsembleSpec, algorithm: str, trials: Optional[int] = None,
                        cfg: Optional[SsMusicConfig] = None, threads: int = 1) -> dict[int, int]:
    if trials is not None:
        spec = replace(spec, trials=trials)
    return run_sweep([spec], [algorithm], cfg, threads)[0].histogram(algorithm)


def _fmt_float(x: float) -> str:
    return repr(float(x))


def records_csv(results: Sequence[SweepResult], header: Optional[dict] = None) -> str:
    """CSV text for all trial records, preceded by ``# key = value`` lines."""
    buf = io.StringIO()
    for key, value in (header or {}).items():
        buf.write(f"# {key} = {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for res in results:
        s = res.spec
        snr = "" if s.snr_db is None else _fmt_float(s.snr_db)
        for name, recs in res.records.items():
            for r in recs:
                writer.writerow([
                    name, s.n, s.m, s.K, s.N, snr, r.trial_index, r.seed, int(r.success),
                    r.iterations, _fmt_float(r.fitness_final), r.wall_time_us, r.problem_hash,
                ])
    return buf.getvalue()


def read_records_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def aggregate_json(results: Sequence[SweepResult], config: Optional[dict] = None) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "config": config or {},
        "results": [r.aggregate() for r in results],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_text(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
