"""Frequency sweeps: one evolve per (f0, length, seed), best record kept per f0."""

import concurrent.futures
import logging
import os
import signal
import threading
from dataclasses import dataclass

from fitness import TargetGate, sort_key
from ga import GaConfig, evolve
from model import DriveConfig, TransmonModel
from results import RunRecord, load_completed, write_records

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_UNSATISFIED = 2


@dataclass(frozen=True)
class SweepJob:
    f0: float
    length: int
    seed: int
    generator_ghz: float
    delta_theta: float
    anharmonicity_ghz: float
    dim: int
    theta_target: float
    mode: str
    alphabet: str
    max_rep: int
    max_duration_ns: float
    max_iterations: int


def jobs_for(config, skip=()):
    return [
        SweepJob(f0, length, seed, config.generator_ghz, config.delta_theta,
                 config.anharmonicity_ghz, config.dim, config.theta_target, config.mode,
                 config.alphabet, config.max_rep, config.max_duration_ns,
                 config.max_iterations)
        for f0 in config.frequencies_ghz if f0 not in skip
        for length in config.lengths
        for seed in config.seeds()
    ]


def run_job(job, stop_event=None, workers=1):
    """Run one search; returns an unnumbered RunRecord (index 0)."""
    model = TransmonModel.from_ghz(job.f0, job.anharmonicity_ghz, job.delta_theta, job.dim)
    drive = DriveConfig.from_ghz(job.generator_ghz)
    gate = TargetGate(job.theta_target)
    config = GaConfig(
        sequence_length=job.length, mode=job.mode, max_rep=job.max_rep,
        max_iterations=job.max_iterations, rng_seed=job.seed, alphabet=job.alphabet,
        max_duration=job.max_duration_ns,
    )
    result = evolve(config, model, drive, gate, workers=workers, stop_event=stop_event)
    return record_from_result(result, config, model, drive, f0=job.f0)


def record_from_result(result, config, model, drive, index=0, f0=None):
    best = result.best
    reps = best.best_rep if config.mode == "subsequence" else 1
    total_length = len(best.genome) * reps
    return RunRecord(
        index=index,
        delta_theta=model.delta_theta,
        f0=model.f0 if f0 is None else f0,
        sequence_length=total_length,
        operation_duration=total_length * drive.tick,
        angle_precision=best.score.angle_error,
        infidelity=best.score.infidelity,
        wall_time=result.wall_time,
        rng_seed=config.rng_seed,
        genome=best.genome.to_text(),
        satisfied=best.score.satisfies(config.angle_tol, config.infid_tol),
        subsequence_length=len(best.genome) if config.mode == "subsequence" else None,
        repetitions=reps if config.mode == "subsequence" else None,
    )


def _key(record):
    return sort_key(record.score)


def _ignore_sigint():
    # Ctrl+C is handled by the parent, which cancels pending jobs.
    signal.signal(signal.SIGINT, signal.SIG_IGN)


def select_record(candidates, mode, angle_tol=1e-5):
    """Pick the reported record for one frequency.

    Sequence mode: lowest infidelity among angle-satisfying runs. Subsequence
    mode: shortest satisfying subsequence. Otherwise the best run overall.
    Candidates are in job order, which breaks remaining ties.
    """
    if not candidates:
        return None
    if mode == "subsequence":
        ok = [c for c in candidates if c.satisfied]
        if ok:
            return min(ok, key=lambda c: (c.subsequence_length, _key(c)))
    else:
        ok = [c for c in candidates if c.angle_precision < angle_tol]
        if ok:
            return min(ok, key=lambda c: (c.infidelity, c.angle_precision))
    return min(candidates, key=_key)


def run_sweep(config, out_dir, stop_event=None, progress_callback=None, resume=False):
    """Run every job, write <out_dir>/results.csv, return (records, exit code)."""
    stop_event = stop_event or threading.Event()
    csv_path = os.path.join(out_dir, "results.csv")
    completed = load_completed(csv_path, config.mode) if resume else {}
    for f0 in completed:
        log.info("f0 = %g GHz skipped (already done)", f0)

    jobs = jobs_for(config, skip=completed)
    outcomes = [None] * len(jobs)
    total = len(jobs)

    def finish(idx, record):
        outcomes[idx] = record
        if progress_callback:
            progress_callback(sum(o is not None for o in outcomes), total)

    if config.workers > 1 and total > 1:
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=config.workers, initializer=_ignore_sigint) as pool:
            futures = {pool.submit(run_job, job): i for i, job in enumerate(jobs)}
            for future in concurrent.futures.as_completed(futures):
                idx = futures[future]
                if stop_event.is_set():
                    for pending in futures:
                        pending.cancel()
                try:
                    finish(idx, future.result())
                except concurrent.futures.CancelledError:
                    continue
                except Exception as exc:
                    log.error("Job f0=%g L=%d seed=%d crashed: %s",
                              jobs[idx].f0, jobs[idx].length, jobs[idx].seed, exc)
    else:
        for idx, job in enumerate(jobs):
            if stop_event.is_set():
                log.info("Stop requested")
                break
            try:
                finish(idx, run_job(job, stop_event=stop_event))
            except Exception as exc:
                log.error("Job f0=%g L=%d seed=%d crashed: %s", job.f0, job.length, job.seed, exc)

    records = []
    exit_code = EXIT_OK
    for n, f0 in enumerate(config.frequencies_ghz, 1):
        if f0 in completed:
            chosen = completed[f0]
        else:
            candidates = [o for j, o in zip(jobs, outcomes) if j.f0 == f0 and o is not None]
            chosen = select_record(candidates, config.mode)
        if chosen is None:
            log.error("f0 = %g GHz produced no record", f0)
            exit_code = EXIT_UNSATISFIED
            continue
        chosen.index = n
        if not chosen.satisfied:
            log.warning("f0 = %g GHz did not meet the tolerances (angle %.3e, infidelity %.3e)",
                        f0, chosen.angle_precision, chosen.infidelity)
            exit_code = EXIT_UNSATISFIED
        records.append(chosen)

    write_records(csv_path, records, config.mode)
    return records, exit_code
