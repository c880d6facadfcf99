"""Base class for population scorers: worker pool, skipping already-scored individuals."""

import concurrent.futures
import logging

from config import ANGLE_SWITCH, scoring_workers

# Scorer held by each worker process; set once by the pool initializer.
_worker_scorer = None


def _init_worker(scorer):
    global _worker_scorer
    _worker_scorer = scorer


def _score_in_worker(genome):
    return _worker_scorer.score_genome(genome)


class BaseScorer:
    name = "base"
    chunksize = 8

    def __init__(self, model, drive, gate, workers=1, switch=ANGLE_SWITCH):
        self.model = model
        self.drive = drive
        self.gate = gate
        self.switch = switch
        self.workers = scoring_workers(workers)
        self.log = logging.getLogger(self.name)
        self._pool = None

    def __getstate__(self):
        # Only the physics travels to worker processes.
        state = self.__dict__.copy()
        state["_pool"] = None
        state["log"] = None
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self.log = logging.getLogger(self.name)

    def _executor(self):
        if self._pool is None:
            self.log.debug("Starting %d scoring workers", self.workers)
            self._pool = concurrent.futures.ProcessPoolExecutor(
                max_workers=self.workers,
                initializer=_init_worker,
                initargs=(self,),
            )
        return self._pool

    def close(self):
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- Abstract interface ------------------------------------------------

    def score_genome(self, genome):
        """Override in subclass.  Returns (FitnessScore, best_rep)."""
        raise NotImplementedError

    # -- Orchestration -----------------------------------------------------

    def score_population(self, individuals):
        """Score every individual that has no score yet; returns how many were scored.

        Results depend only on each genome, so serial and parallel runs agree
        bit for bit.
        """
        pending = [ind for ind in individuals if ind.score is None]
        if not pending:
            return 0

        genomes = [ind.genome for ind in pending]
        if self.workers > 1 and len(pending) > 1:
            results = list(self._executor().map(
                _score_in_worker, genomes, chunksize=self.chunksize
            ))
        else:
            results = [self.score_genome(g) for g in genomes]

        for ind, (score, rep) in zip(pending, results):
            ind.score = score
            ind.best_rep = rep
        self.log.debug("Scored %d of %d individuals", len(pending), len(individuals))
        return len(pending)
