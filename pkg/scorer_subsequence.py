"""Subsequence mode: the genome is repeated 1..max_rep times, best repetition wins."""

import math

from base_scorer import BaseScorer
from fitness import MAX_REPETITIONS, score_subsequence
from model import ParameterError


def capped_max_rep(max_rep, length, tick, max_duration=None):
    """Largest repetition count allowed by max_rep and an optional gate-duration bound (ns)."""
    if max_duration is not None:
        fit = math.floor(max_duration / (length * tick) + 1e-9)
        if fit < 1:
            raise ParameterError(
                f"a single {length}-tick subsequence ({length * tick:.3g} ns) "
                f"exceeds the {max_duration} ns duration bound"
            )
        max_rep = min(max_rep, fit)
    return max_rep


class SubsequenceScorer(BaseScorer):
    name = "subsequence"

    def __init__(self, model, drive, gate, max_rep=35, **kwargs):
        super().__init__(model, drive, gate, **kwargs)
        if not 1 <= max_rep <= MAX_REPETITIONS:
            raise ParameterError(f"max_rep must lie in [1, {MAX_REPETITIONS}], got {max_rep}")
        self.max_rep = max_rep

    def score_genome(self, genome):
        rep, score = score_subsequence(
            genome, self.max_rep, self.model, self.drive, self.gate, switch=self.switch
        )
        return score, rep
