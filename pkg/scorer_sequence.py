"""Sequence mode: the genome is the whole train."""

from base_scorer import BaseScorer
from fitness import score_sequence


class SequenceScorer(BaseScorer):
    name = "sequence"

    def score_genome(self, genome):
        return score_sequence(genome, self.model, self.drive, self.gate), 1
