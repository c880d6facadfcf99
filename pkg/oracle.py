"""Ground truth for tests and the `oracle` CLI verb.

A closed-form two-level propagator, a Taylor-series exponential as a second
exponentiation route, and brute-force search over small genome spaces.
"""

import concurrent.futures
import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from config import ANGLE_SWITCH
from fitness import sort_key
from model import ParameterError
from propagate import Alphabet, GateUnitary, PulseSequence, propagate
from scorer_sequence import SequenceScorer

log = logging.getLogger(__name__)

MAX_EXHAUSTIVE_LENGTH = 12
MAX_EXHAUSTIVE_GENOMES = 2_000_000


@dataclass(frozen=True)
class OracleReport:
    best_genome: PulseSequence
    best_score: object
    evaluated: int


def two_level_propagate(seq, model, drive):
    """Product of closed-form 2x2 rotation and phase matrices."""
    if model.dim != 2:
        raise ParameterError(f"the two-level oracle needs dim = 2, got {model.dim}")
    half = 0.5 * model.delta_theta
    c, s = math.cos(half), math.sin(half)
    phase = np.diag([1.0, np.exp(-1j * model.omega0 * drive.tick)])
    kicks = {
        0: np.eye(2, dtype=complex),
        1: np.array([[c, -s], [s, c]], dtype=complex),
        -1: np.array([[c, s], [-s, c]], dtype=complex),
    }
    u = np.eye(2, dtype=complex)
    for sym in seq.symbols.tolist():
        u = phase @ (kicks[sym] @ u)
    return GateUnitary(u, len(seq) * drive.tick)


def taylor_expm(generator, terms=20):
    """sum_{k < terms} G^k / k!"""
    result = np.eye(generator.shape[0], dtype=complex)
    term = result.copy()
    for k in range(1, terms):
        term = term @ generator / k
        result = result + term
    return result


def resonant_comb(model, drive, kicks):
    """Unipolar train with one +1 kick per qubit period, ``kicks`` kicks in total."""
    spacing = max(1, round(drive.omega_g / model.omega0))
    symbols = np.zeros(spacing * kicks, dtype=np.int8)
    symbols[::spacing] = 1
    return PulseSequence(symbols, Alphabet.UNIPOLAR)


def max_deviation(sequences, model, drive):
    """Largest entrywise gap between the two-level oracle and propagate."""
    gap = 0.0
    for seq in sequences:
        ref = two_level_propagate(seq, model, drive).matrix
        got = propagate(seq, model, drive).matrix
        gap = max(gap, float(np.max(np.abs(ref - got))))
    return gap


def genome_count(length, alphabet):
    return len(Alphabet(alphabet).symbols) ** length


def enumerate_genomes(length, alphabet):
    """Base-|alphabet| counting, first tick most significant, symbols in (-1, 0, +1) order."""
    alphabet = Alphabet(alphabet)
    for symbols in itertools.product(alphabet.symbols, repeat=length):
        yield PulseSequence(symbols, alphabet)


def _score_chunk(args):
    scorer, length, alphabet, start, stop = args
    genomes = itertools.islice(enumerate_genomes(length, alphabet), start, stop)
    return [scorer.score_genome(g)[0] for g in genomes]


def exhaustive_search(length, model, drive, gate, alphabet=Alphabet.BIPOLAR, workers=1,
                      switch=ANGLE_SWITCH):
    """Score every genome with the sequence scorer the GA uses; lowest index wins ties."""
    alphabet = Alphabet(alphabet)
    total = genome_count(length, alphabet)
    if length < 1 or length > MAX_EXHAUSTIVE_LENGTH or total > MAX_EXHAUSTIVE_GENOMES:
        raise ParameterError(
            f"exhaustive search is limited to L <= {MAX_EXHAUSTIVE_LENGTH} and "
            f"{MAX_EXHAUSTIVE_GENOMES} genomes (L = {length} gives {total})"
        )
    scorer = SequenceScorer(model, drive, gate, switch=switch)
    log.info("Exhaustive search over %d genomes of length %d", total, length)

    if workers > 1:
        step = math.ceil(total / (workers * 4))
        chunks = [(scorer, length, alphabet, lo, min(lo + step, total))
                  for lo in range(0, total, step)]
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            scores = [s for part in pool.map(_score_chunk, chunks) for s in part]
    else:
        scores = _score_chunk((scorer, length, alphabet, 0, total))

    best_idx = min(range(total), key=lambda i: (sort_key(scores[i], switch), i))
    best_genome = next(itertools.islice(enumerate_genomes(length, alphabet), best_idx, None))
    return OracleReport(best_genome=best_genome, best_score=scores[best_idx], evaluated=total)
