"""Genetic search for pulse trains.

A population of 2L + 1 trains is seeded from a thresholded harmonic comb and
evolved with 3-way tournament selection, one-point crossover and single-site
mutation. Each generation keeps the current best and swaps the two worst
children for the two best of the previous generation.
"""

import logging
import math
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from config import ANGLE_SWITCH
from fitness import MAX_REPETITIONS, sort_key
from model import ParameterError
from propagate import Alphabet, PulseSequence
from scorer_sequence import SequenceScorer
from scorer_subsequence import SubsequenceScorer, capped_max_rep

log = logging.getLogger(__name__)

# Default comb phase: sign(-cos) puts the comb's rotation on the -y axis of U_id.
HARMONIC_PHASE = -math.pi / 2
PARITY_TOLERANCE = 0.2

# Substream roles
ROLE_INIT = 0
ROLE_BREED = 1


@dataclass
class GaConfig:
    sequence_length: int
    mode: str = "sequence"
    max_rep: int = 35
    crossover_prob: float = 0.8
    mutation_prob: float = 0.8
    population_size: int = None
    max_iterations: int = 500
    angle_tol: float = 1e-5
    infid_tol: float = 1e-4
    angle_switch: float = ANGLE_SWITCH
    rng_seed: int = 0
    alphabet: Alphabet = Alphabet.BIPOLAR
    max_duration: float = None  # ns, subsequence mode
    threshold_fraction: float = None  # None: bisect toward zero/non-zero parity
    seed_phase: float = HARMONIC_PHASE

    def __post_init__(self):
        self.alphabet = Alphabet(self.alphabet)
        if self.population_size is None:
            self.population_size = 2 * self.sequence_length + 1
        if self.sequence_length < 4:
            raise ParameterError(f"sequence length must be at least 4, got {self.sequence_length}")
        if self.mode not in ("sequence", "subsequence"):
            raise ParameterError(f"unknown mode {self.mode!r}")
        for name in ("crossover_prob", "mutation_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1]")
        if self.population_size < 3:
            raise ParameterError("population must hold at least 3 individuals")
        if not 1 <= self.max_rep <= MAX_REPETITIONS:
            raise ParameterError(f"max_rep must lie in [1, {MAX_REPETITIONS}]")
        if self.max_iterations < 0:
            raise ParameterError("max_iterations must be non-negative")


@dataclass
class Individual:
    genome: PulseSequence
    score: object = None
    best_rep: int = 1

    def copy(self):
        return Individual(self.genome, self.score, self.best_rep)


@dataclass
class GaResult:
    best: Individual
    generations_run: int
    terminated_early: bool
    history: list = field(default_factory=list)
    wall_time: float = 0.0
    cancelled: bool = False


def substream(seed, generation, role):
    """Independent counter-based generator for one (seed, generation, role)."""
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, generation, role])
    return np.random.Generator(np.random.Philox(ss))


# -- Initial population -------------------------------------------------------


def harmonic_seed(model, drive, length, threshold_fraction, phase=HARMONIC_PHASE,
                  alphabet=Alphabet.BIPOLAR):
    """Pulses where |sin(omega0 k T_g + phase)| exceeds the threshold, signed by the signal."""
    alphabet = Alphabet(alphabet)
    k = np.arange(length)
    signal = np.sin(model.omega0 * k * drive.tick + phase)
    symbols = np.where(np.abs(signal) > threshold_fraction, np.sign(signal), 0).astype(np.int8)
    if alphabet is Alphabet.UNIPOLAR:
        symbols[symbols < 0] = 0
    return PulseSequence(symbols, alphabet)


def _parity_gap(seq):
    zeros = seq.zero_count()
    return abs(zeros - (len(seq) - zeros))


def balanced_seed(model, drive, length, alphabet=Alphabet.BIPOLAR, phase=HARMONIC_PHASE,
                  iterations=60):
    """Harmonic comb whose threshold is bisected toward equal zero/non-zero counts."""
    lo, hi = 0.0, 1.0
    best = harmonic_seed(model, drive, length, 0.0, phase, alphabet)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        seq = harmonic_seed(model, drive, length, mid, phase, alphabet)
        if _parity_gap(seq) < _parity_gap(best):
            best = seq
        if 2 * seq.zero_count() < length:
            lo = mid
        else:
            hi = mid
    return best


def init_population(seed, config, rng=None):
    """The seed plus its single-site variants, N individuals in total."""
    length = config.sequence_length
    if len(seed) != length:
        raise ParameterError(f"seed length {len(seed)} != sequence length {length}")
    if _parity_gap(seed) > PARITY_TOLERANCE * length:
        log.warning("Seed has %d zeros in %d ticks, far from parity", seed.zero_count(), length)
    if rng is None:
        rng = substream(config.rng_seed, 0, ROLE_INIT)

    alphabet = config.alphabet
    variants = [
        seed.with_symbol(i, alt)
        for i, value in enumerate(seed)
        for alt in alphabet.alternatives(value)
    ]
    wanted = config.population_size - 1
    if len(variants) > wanted:
        keep = np.sort(rng.choice(len(variants), size=wanted, replace=False))
        variants = [variants[i] for i in keep]
    while len(variants) < wanted:
        site = int(rng.integers(length))
        options = alphabet.alternatives(seed.symbols[site])
        variants.append(seed.with_symbol(site, options[int(rng.integers(len(options)))]))
    return [Individual(seed)] + [Individual(v) for v in variants]


# -- Operators ----------------------------------------------------------------


def select_parents(population, rng, switch=ANGLE_SWITCH):
    """Best two of three distinct random individuals, ties to the lower index."""
    if len(population) < 3:
        raise ParameterError("tournament needs at least 3 individuals")
    picks = sorted(int(i) for i in rng.choice(len(population), size=3, replace=False))
    ranked = sorted(picks, key=lambda i: sort_key(population[i].score, switch))
    return population[ranked[0]], population[ranked[1]]


def crossover(p1, p2, crossover_prob, rng):
    """One-point crossover; returns two new unscored children."""
    g1, g2 = p1.genome, p2.genome
    if len(g1) != len(g2):
        raise ParameterError("parents differ in length")
    if len(g1) > 1 and rng.random() < crossover_prob:
        point = int(rng.integers(1, len(g1)))
        a, b = g1.symbols, g2.symbols
        c1 = np.concatenate([a[:point], b[point:]])
        c2 = np.concatenate([b[:point], a[point:]])
        return (Individual(PulseSequence(c1, g1.alphabet)),
                Individual(PulseSequence(c2, g2.alphabet)))
    return p1.copy(), p2.copy()


def mutate(child, mutation_prob, rng):
    """With probability P_m move one random site to one of its alternative values."""
    if rng.random() >= mutation_prob:
        return child
    genome = child.genome
    site = int(rng.integers(len(genome)))
    options = genome.alphabet.alternatives(int(genome.symbols[site]))
    new = genome.with_symbol(site, options[int(rng.integers(len(options)))])
    return Individual(new)


# -- Main loop ----------------------------------------------------------------


def make_scorer(config, model, drive, gate, workers=1):
    if config.mode == "subsequence":
        max_rep = capped_max_rep(config.max_rep, config.sequence_length, drive.tick,
                                 config.max_duration)
        return SubsequenceScorer(model, drive, gate, max_rep=max_rep, workers=workers,
                                 switch=config.angle_switch)
    return SequenceScorer(model, drive, gate, workers=workers, switch=config.angle_switch)


def _best_index(population, switch):
    return min(range(len(population)), key=lambda i: sort_key(population[i].score, switch))


def _ranked(population, switch):
    return sorted(range(len(population)), key=lambda i: sort_key(population[i].score, switch))


def evolve(config, model, drive, gate, workers=1, progress_callback=None, stop_event=None,
           initial=None):
    """Run the genetic search; returns the best-ever individual as a GaResult.

    ``initial`` overrides the harmonic seed train.
    """
    stop_event = stop_event or threading.Event()
    switch = config.angle_switch
    drive.check(model)
    start = time.perf_counter()

    seed = initial
    if seed is None:
        if config.threshold_fraction is None:
            seed = balanced_seed(model, drive, config.sequence_length, config.alphabet,
                                 config.seed_phase)
        else:
            seed = harmonic_seed(model, drive, config.sequence_length,
                                 config.threshold_fraction, config.seed_phase, config.alphabet)

    population = init_population(seed, config)
    history = []
    best = None
    terminated_early = cancelled = False
    generation = 0

    with make_scorer(config, model, drive, gate, workers) as scorer:
        scorer.score_population(population)
        while True:
            current = population[_best_index(population, switch)]
            if best is None or sort_key(current.score, switch) < sort_key(best.score, switch):
                best = current.copy()
            history.append(best.score)
            if progress_callback:
                progress_callback(generation, best.score)
            log.debug("Generation %d: angle error %.3e, infidelity %.3e",
                      generation, best.score.angle_error, best.score.infidelity)

            if best.score.satisfies(config.angle_tol, config.infid_tol):
                terminated_early = True
                break
            if generation >= config.max_iterations:
                break
            if stop_event.is_set():
                log.info("Stop requested at generation %d", generation)
                cancelled = True
                break

            rng = substream(config.rng_seed, generation, ROLE_BREED)
            wanted = len(population) - 1
            children = []
            while len(children) < wanted:
                p1, p2 = select_parents(population, rng, switch)
                c1, c2 = crossover(p1, p2, config.crossover_prob, rng)
                children.append(mutate(c1, config.mutation_prob, rng))
                children.append(mutate(c2, config.mutation_prob, rng))
            new_population = children[:wanted] + [current.copy()]
            scorer.score_population(new_population)

            # Adjust: two worst of the new generation give way to the two best of the old.
            worst = _ranked(new_population, switch)[-2:]
            elders = _ranked(population, switch)[:2]
            for slot, elder in zip(worst, elders):
                new_population[slot] = population[elder].copy()

            population = new_population
            generation += 1

    wall_time = time.perf_counter() - start
    log.info("Search finished after %d generations in %.2fs (angle error %.3e, infidelity %.3e)",
             generation, wall_time, best.score.angle_error, best.score.infidelity)
    return GaResult(best=best, generations_run=generation, terminated_early=terminated_early,
                    history=history, wall_time=wall_time, cancelled=cancelled)
