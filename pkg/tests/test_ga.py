"""Seeding, genetic operators and the evolve loop."""

import concurrent.futures
import threading

import numpy as np
import pytest

from base_scorer import BaseScorer
from fitness import FitnessScore, TargetGate, sort_key
from ga import (
    GaConfig,
    Individual,
    balanced_seed,
    crossover,
    evolve,
    harmonic_seed,
    init_population,
    mutate,
    select_parents,
    substream,
)
from model import ParameterError, TransmonModel
from propagate import Alphabet, PulseSequence
from scorer_subsequence import capped_max_rep


class FixedRng:
    """Always crosses over, always at the given point."""

    def __init__(self, point):
        self.point = point

    def random(self):
        return 0.0

    def integers(self, low, high=None):
        return self.point


def scored(values):
    return [Individual(PulseSequence([0, 0, 0, 0]), FitnessScore(1.0, v)) for v in values]


@pytest.fixture
def small_problem():
    model = TransmonModel.from_ghz(5.0, 0.25, 0.2, 3)
    return model, TargetGate(0.4)


class TestGaConfig:
    def test_population_default(self):
        assert GaConfig(sequence_length=114).population_size == 229

    @pytest.mark.parametrize("kwargs", [
        dict(sequence_length=3),
        dict(sequence_length=8, crossover_prob=1.5),
        dict(sequence_length=8, mutation_prob=-0.1),
        dict(sequence_length=8, mode="other"),
        dict(sequence_length=8, max_rep=65),
        dict(sequence_length=8, population_size=2),
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ParameterError):
            GaConfig(**kwargs)


class TestSeeds:
    def test_comb_pattern(self, model5, drive):
        seq = harmonic_seed(model5, drive, 20, 0.55, phase=0.0)
        assert seq.to_text() == "0++--" * 4

    def test_zero_threshold_only_zeroes_nodes(self, model5, drive):
        seq = harmonic_seed(model5, drive, 40, 0.0, phase=0.0)
        signal = np.sin(model5.omega0 * np.arange(40) * drive.tick)
        for value, s in zip(seq, signal):
            if value == 0:
                assert s == 0.0
            else:
                assert value == np.sign(s)

    def test_high_threshold_is_all_zero(self, model5, drive):
        assert harmonic_seed(model5, drive, 30, 0.99, phase=0.0).zero_count() == 30

    def test_unipolar_comb(self, model5, drive):
        seq = harmonic_seed(model5, drive, 30, 0.3, alphabet=Alphabet.UNIPOLAR)
        assert -1 not in list(seq)

    def test_balanced_seed_near_parity(self, grid_model, drive):
        seq = balanced_seed(grid_model, drive, 114)
        zeros = seq.zero_count()
        assert abs(zeros - (114 - zeros)) <= 0.2 * 114

    def test_default_phase_follows_minus_cosine(self, model2, drive):
        seq = harmonic_seed(model2, drive, 10, 0.5)
        assert seq.to_text() == "-0++0-0++0"


class TestInitPopulation:
    def test_bipolar_neighbourhood(self):
        seed = PulseSequence([1, 0, -1, 0])
        pop = init_population(seed, GaConfig(sequence_length=4))
        genomes = [ind.genome for ind in pop]
        assert len(pop) == 9
        assert len(set(genomes)) == 9
        assert genomes[0] == seed
        assert all(g.hamming(seed) == 1 for g in genomes[1:])

    def test_unipolar_pads_with_single_flips(self):
        seed = PulseSequence([1, 0, 1, 0], Alphabet.UNIPOLAR)
        config = GaConfig(sequence_length=4, alphabet=Alphabet.UNIPOLAR)
        pop = init_population(seed, config)
        assert len(pop) == 9
        assert all(ind.genome.hamming(seed) <= 1 for ind in pop)
        assert all(-1 not in list(ind.genome) for ind in pop)

    def test_unscored(self):
        pop = init_population(PulseSequence([1, 0, -1, 0]), GaConfig(sequence_length=4))
        assert all(ind.score is None for ind in pop)

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            init_population(PulseSequence([1, 0, 1]), GaConfig(sequence_length=4))

    def test_deterministic(self):
        seed = PulseSequence([1, 0, 1, 0, 1, 0], Alphabet.UNIPOLAR)
        config = GaConfig(sequence_length=6, alphabet=Alphabet.UNIPOLAR, rng_seed=3)
        first = [ind.genome for ind in init_population(seed, config)]
        second = [ind.genome for ind in init_population(seed, config)]
        assert first == second


class TestSelection:
    def test_needs_three(self):
        with pytest.raises(ParameterError):
            select_parents(scored([1, 2]), np.random.default_rng(0))

    def test_best_two_of_sampled(self):
        pop = scored([5, 3, 8, 1, 9, 2, 7])
        for seed in range(50):
            picks = sorted(np.random.default_rng(seed).choice(len(pop), size=3, replace=False))
            expected = sorted(picks, key=lambda i: pop[i].score.infidelity)[:2]
            p1, p2 = select_parents(pop, np.random.default_rng(seed))
            assert p1 is pop[int(expected[0])]
            assert p2 is pop[int(expected[1])]

    def test_ties_go_to_lower_index(self):
        pop = scored([1, 1, 1, 1, 1, 1])
        for seed in range(20):
            picks = sorted(np.random.default_rng(seed).choice(len(pop), size=3, replace=False))
            p1, p2 = select_parents(pop, np.random.default_rng(seed))
            assert p1 is pop[int(picks[0])]
            assert p2 is pop[int(picks[1])]

    def test_best_always_wins_its_tournaments(self):
        pop = scored([0.5, 0.1, 0.9, 0.7, 0.3])
        for seed in range(100):
            picks = np.random.default_rng(seed).choice(len(pop), size=3, replace=False)
            p1, _ = select_parents(pop, np.random.default_rng(seed))
            if 1 in picks:
                assert p1 is pop[1]


class TestCrossover:
    def test_one_point(self):
        p1 = Individual(PulseSequence([1, 1, 1, 1]))
        p2 = Individual(PulseSequence([-1, -1, -1, -1]))
        c1, c2 = crossover(p1, p2, 1.0, FixedRng(2))
        assert c1.genome.to_text() == "++--"
        assert c2.genome.to_text() == "--++"
        assert c1.score is None and c2.score is None

    def test_no_crossover_copies_parents(self):
        p1 = Individual(PulseSequence([1, 0, 1, 0]), FitnessScore(0.1, 0.2))
        p2 = Individual(PulseSequence([0, -1, 0, -1]), FitnessScore(0.3, 0.4))
        c1, c2 = crossover(p1, p2, 0.0, np.random.default_rng(0))
        assert c1.genome == p1.genome and c2.genome == p2.genome
        assert c1 is not p1

    def test_preserves_sites(self, rng):
        for _ in range(100):
            a = Individual(PulseSequence(rng.integers(-1, 2, size=12)))
            b = Individual(PulseSequence(rng.integers(-1, 2, size=12)))
            c1, c2 = crossover(a, b, 0.8, rng)
            for k in range(12):
                assert sorted([c1.genome.symbols[k], c2.genome.symbols[k]]) == sorted(
                    [a.genome.symbols[k], b.genome.symbols[k]])

    def test_length_mismatch(self, rng):
        with pytest.raises(ParameterError):
            crossover(Individual(PulseSequence([1, 0])), Individual(PulseSequence([1])), 1.0, rng)


class TestMutation:
    def test_no_mutation(self, rng):
        child = Individual(PulseSequence([1, 0, -1]))
        assert mutate(child, 0.0, rng) is child

    def test_changes_at_most_one_site(self, rng):
        genome = PulseSequence(rng.integers(-1, 2, size=30))
        for _ in range(200):
            assert mutate(Individual(genome), 0.8, rng).genome.hamming(genome) <= 1

    def test_alternatives_are_equally_likely(self):
        rng = np.random.default_rng(5)
        values = [mutate(Individual(PulseSequence([-1])), 1.0, rng).genome.symbols[0]
                  for _ in range(2000)]
        zeros = values.count(0)
        assert set(values) == {0, 1}
        assert 800 < zeros < 1200

    def test_unipolar_stays_unipolar(self, rng):
        genome = PulseSequence([0, 1, 0, 1], Alphabet.UNIPOLAR)
        for _ in range(200):
            assert -1 not in list(mutate(Individual(genome), 1.0, rng).genome)


class TestSubstream:
    def test_reproducible(self):
        assert substream(1, 2, 3).random() == substream(1, 2, 3).random()

    def test_roles_differ(self):
        assert substream(1, 2, 0).random() != substream(1, 2, 1).random()


def test_capped_max_rep():
    assert capped_max_rep(35, 19, 0.04, 6.08) == 8
    assert capped_max_rep(5, 19, 0.04, 6.08) == 5
    assert capped_max_rep(35, 19, 0.04) == 35
    with pytest.raises(ParameterError):
        capped_max_rep(35, 200, 0.04, 6.0)


class TestEvolve:
    def test_satisfying_seed_stops_at_once(self, model2, drive):
        gate = TargetGate(0.032)
        config = GaConfig(sequence_length=4, max_iterations=50)
        result = evolve(config, model2, drive, gate, initial=PulseSequence([-1, 0, 0, 0]))
        assert result.terminated_early
        assert result.generations_run == 0
        assert result.best.genome.to_text() == "-000"

    def test_history_never_worsens(self, small_problem, drive):
        model, gate = small_problem
        config = GaConfig(sequence_length=8, max_iterations=30, rng_seed=4)
        result = evolve(config, model, drive, gate)
        keys = [sort_key(s) for s in result.history]
        assert all(b <= a for a, b in zip(keys, keys[1:]))
        assert sort_key(result.best.score) == keys[-1]
        assert len(result.history) == result.generations_run + 1

    def test_population_size_is_constant(self, small_problem, drive, monkeypatch):
        sizes = []
        original = BaseScorer.score_population

        def recording(self, individuals):
            sizes.append(len(individuals))
            return original(self, individuals)

        monkeypatch.setattr(BaseScorer, "score_population", recording)
        model, gate = small_problem
        evolve(GaConfig(sequence_length=8, max_iterations=5, rng_seed=2), model, drive, gate)
        assert sizes and set(sizes) == {17}

    def test_reproducible(self, small_problem, drive):
        model, gate = small_problem
        config = GaConfig(sequence_length=8, max_iterations=15, rng_seed=9)
        a = evolve(config, model, drive, gate)
        b = evolve(config, model, drive, gate)
        assert a.best.genome == b.best.genome
        assert a.history == b.history

    @pytest.mark.parametrize("workers", [2, 4, 8])
    def test_parallel_scoring_matches_serial(self, small_problem, drive, workers):
        model, gate = small_problem
        config = GaConfig(sequence_length=8, max_iterations=5, rng_seed=1)
        serial = evolve(config, model, drive, gate, workers=1)
        parallel = evolve(config, model, drive, gate, workers=workers)
        assert serial.best.genome == parallel.best.genome
        assert serial.history == parallel.history

    def test_concurrent_searches_do_not_interfere(self, small_problem, drive):
        model, gate = small_problem
        configs = [GaConfig(sequence_length=8, max_iterations=8, rng_seed=s) for s in range(4)]
        serial = [evolve(c, model, drive, gate) for c in configs]
        with concurrent.futures.ThreadPoolExecutor(max_workers=4) as pool:
            threaded = list(pool.map(lambda c: evolve(c, model, drive, gate), configs))
        for a, b in zip(serial, threaded):
            assert a.best.genome == b.best.genome
            assert a.history == b.history

    def test_stop_event_cancels(self, small_problem, drive):
        model, gate = small_problem
        stop = threading.Event()
        stop.set()
        result = evolve(GaConfig(sequence_length=8, max_iterations=100), model, drive, gate,
                        stop_event=stop)
        assert result.cancelled
        assert result.generations_run == 0

    def test_progress_callback(self, small_problem, drive):
        model, gate = small_problem
        seen = []
        evolve(GaConfig(sequence_length=8, max_iterations=3), model, drive, gate,
               progress_callback=lambda gen, score: seen.append(gen))
        assert seen[0] == 0
        assert seen == list(range(len(seen)))

    def test_subsequence_mode(self, small_problem, drive):
        model, gate = small_problem
        config = GaConfig(sequence_length=5, mode="subsequence", max_rep=6, max_iterations=5)
        result = evolve(config, model, drive, gate)
        assert 1 <= result.best.best_rep <= 6

    def test_max_iterations_zero(self, small_problem, drive):
        model, gate = small_problem
        result = evolve(GaConfig(sequence_length=8, max_iterations=0), model, drive, gate)
        assert result.generations_run == 0
        assert len(result.history) == 1
