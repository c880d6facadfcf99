import json
import math
import os
from dataclasses import dataclass, field, fields


EVOLVE_THREADS = int(os.getenv("SFQ_EVOLVE_THREADS", "0") or 0)
ANGLE_SWITCH = float(os.getenv("SFQ_ANGLE_SWITCH", "1e-4"))
OUT_DIR = os.getenv("SFQ_OUT_DIR", "results")

# Defaults for the 21-point grid
GENERATOR_GHZ = 25.0
DELTA_THETA = 0.032
ANHARMONICITY_GHZ = 0.25  # assumed: never published for the reference grid
DIM = 5
LENGTH_RANGE = (96, 120)
MAX_REP = 35


class ConfigError(ValueError):
    pass


def scoring_workers(requested):
    """Apply the SFQ_EVOLVE_THREADS cap to a requested worker count."""
    requested = max(1, int(requested))
    if EVOLVE_THREADS > 0:
        return min(requested, EVOLVE_THREADS)
    return requested


@dataclass
class SweepConfig:
    frequencies_ghz: list = field(default_factory=list)
    generator_ghz: float = GENERATOR_GHZ
    delta_theta: float = DELTA_THETA
    anharmonicity_ghz: float = ANHARMONICITY_GHZ
    dim: int = DIM
    theta_target: float = math.pi / 2
    mode: str = "sequence"
    alphabet: str = "bipolar"
    length_range: tuple = LENGTH_RANGE
    max_rep: int = MAX_REP
    max_duration_ns: float = None
    seeds_per_point: int = 1
    base_seed: int = 0
    workers: int = 1
    max_iterations: int = 500

    def __post_init__(self):
        self.frequencies_ghz = [float(f) for f in self.frequencies_ghz]
        self.length_range = tuple(int(x) for x in self.length_range)
        if any(f <= 0 for f in self.frequencies_ghz):
            raise ConfigError("all qubit frequencies must be positive")
        if self.generator_ghz <= 0:
            raise ConfigError("generator frequency must be positive")
        if len(self.length_range) != 2 or self.length_range[0] > self.length_range[1]:
            raise ConfigError(f"empty length range {self.length_range}")
        if self.mode not in ("sequence", "subsequence"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.alphabet not in ("bipolar", "unipolar"):
            raise ConfigError(f"unknown alphabet {self.alphabet!r}")
        if self.seeds_per_point < 1:
            raise ConfigError("seeds_per_point must be at least 1")

    @property
    def lengths(self):
        lo, hi = self.length_range
        return list(range(lo, hi + 1))

    def seeds(self):
        return [self.base_seed + k for k in range(self.seeds_per_point)]


def parse_length_range(text):
    """'96..120' -> (96, 120); a bare '114' is a one-element range."""
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            return int(lo), int(lo)
        return int(lo), int(hi)
    except ValueError:
        raise ConfigError(f"bad length range {text!r}, expected A..B") from None


def load_sweep_config(path="sweep_config.json"):
    if not os.path.exists(path):
        return SweepConfig()
    with open(path) as f:
        data = json.load(f)
    known = {fl.name for fl in fields(SweepConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown keys in {path}: {', '.join(sorted(unknown))}")
    return SweepConfig(**data)
