"""Pulse trains and their gate unitaries.

Each generator tick fires the kick for its symbol at the tick start, then the
transmon evolves freely for one tick. Kicks are instantaneous.
"""

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from model import ParameterError, free_hamiltonian, ladder_matrices, number_operator

MAX_LENGTH = 2048

_TO_CHAR = {1: "+", 0: "0", -1: "-"}
_FROM_CHAR = {v: k for k, v in _TO_CHAR.items()}


class MalformedSequenceError(ValueError):
    pass


class Alphabet(enum.Enum):
    BIPOLAR = "bipolar"
    UNIPOLAR = "unipolar"

    @property
    def symbols(self):
        if self is Alphabet.BIPOLAR:
            return (-1, 0, 1)
        return (0, 1)

    def alternatives(self, value):
        return tuple(s for s in self.symbols if s != value)


class PulseSequence:
    """Immutable train of symbols in {-1, 0, +1}, one per generator tick."""

    __slots__ = ("_symbols", "alphabet")

    def __init__(self, symbols, alphabet=Alphabet.BIPOLAR):
        raw = np.asarray(symbols).reshape(-1)
        alphabet = Alphabet(alphabet)
        if not 1 <= raw.size <= MAX_LENGTH:
            raise MalformedSequenceError(
                f"sequence length must lie in [1, {MAX_LENGTH}], got {raw.size}"
            )
        bad = ~np.isin(raw, alphabet.symbols)
        if bad.any():
            idx = int(np.flatnonzero(bad)[0])
            raise MalformedSequenceError(
                f"symbol {raw[idx]!r} at tick {idx} is not in the {alphabet.value} alphabet"
            )
        arr = raw.astype(np.int8)
        arr.setflags(write=False)
        self._symbols = arr
        self.alphabet = alphabet

    @property
    def symbols(self):
        return self._symbols

    def __len__(self):
        return self._symbols.size

    def __iter__(self):
        return iter(self._symbols.tolist())

    def __eq__(self, other):
        if not isinstance(other, PulseSequence):
            return NotImplemented
        return np.array_equal(self._symbols, other._symbols)

    def __hash__(self):
        return hash(self._symbols.tobytes())

    def __repr__(self):
        return f"PulseSequence({self.to_text()!r})"

    # -- Codecs -------------------------------------------------------------

    def to_text(self):
        return "".join(_TO_CHAR[s] for s in self._symbols.tolist())

    @classmethod
    def from_text(cls, text, alphabet=Alphabet.BIPOLAR):
        text = text.strip()
        try:
            return cls([_FROM_CHAR[c] for c in text], alphabet)
        except KeyError as exc:
            raise MalformedSequenceError(f"unexpected character {exc.args[0]!r}") from None

    def to_csv(self):
        return ",".join(str(s) for s in self._symbols.tolist())

    @classmethod
    def from_csv(cls, text, alphabet=Alphabet.BIPOLAR):
        try:
            return cls([int(tok) for tok in text.strip().split(",")], alphabet)
        except ValueError:
            raise MalformedSequenceError(f"not a comma-separated integer list: {text!r}") from None

    # -- Combinators --------------------------------------------------------

    def concat(self, other):
        return PulseSequence(np.concatenate([self._symbols, other.symbols]), self.alphabet)

    def repeat(self, times):
        return PulseSequence(np.tile(self._symbols, times), self.alphabet)

    def with_symbol(self, index, value):
        arr = self._symbols.copy()
        arr[index] = value
        return PulseSequence(arr, self.alphabet)

    def hamming(self, other):
        return int(np.count_nonzero(self._symbols != other.symbols))

    def zero_count(self):
        return int(np.count_nonzero(self._symbols == 0))


def pulse_count(seq):
    return len(seq) - seq.zero_count()


@dataclass(frozen=True)
class GateUnitary:
    matrix: np.ndarray
    total_time: float = 0.0

    @property
    def dim(self):
        return self.matrix.shape[0]

    def unitarity_error(self):
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))))

    def computational_block(self):
        return self.matrix[:2, :2]


# -- Building blocks ----------------------------------------------------------


def _hermitian_exp(hermitian, scale):
    """exp(-i * scale * H) for Hermitian H via its eigendecomposition."""
    evals, evecs = np.linalg.eigh(hermitian)
    return (evecs * np.exp(-1j * scale * evals)) @ evecs.conj().T


@lru_cache(maxsize=64)
def _kick_pair(model):
    _, _, generator = ladder_matrices(model.dim)
    # exp(s * (dtheta / 2) * G) = exp(-i * s * (dtheta / 2) * (iG)), iG Hermitian
    hermitian = 1j * generator
    half = 0.5 * model.delta_theta
    plus = _hermitian_exp(hermitian, half)
    minus = _hermitian_exp(hermitian, -half)
    for m in (plus, minus):
        m.setflags(write=False)
    return plus, minus


def kick_unitary(model, polarity):
    if polarity not in (-1, 1):
        raise ParameterError(f"kick polarity must be -1 or +1, got {polarity}")
    plus, minus = _kick_pair(model)
    return GateUnitary(plus if polarity == 1 else minus, 0.0)


def free_step(model, dt):
    if not dt > 0:
        raise ParameterError(f"free evolution time must be positive, got {dt}")
    return GateUnitary(np.diag(np.exp(-1j * free_hamiltonian(model) * dt)), dt)


def frame_phases(model, t):
    return np.exp(1j * model.omega0 * t * number_operator(model.dim))


def to_rotating_frame(u, model, t=None):
    """U_g = exp(+i omega0 t n) U_lab, with t defaulting to the train duration."""
    if t is None:
        t = u.total_time
    return GateUnitary(frame_phases(model, t)[:, None] * u.matrix, u.total_time)


class Propagator:
    """Per-(model, drive) cache of the three one-tick step matrices."""

    def __init__(self, model, drive):
        self.model = model
        self.drive = drive
        free = free_step(model, drive.tick).matrix
        plus, minus = _kick_pair(model)
        self._steps = {0: free, 1: free @ plus, -1: free @ minus}

    def lab(self, seq):
        u = np.eye(self.model.dim, dtype=complex)
        steps = self._steps
        for s in seq.symbols.tolist():
            u = steps[s] @ u
        return GateUnitary(u, len(seq) * self.drive.tick)

    def rotating(self, seq):
        return to_rotating_frame(self.lab(seq), self.model)


@lru_cache(maxsize=64)
def propagator(model, drive):
    return Propagator(model, drive)


def propagate(seq, model, drive):
    """Lab-frame unitary of a full train: product over ticks of FreeStep(T_g) K(s_k)."""
    if not isinstance(seq, PulseSequence):
        seq = PulseSequence(seq)
    return propagator(model, drive).lab(seq)
