"""Gate quality of a pulse train: rotation angle, six-state fidelity, ordering."""

import math
from dataclasses import dataclass

import numpy as np

from config import ANGLE_SWITCH
from model import ParameterError
from propagate import GateUnitary, propagator, to_rotating_frame

MAX_REPETITIONS = 64

_S = 1.0 / math.sqrt(2.0)
# Columns: |x+>, |x->, |y+>, |y->, |z+>, |z->
CARDINAL_STATES = np.array(
    [
        [_S, _S, _S, _S, 1.0, 0.0],
        [_S, -_S, 1j * _S, -1j * _S, 0.0, 1.0],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class TargetGate:
    theta_target: float = math.pi / 2
    axis: str = "y"

    def __post_init__(self):
        if not 0 < self.theta_target <= math.pi:
            raise ParameterError(f"target angle must lie in (0, pi], got {self.theta_target}")
        if self.axis != "y":
            raise ParameterError(f"only y-axis targets are supported, got {self.axis!r}")

    def ideal(self):
        """exp(i theta sigma_y / 2) on the qubit."""
        c = math.cos(self.theta_target / 2)
        s = math.sin(self.theta_target / 2)
        return np.array([[c, s], [-s, c]], dtype=complex)

    def embedded(self, dim):
        u = np.eye(dim, dtype=complex)
        u[:2, :2] = self.ideal()
        return GateUnitary(u)


@dataclass(frozen=True)
class FitnessScore:
    angle_error: float
    infidelity: float

    def satisfies(self, angle_tol, infid_tol):
        return self.angle_error < angle_tol and self.infidelity < infid_tol


def sort_key(score, switch=ANGLE_SWITCH):
    """Key realising the thresholded lexicographic order.

    Scores under the angle switch-over rank by infidelity, the rest by angle
    error; any score under the switch beats any score above it.
    """
    if score.angle_error < switch:
        return (0, score.infidelity, score.angle_error)
    return (1, score.angle_error, score.infidelity)


def compare(a, b, switch=ANGLE_SWITCH):
    """-1 if a is better, 1 if b is better, 0 if equal."""
    ka, kb = sort_key(a, switch), sort_key(b, switch)
    return (ka > kb) - (ka < kb)


def extract_angle(u):
    return 2.0 * math.asin(min(max(abs(u.matrix[1, 0]), 0.0), 1.0))


def average_fidelity(u, gate):
    """Mean of |<a| U_g^dag U_id |a>|^2 over the six cardinal states.

    U_id acts as identity outside the qubit, so only the computational block
    of U_g contributes.
    """
    m = u.computational_block().conj().T @ gate.ideal()
    overlaps = np.einsum("ik,ij,jk->k", CARDINAL_STATES.conj(), m, CARDINAL_STATES)
    return float(np.mean(np.abs(overlaps) ** 2))


def leakage(u):
    """Population left outside {|0>, |1>}, averaged over both basis inputs."""
    cols = u.matrix[:, :2]
    return float(np.mean(np.sum(np.abs(cols[2:]) ** 2, axis=0)))


def score_unitary(u, gate):
    return FitnessScore(
        angle_error=abs(extract_angle(u) - gate.theta_target),
        infidelity=1.0 - average_fidelity(u, gate),
    )


def score_sequence(seq, model, drive, gate):
    return score_unitary(propagator(model, drive).rotating(seq), gate)


def score_subsequence(sub, max_rep, model, drive, gate, switch=ANGLE_SWITCH):
    """Best repetition count r in 1..max_rep of a sub-train and its score.

    The sub-train unitary is raised to successive powers in the lab frame and
    each power is framed at r * |sub| * T_g before scoring.
    """
    if not 1 <= max_rep <= MAX_REPETITIONS:
        raise ParameterError(f"max_rep must lie in [1, {MAX_REPETITIONS}], got {max_rep}")
    u_sub = propagator(model, drive).lab(sub)
    power = u_sub.matrix
    best_rep, best = 0, None
    for rep in range(1, max_rep + 1):
        if rep > 1:
            power = u_sub.matrix @ power
        framed = to_rotating_frame(GateUnitary(power, rep * u_sub.total_time), model)
        score = score_unitary(framed, gate)
        if best is None or sort_key(score, switch) < sort_key(best, switch):
            best_rep, best = rep, score
    return best_rep, best
