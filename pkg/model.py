"""Truncated transmon: circuit parameters, Hamiltonian parameters, ladder operators.

Units: hbar = 1, angular frequencies in rad/ns, times in ns. Constructors
taking GHz convert once at the boundary.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import constants

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
MIN_TRANSMON_RATIO = 20.0
MAX_DIM = 16


class ParameterError(ValueError):
    """A parameter lies outside its physical or numerical domain."""


@dataclass(frozen=True)
class CircuitParams:
    josephson_energy: float  # E_J, rad/ns
    charging_energy: float  # E_C, rad/ns
    coupling_capacitance: float = None  # C_c, F
    qubit_capacitance: float = None  # C_q, F

    def __post_init__(self):
        if self.josephson_energy <= 0 or self.charging_energy <= 0:
            raise ParameterError(
                f"energies must be positive (E_J={self.josephson_energy}, "
                f"E_C={self.charging_energy})"
            )
        ratio = self.josephson_energy / self.charging_energy
        if ratio <= 1:
            raise ParameterError(f"E_J/E_C = {ratio:.3g} is outside the transmon regime")
        if ratio < MIN_TRANSMON_RATIO:
            log.warning("E_J/E_C = %.3g is below the transmon regime (>= %g)",
                        ratio, MIN_TRANSMON_RATIO)

    @property
    def has_capacitances(self):
        return self.coupling_capacitance is not None and self.qubit_capacitance is not None


@dataclass(frozen=True)
class TransmonModel:
    omega0: float  # rad/ns
    alpha: float  # rad/ns
    delta_theta: float  # rad per pulse
    dim: int = 5

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ParameterError(f"omega0 must be positive, got {self.omega0}")
        if self.alpha < 0:
            raise ParameterError(f"alpha must be non-negative, got {self.alpha}")
        if not 0 < self.delta_theta < math.pi / 4:
            raise ParameterError(f"delta_theta must lie in (0, pi/4), got {self.delta_theta}")
        if not 2 <= self.dim <= MAX_DIM:
            raise ParameterError(f"dim must lie in [2, {MAX_DIM}], got {self.dim}")

    @classmethod
    def from_ghz(cls, f0, f_alpha=0.25, delta_theta=0.032, dim=5):
        return cls(TWO_PI * f0, TWO_PI * f_alpha, delta_theta, dim)

    @property
    def f0(self):
        """Qubit frequency in GHz."""
        return self.omega0 / TWO_PI

    @property
    def f_alpha(self):
        return self.alpha / TWO_PI

    def with_dim(self, dim):
        return TransmonModel(self.omega0, self.alpha, self.delta_theta, dim)


@dataclass(frozen=True)
class DriveConfig:
    omega_g: float  # rad/ns

    def __post_init__(self):
        if not self.omega_g > 0:
            raise ParameterError(f"omega_g must be positive, got {self.omega_g}")

    @classmethod
    def from_ghz(cls, f_g=25.0):
        return cls(TWO_PI * f_g)

    @property
    def f_g(self):
        return self.omega_g / TWO_PI

    @property
    def tick(self):
        """Generator period T_g in ns."""
        return TWO_PI / self.omega_g

    def check(self, model):
        if self.omega_g <= 2 * model.omega0:
            log.warning("Generator %.4g GHz gives fewer than two ticks per qubit period "
                        "(f0 = %.4g GHz)", self.f_g, model.f0)
            return False
        return True


def derive_model(circuit, dim=5, delta_theta=None):
    """Hamiltonian parameters from circuit energies.

    omega0 = sqrt(8 E_J E_C) and alpha = E_C / 12. The kick angle comes from
    the capacitances when both are known, otherwise from ``delta_theta``.
    """
    omega0 = math.sqrt(8.0 * circuit.josephson_energy * circuit.charging_energy)
    alpha = circuit.charging_energy / 12.0
    if circuit.has_capacitances:
        delta_theta = kick_angle(omega0, circuit.coupling_capacitance, circuit.qubit_capacitance)
    elif delta_theta is None:
        raise ParameterError("delta_theta must be supplied when C_c and C_q are unknown")
    return TransmonModel(omega0, alpha, delta_theta, dim)


def kick_angle(omega0, coupling_capacitance, qubit_capacitance):
    """delta_theta = C_c * Phi_0 * sqrt(omega0 / (2 hbar C_q)), SI inside."""
    if coupling_capacitance <= 0 or qubit_capacitance <= 0:
        raise ParameterError("capacitances must be positive")
    flux_quantum = constants.physical_constants["mag. flux quantum"][0]
    omega_si = omega0 * 1e9
    return coupling_capacitance * flux_quantum * math.sqrt(
        omega_si / (2.0 * constants.hbar * qubit_capacitance)
    )


def circuit_for_frequency(f0, ej_over_ec=50.0):
    """Circuit energies with a fixed E_J/E_C ratio that give qubit frequency f0 (GHz)."""
    if f0 <= 0 or ej_over_ec <= 1:
        raise ParameterError("need f0 > 0 and E_J/E_C > 1")
    ec = TWO_PI * f0 / math.sqrt(8.0 * ej_over_ec)
    return CircuitParams(ej_over_ec * ec, ec)


def circuit_from_model(model):
    """Inverse of derive_model for the energies (capacitances are not recoverable)."""
    ec = 12.0 * model.alpha
    if ec <= 0:
        raise ParameterError("alpha = 0 has no circuit counterpart")
    return CircuitParams(model.omega0 ** 2 / (8.0 * ec), ec)


@lru_cache(maxsize=None)
def ladder_matrices(dim):
    """(a, a_dag, a_dag - a) for a dim-level truncation; arrays are read-only."""
    if dim < 2:
        raise ParameterError(f"dim must be at least 2, got {dim}")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    a_dag = a.conj().T.copy()
    generator = a_dag - a
    for m in (a, a_dag, generator):
        m.setflags(write=False)
    return a, a_dag, generator


def number_operator(dim):
    return np.arange(dim, dtype=float)


def free_hamiltonian(model):
    """Diagonal of H0: E_n = omega0 n - (alpha / 2) n (n - 1)."""
    n = number_operator(model.dim)
    return model.omega0 * n - 0.5 * model.alpha * n * (n - 1)
