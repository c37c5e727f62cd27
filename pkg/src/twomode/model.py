"""Core two-mode model: parameters, states, complex spectrum, equations of motion.

Conventions (natural units): hbar = 1 and the coherent coupling rate
omega_r = 1 set the energy and time scales.  The evolution is
i d(psi)/dt = H(|psi_x|^2) psi with the non-Hermitian matrix

    H = [[e_c - i*gamma_c,  omega_r         ],
         [omega_r,          e_x + g*n + i*p ]],   g = g1 - i*g2,  n = |psi_x|^2.

Densities are carried as x = n_x^2 (amplitude squared) throughout.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "TwoModeState",
    "SpectrumPair",
    "spectrum",
    "spectrum_arrays",
    "hamiltonian",
    "rhs",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the two-mode system (natural units).

    gamma_c and p must be given; the remaining fields default to the
    reference blue-detuned configuration (e_c - e_x = 0.2, g1 = 0.1,
    g2 = 0.3*g1).
    """

    gamma_c: float
    p: float
    e_c: float = 0.2
    e_x: float = 0.0
    omega_r: float = 1.0
    g1: float = 0.1
    g2: float = 0.03

    def __post_init__(self):
        if self.gamma_c < 0:
            raise ValueError(f"gamma_c must be >= 0, got {self.gamma_c}")
        if self.p < 0:
            raise ValueError(f"p must be >= 0, got {self.p}")
        if self.g1 <= 0:
            raise ValueError(f"g1 must be > 0, got {self.g1}")
        if self.g2 < 0:
            raise ValueError(f"g2 must be >= 0, got {self.g2}")
        if self.omega_r < 0:
            raise ValueError(f"omega_r must be >= 0, got {self.omega_r}")

    def delta(self) -> float:
        """Photon-exciton energy detuning e_c - e_x."""
        return self.e_c - self.e_x


@dataclass(frozen=True)
class TwoModeState:
    """Complex amplitudes (psi_c, psi_x) of the photon and exciton modes."""

    psi_c: complex
    psi_x: complex

    @property
    def n_c(self) -> float:
        return abs(self.psi_c)

    @property
    def n_x(self) -> float:
        return abs(self.psi_x)

    def as_array(self) -> np.ndarray:
        return np.array([self.psi_c, self.psi_x], dtype=complex)


@dataclass(frozen=True)
class SpectrumPair:
    """The two complex eigenvalue branches at a fixed exciton density."""

    e_upper: complex
    e_lower: complex


def _principal_sqrt(z: complex) -> complex:
    """Principal square root: Re >= 0, ties (negative real axis) toward Im >= 0.

    A negative-zero imaginary part would flip cmath.sqrt onto the lower
    branch cut, so it is normalised away first.
    """
    if z.imag == 0.0:
        z = complex(z.real, 0.0)
    return cmath.sqrt(z)


def hamiltonian(params: ModelParams, x: float) -> np.ndarray:
    """The 2x2 non-Hermitian matrix evaluated at exciton density x = n_x^2."""
    g = params.g1 - 1j * params.g2
    return np.array(
        [
            [params.e_c - 1j * params.gamma_c, params.omega_r],
            [params.omega_r, params.e_x + g * x + 1j * params.p],
        ],
        dtype=complex,
    )


def spectrum(params: ModelParams, x: float) -> SpectrumPair:
    """Both eigenvalue branches at density x.

    E_pm = (e_c + EE + i(PP - gamma_c))/2 +- sqrt(4 omega_r^2 + (A + iB)^2)/2
    with EE = e_x + g1*x, PP = p - g2*x, A = EE - e_c, B = PP + gamma_c.
    The principal square root (Re >= 0, tie toward Im >= 0) defines the
    upper (+) and lower (-) branches.
    """
    if x < 0:
        raise ValueError(f"density x must be >= 0, got {x}")
    ee = params.e_x + params.g1 * x
    pp = params.p - params.g2 * x
    a = ee - params.e_c
    b = pp + params.gamma_c
    rad = 4.0 * params.omega_r**2 + complex(a, b) ** 2
    s = _principal_sqrt(rad)
    t = complex(params.e_c + ee, pp - params.gamma_c)
    return SpectrumPair(0.5 * (t + s), 0.5 * (t - s))


def spectrum_arrays(params: ModelParams, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised spectrum over an array of densities; returns (E_upper, E_lower)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("densities must be >= 0")
    ee = params.e_x + params.g1 * x
    pp = params.p - params.g2 * x
    a = ee - params.e_c
    b = pp + params.gamma_c
    rad = (4.0 * params.omega_r**2 + (a + 1j * b) ** 2).astype(complex)
    rad = np.where(rad.imag == 0.0, rad.real + 0j, rad)
    s = np.sqrt(rad)
    t = (params.e_c + ee) + 1j * (pp - params.gamma_c)
    return 0.5 * (t + s), 0.5 * (t - s)


def spectrum_derivative(params: ModelParams, x: float, upper: bool) -> complex | None:
    """dE/dx of one branch; None at an exact branch coalescence (sqrt = 0)."""
    a = params.g1 * x - params.delta()
    b = params.p - params.g2 * x + params.gamma_c
    rad = 4.0 * params.omega_r**2 + complex(a, b) ** 2
    s = _principal_sqrt(rad)
    if abs(s) < 1e-14:
        return None
    gbar = complex(params.g1, -params.g2)
    ds = complex(a, b) * gbar / s
    return 0.5 * (gbar + ds) if upper else 0.5 * (gbar - ds)


def rhs(params: ModelParams, s: TwoModeState) -> TwoModeState:
    """Time derivative d(psi)/dt = -i H(|psi_x|^2) psi."""
    n2 = abs(s.psi_x) ** 2
    g = params.g1 - 1j * params.g2
    dc = -1j * ((params.e_c - 1j * params.gamma_c) * s.psi_c + params.omega_r * s.psi_x)
    dx = -1j * (params.omega_r * s.psi_c + (params.e_x + g * n2 + 1j * params.p) * s.psi_x)
    return TwoModeState(dc, dx)
