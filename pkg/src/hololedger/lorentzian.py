"""Unitary real-time evolution of a free non-relativistic particle.

Free evolution is diagonal in momentum space, so `evolve` multiplies the FFT
of ψ by exp(−iħk²t/2m) and transforms back. The grid is periodic; packets
are expected to stay at least 6σ away from the edges.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError
from .qstate import DensityMatrix, Grid1D, WaveFunction, pure_state_entropy, vn_entropy

logger = logging.getLogger(__name__)

Snapshot = WaveFunction | DensityMatrix


@dataclass(frozen=True)
class LorentzianParams:
    m: float = 1.0
    hbar: float = 1.0
    dt: float = 1e-3

    def __post_init__(self) -> None:
        for name in ("m", "hbar", "dt"):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class GaussianPacketSpec:
    """Minimum-uncertainty packet centred at x0 with width sigma0 and momentum p0."""

    x0: float = 0.0
    sigma0: float = 1.0
    p0: float = 0.0

    def __post_init__(self) -> None:
        if not self.sigma0 > 0:
            raise DomainError(f"sigma0 must be positive, got {self.sigma0}")

    def fits(self, grid: Grid1D, margin: float = 6.0) -> bool:
        return (
            self.x0 - margin * self.sigma0 >= grid.x_min
            and self.x0 + margin * self.sigma0 <= grid.x_max
        )


def gaussian_packet(grid: Grid1D, spec: GaussianPacketSpec, hbar: float = 1.0) -> WaveFunction:
    """ψ(x) = (2πσ0²)^(-1/4) exp(−(x−x0)²/4σ0² + i p0 x/ħ)."""
    if not spec.fits(grid):
        raise DomainError(
            f"Packet x0={spec.x0} ± 6σ0 (σ0={spec.sigma0}) does not fit in "
            f"[{grid.x_min}, {grid.x_max}]"
        )
    x = grid.x
    envelope = np.exp(-((x - spec.x0) ** 2) / (4.0 * spec.sigma0**2))
    phase = np.exp(1j * spec.p0 * x / hbar)
    return WaveFunction.normalized(grid, envelope * phase)


def propagator_formula(
    x: ArrayLike, x0: ArrayLike, t: complex, m: float, hbar: float
) -> NDArray[np.complex128]:
    """Closed-form kernel √(m/2πiħt)·exp(i m (x−x0)²/2ħt) for complex t, principal branch."""
    dx2 = (np.asarray(x, dtype=np.float64) - np.asarray(x0, dtype=np.float64)) ** 2
    tc = complex(t)
    prefactor = np.sqrt(complex(m) / (2.0 * np.pi * 1j * hbar * tc))
    return np.asarray(prefactor * np.exp(1j * m * dx2 / (2.0 * hbar * tc)), dtype=np.complex128)


def free_propagator(
    x: ArrayLike, x0: ArrayLike, t: float, params: LorentzianParams
) -> NDArray[np.complex128]:
    """Free-particle kernel K(x, x0; t) for real t > 0."""
    if not t > 0:
        raise DomainError(f"Propagator needs t > 0, got {t}")
    return propagator_formula(x, x0, t, params.m, params.hbar)


def evolve(psi: WaveFunction, n_steps: int, params: LorentzianParams) -> WaveFunction:
    """Exact free evolution over n_steps·dt by the spectral method."""
    if n_steps < 0:
        raise DomainError(f"n_steps must be >= 0, got {n_steps}; use time_reverse to go back")
    if n_steps == 0:
        return psi
    t = n_steps * params.dt
    k = psi.grid.k
    phase = np.exp(-1j * params.hbar * k**2 * t / (2.0 * params.m))
    out = np.fft.ifft(np.fft.fft(psi.amplitudes) * phase)
    logger.debug("evolved %d steps (t=%g)", n_steps, t)
    return WaveFunction(psi.grid, out)


def trajectory(
    psi: WaveFunction, n_snapshots: int, steps_per_snapshot: int, params: LorentzianParams
) -> list[WaveFunction]:
    """Initial state followed by n_snapshots states spaced by steps_per_snapshot steps."""
    if n_snapshots < 0 or steps_per_snapshot < 0:
        raise DomainError("Snapshot counts must be non-negative")
    states = [psi]
    for _ in range(n_snapshots):
        states.append(evolve(states[-1], steps_per_snapshot, params))
    return states


def entropy_drift(states: Sequence[Snapshot]) -> float:
    """Largest von Neumann entropy (bits) along a trajectory.

    Wavefunctions enter as rank-1 densities; density matrices are taken as is,
    so a decohered snapshot shows up as a violation.
    """
    if not states:
        raise DomainError("entropy_drift needs at least one snapshot")
    worst = 0.0
    for state in states:
        if isinstance(state, WaveFunction):
            value = pure_state_entropy(state)
        else:
            value = vn_entropy(state)
        worst = max(worst, value)
    return worst


def time_reverse(psi: WaveFunction) -> WaveFunction:
    """Complex conjugation; evolving the conjugate forward runs the original backward."""
    return WaveFunction(psi.grid, np.conj(psi.amplitudes))


def position_mean(psi: WaveFunction) -> float:
    density = psi.probability_density()
    return float(np.sum(psi.grid.x * density) * psi.grid.dx)


def position_variance(psi: WaveFunction) -> float:
    density = psi.probability_density()
    mean = position_mean(psi)
    return float(np.sum((psi.grid.x - mean) ** 2 * density) * psi.grid.dx)


def kinetic_energy(psi: WaveFunction, params: LorentzianParams) -> float:
    """⟨ħ²k²/2m⟩ evaluated in momentum space."""
    weights = np.abs(np.fft.fft(psi.amplitudes)) ** 2
    energies = (params.hbar * psi.grid.k) ** 2 / (2.0 * params.m)
    return float(np.sum(weights * energies) / np.sum(weights))


def packet_width(spec: GaussianPacketSpec, t: float, params: LorentzianParams) -> float:
    """σ(t) = √(σ0² + (ħt/2mσ0)²)."""
    spread = params.hbar * t / (2.0 * params.m * spec.sigma0)
    return math.sqrt(spec.sigma0**2 + spread**2)


def propagate_with_kernel(
    psi: WaveFunction, t: float, params: LorentzianParams
) -> NDArray[np.complex128]:
    """ψ(x, t) = Σ K(x, x'; t) ψ(x') dx' on the grid (no periodic images)."""
    x = psi.grid.x
    kernel = free_propagator(x[:, None], x[None, :], t, params)
    return np.asarray(kernel @ psi.amplitudes * psi.grid.dx, dtype=np.complex128)


__all__ = [
    "LorentzianParams",
    "GaussianPacketSpec",
    "gaussian_packet",
    "propagator_formula",
    "free_propagator",
    "evolve",
    "trajectory",
    "entropy_drift",
    "time_reverse",
    "position_mean",
    "position_variance",
    "kinetic_energy",
    "packet_width",
    "propagate_with_kernel",
]
