"""State representations and entropy functionals.

Everything here is an immutable value: arrays are copied on construction and
marked read-only, so states can be shared freely between threads.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg, special, stats

from .errors import InvalidDistributionError, InvalidStateError


EntropyUnit = Literal["bits", "nats"]

#: Bit factor b: one bit of information is ln 2 nats.
BIT_FACTOR = math.log(2.0)

#: Eigenvalues at or below this are treated as exact zeros in λ log λ.
EIGENVALUE_CUTOFF = 1e-12

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-10
WEIGHT_TOL = 1e-12

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]


def _frozen(values: ArrayLike, dtype: type = np.complex128) -> NDArray[Any]:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _unit_divisor(unit: EntropyUnit) -> float:
    if unit == "bits":
        return BIT_FACTOR
    if unit == "nats":
        return 1.0
    raise ValueError(f"Unknown entropy unit: {unit!r} (expected 'bits' or 'nats')")


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on [x_min, x_max) with n_points samples."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self) -> None:
        n = self.n_points
        if n < 8 or n & (n - 1):
            raise InvalidStateError(f"n_points must be a power of two >= 8, got {n}")
        if not self.x_max > self.x_min:
            raise InvalidStateError(f"Grid needs x_max > x_min, got [{self.x_min}, {self.x_max}]")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def x(self) -> RealArray:
        return self.x_min + self.dx * np.arange(self.n_points, dtype=np.float64)

    @property
    def k(self) -> RealArray:
        """Angular wavenumbers in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitude ψ(x) sampled on a grid, with Σ|ψ|²·dx = 1."""

    grid: Grid1D
    amplitudes: ComplexArray

    def __post_init__(self) -> None:
        amps = _frozen(self.amplitudes)
        if amps.shape != (self.grid.n_points,):
            raise InvalidStateError(
                f"Expected {self.grid.n_points} amplitudes, got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("Wavefunction contains NaN or Inf")
        object.__setattr__(self, "amplitudes", amps)
        drift = abs(self.norm() - 1.0)
        if drift > NORM_TOL:
            raise InvalidStateError(f"Wavefunction norm off by {drift:.3e}")

    @classmethod
    def normalized(cls, grid: Grid1D, amplitudes: ArrayLike) -> WaveFunction:
        amps = np.asarray(amplitudes, dtype=np.complex128)
        norm = float(np.sum(np.abs(amps) ** 2) * grid.dx)
        if norm <= 0.0:
            raise InvalidStateError("Cannot normalize a zero wavefunction")
        return cls(grid, amps / math.sqrt(norm))

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx)

    def probability_density(self) -> RealArray:
        return np.abs(self.amplitudes) ** 2

    def to_vector(self) -> ComplexArray:
        """Unit vector in C^n (amplitudes weighted by √dx)."""
        return np.asarray(self.amplitudes * math.sqrt(self.grid.dx))

    def to_density(self) -> DensityMatrix:
        return DensityMatrix.pure(self.to_vector())

    def __repr__(self) -> str:  # pragma: no cover - convenience
        return f"WaveFunction(n_points={self.grid.n_points}, dx={self.grid.dx:.4g})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Finite-dimensional mixed state: Hermitian, unit trace, positive semidefinite."""

    entries: ComplexArray

    def __post_init__(self) -> None:
        rho = _frozen(self.entries)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
            raise InvalidStateError(f"Density matrix must be square, got shape {rho.shape}")
        asym = float(np.max(np.abs(rho - rho.conj().T)))
        if asym > HERMITIAN_TOL:
            raise InvalidStateError(f"Density matrix is not Hermitian (max deviation {asym:.3e})")
        trace = complex(np.trace(rho))
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"Density matrix trace is {trace.real:.15g}, expected 1")
        lowest = float(linalg.eigvalsh(rho)[0])
        if lowest < -PSD_TOL:
            raise InvalidStateError(f"Density matrix has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "entries", rho)

    @classmethod
    def pure(cls, vector: ArrayLike) -> DensityMatrix:
        vec = np.asarray(vector, dtype=np.complex128).reshape(-1)
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"Pure state vector norm is {norm:.15g}, expected 1")
        return cls(np.outer(vec, vec.conj()))

    @classmethod
    def from_matrix(cls, matrix: ArrayLike) -> DensityMatrix:
        """Build from a matrix that is Hermitian up to rounding."""
        mat = np.asarray(matrix, dtype=np.complex128)
        return cls(0.5 * (mat + mat.conj().T))

    @classmethod
    def maximally_mixed(cls, dim: int) -> DensityMatrix:
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def eigenvalues(self) -> RealArray:
        return np.asarray(linalg.eigvalsh(self.entries), dtype=np.float64)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(float(self.eigenvalues()[-1]) - 1.0) < tol

    def conjugate_by(self, unitary: ArrayLike) -> DensityMatrix:
        u = np.asarray(unitary, dtype=np.complex128)
        return DensityMatrix.from_matrix(u @ self.entries @ u.conj().T)

    def __repr__(self) -> str:  # pragma: no cover - convenience
        return f"DensityMatrix(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weighted collection of unit state vectors (copies of the system)."""

    members: tuple[tuple[float, ComplexArray], ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise InvalidStateError("Ensemble needs at least one member")
        frozen: list[tuple[float, ComplexArray]] = []
        for weight, state in self.members:
            w = float(weight)
            if w < -WEIGHT_TOL or w > 1.0 + WEIGHT_TOL:
                raise InvalidStateError(f"Ensemble weight {w} outside [0, 1]")
            vec = _frozen(np.asarray(state).reshape(-1))
            norm = float(np.linalg.norm(vec))
            if abs(norm - 1.0) > NORM_TOL:
                raise InvalidStateError(f"Ensemble member norm is {norm:.15g}, expected 1")
            frozen.append((w, vec))
        total = math.fsum(w for w, _ in frozen)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise InvalidStateError(f"Ensemble weights sum to {total:.15g}, expected 1")
        object.__setattr__(self, "members", tuple(frozen))

    @classmethod
    def of(cls, members: Iterable[tuple[float, ArrayLike]]) -> Ensemble:
        return cls(tuple((float(w), np.asarray(v, dtype=np.complex128)) for w, v in members))

    @property
    def weights(self) -> RealArray:
        return np.array([w for w, _ in self.members], dtype=np.float64)

    @property
    def is_pure(self) -> bool:
        """A single member carries all the weight."""
        return sum(1 for w, _ in self.members if w > WEIGHT_TOL) == 1

    def __len__(self) -> int:
        return len(self.members)


def vn_entropy(rho: DensityMatrix, unit: EntropyUnit = "bits") -> float:
    """Von Neumann entropy −Σ λ log λ over eigenvalues above the cutoff."""
    if not isinstance(rho, DensityMatrix):
        raise InvalidStateError(f"Expected a DensityMatrix, got {type(rho).__name__}")
    return _spectral_entropy(rho.eigenvalues(), unit)


def _spectral_entropy(eigenvalues: RealArray, unit: EntropyUnit) -> float:
    lam = eigenvalues[eigenvalues > EIGENVALUE_CUTOFF]
    value = float(np.sum(special.entr(lam))) / _unit_divisor(unit)
    return max(value, 0.0)


def shannon_entropy(p: ArrayLike, unit: EntropyUnit = "bits") -> float:
    """Shannon entropy −Σ p log p with 0·log 0 = 0."""
    probs = np.asarray(p, dtype=np.float64).reshape(-1)
    if probs.size == 0:
        raise InvalidDistributionError("Empty probability vector")
    if np.any(probs < 0.0):
        raise InvalidDistributionError(f"Negative probability {float(probs.min()):.3e}")
    total = math.fsum(probs.tolist())
    if abs(total - 1.0) > WEIGHT_TOL:
        raise InvalidDistributionError(f"Probabilities sum to {total:.15g}, expected 1")
    value = float(np.sum(special.entr(probs))) / _unit_divisor(unit)
    return max(value, 0.0)


def ensemble_to_density(ensemble: Ensemble) -> DensityMatrix:
    """ρ = Σ w_i |v_i⟩⟨v_i|."""
    dims = {vec.shape[0] for _, vec in ensemble.members}
    if len(dims) != 1:
        raise InvalidStateError(f"Ensemble members have mismatched dimensions {sorted(dims)}")
    dim = dims.pop()
    rho = np.zeros((dim, dim), dtype=np.complex128)
    for weight, vec in ensemble.members:
        rho += weight * np.outer(vec, vec.conj())
    return DensityMatrix.from_matrix(rho)


def pure_state_entropy(psi: WaveFunction, unit: EntropyUnit = "bits") -> float:
    """Entropy of |ψ⟩⟨ψ| without forming the n×n matrix.

    The nonzero spectrum of A A† equals that of A† A; for a single column A = ψ
    that is the 1×1 Gram matrix ⟨ψ|ψ⟩.
    """
    vec = psi.to_vector()
    gram = np.array([float(np.real(np.vdot(vec, vec)))], dtype=np.float64)
    return _spectral_entropy(gram, unit)


def basis_state(dim: int, index: int) -> ComplexArray:
    vec = np.zeros(dim, dtype=np.complex128)
    vec[index] = 1.0
    return vec


def random_unitary(dim: int, seed: int | np.random.Generator | None = None) -> ComplexArray:
    """Haar-random unitary (scipy's unitary_group)."""
    return np.asarray(stats.unitary_group.rvs(dim, random_state=seed), dtype=np.complex128)


def random_pure_state(dim: int, seed: int | np.random.Generator | None = None) -> ComplexArray:
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return np.asarray(vec / np.linalg.norm(vec), dtype=np.complex128)


def random_density(
    dim: int, rank: int | None = None, seed: int | np.random.Generator | None = None
) -> DensityMatrix:
    """Random mixed state ρ = G G† / tr(G G†) with G of shape dim×rank."""
    rng = np.random.default_rng(seed)
    cols = dim if rank is None else rank
    g = rng.standard_normal((dim, cols)) + 1j * rng.standard_normal((dim, cols))
    rho = g @ g.conj().T
    return DensityMatrix.from_matrix(rho / np.trace(rho).real)


def probabilities_from(values: Sequence[float]) -> RealArray:
    """Clip rounding negatives and renormalize a near-distribution."""
    probs = np.clip(np.asarray(values, dtype=np.float64), 0.0, None)
    return probs / probs.sum()


__all__ = [
    "BIT_FACTOR",
    "EIGENVALUE_CUTOFF",
    "EntropyUnit",
    "Grid1D",
    "WaveFunction",
    "DensityMatrix",
    "Ensemble",
    "vn_entropy",
    "shannon_entropy",
    "ensemble_to_density",
    "pure_state_entropy",
    "basis_state",
    "random_unitary",
    "random_pure_state",
    "random_density",
    "probabilities_from",
]
