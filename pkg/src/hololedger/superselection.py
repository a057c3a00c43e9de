"""Orbital superselection on a phase-space lattice of Planck cells.

Cells have widths dQ and dP = h/dQ. Each cell is seeded with a coherent state
at its centre; the seeds are orthonormalised symmetrically (Löwdin, S^(-1/2))
so every cell is treated alike. Coarse position and momentum observables are
then diagonal in the resulting basis and commute exactly, while the fine
grid operators keep [Q, P] = iħ.
"""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from .errors import ConstructionError, DomainError, InvalidStateError
from .qstate import DensityMatrix, Ensemble, Grid1D, WaveFunction

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]

MIN_POINTS_PER_CELL = 8
GRAM_FLOOR = 1e-10
ORTHONORMALITY_TOL = 1e-10
DISCARD_WARNING = 0.05
KEEP_FLOOR = 1e-12
SUPPORT_MARGIN = 6.0
EDGE_FRACTION = 1.0 / 32.0
EDGE_DENSITY_TOL = 1e-12

CellLabel = tuple[int, int]


@dataclass(frozen=True)
class PhaseSpaceLattice:
    """n_q × n_p window of Planck cells; dP is derived so that dQ·dP = h."""

    dQ: float  # noqa: N815
    n_q: int
    n_p: int
    hbar: float = 1.0
    q_center: float = 0.0
    p_center: float = 0.0

    def __post_init__(self) -> None:
        if not self.dQ > 0 or not self.hbar > 0:
            raise DomainError(f"dQ and hbar must be positive, got dQ={self.dQ}, hbar={self.hbar}")
        if self.n_q < 1 or self.n_p < 1:
            raise DomainError(f"Cell window must be at least 1x1, got {self.n_q}x{self.n_p}")

    @property
    def h(self) -> float:
        return 2.0 * math.pi * self.hbar

    @property
    def dP(self) -> float:  # noqa: N802
        return self.h / self.dQ

    @property
    def n_cells(self) -> int:
        return self.n_q * self.n_p

    def q_values(self) -> RealArray:
        offsets = np.arange(self.n_q, dtype=np.float64) - 0.5 * (self.n_q - 1)
        return self.q_center + self.dQ * offsets

    def p_values(self) -> RealArray:
        offsets = np.arange(self.n_p, dtype=np.float64) - 0.5 * (self.n_p - 1)
        return self.p_center + self.dP * offsets

    def labels(self) -> list[CellLabel]:
        return [(j, k) for j in range(self.n_q) for k in range(self.n_p)]

    def cell_centers(self) -> list[tuple[float, float]]:
        qs, ps = self.q_values(), self.p_values()
        return [(float(qs[j]), float(ps[k])) for j, k in self.labels()]

    def seed_width(self, scale: float = 1.0) -> float:
        """Position width σ = √(ħ/2 · dQ/dP)·scale; σ/dQ equals σ_p/dP at scale 1."""
        return math.sqrt(0.5 * self.hbar * self.dQ / self.dP) * scale

    def is_edge(self, label: CellLabel) -> bool:
        j, k = label
        return j in (0, self.n_q - 1) or k in (0, self.n_p - 1)


@dataclass(frozen=True, eq=False)
class CellBasis:
    """Orthonormal cell-localised vectors (columns, unit vectors in C^n_points)."""

    lattice: PhaseSpaceLattice
    grid: Grid1D
    vectors: ComplexArray
    seeds: ComplexArray
    labels: tuple[CellLabel, ...]

    def __post_init__(self) -> None:
        if self.vectors.shape != (self.grid.n_points, len(self.labels)):
            raise InvalidStateError(
                f"Basis shape {self.vectors.shape} does not match "
                f"{self.grid.n_points} points x {len(self.labels)} cells"
            )
        for name in ("vectors", "seeds"):
            arr = np.array(getattr(self, name), dtype=np.complex128, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.labels)

    def gram(self) -> ComplexArray:
        return np.asarray(self.vectors.conj().T @ self.vectors)

    def gram_deviation(self) -> float:
        return float(np.max(np.abs(self.gram() - np.eye(len(self)))))

    def parent_overlaps(self) -> RealArray:
        """|⟨seed_i|v_i⟩| for every cell."""
        return np.abs(np.einsum("ij,ij->j", self.seeds.conj(), self.vectors))

    def edge_cells(self) -> list[CellLabel]:
        return [label for label in self.labels if self.lattice.is_edge(label)]

    def index_of(self, label: CellLabel) -> int:
        return self.labels.index(label)

    def wavefunction(self, label: CellLabel) -> WaveFunction:
        column = self.vectors[:, self.index_of(label)]
        return WaveFunction(self.grid, column / math.sqrt(self.grid.dx))

    def projector(self, label: CellLabel) -> DensityMatrix:
        return DensityMatrix.pure(self.vectors[:, self.index_of(label)])

    def save_csv(self, path: str | Path) -> Path:
        """Dump real and imaginary parts: one row per (cell, grid point)."""
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        centers = self.lattice.cell_centers()
        x = self.grid.x.tolist()
        with target.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["cell", "j", "k", "q", "p", "i", "x", "re", "im"])
            for col, (j, k) in enumerate(self.labels):
                q, p = centers[col]
                for i, value in enumerate(self.vectors[:, col].tolist()):
                    writer.writerow(
                        [col, j, k, repr(q), repr(p), i, repr(x[i]), repr(value.real),
                         repr(value.imag)]
                    )
        return target


@dataclass(frozen=True, eq=False)
class CoarseObservables:
    """Discretised position and momentum, diagonal in the cell basis."""

    basis: CellBasis
    Qc: ComplexArray  # noqa: N815
    Pc: ComplexArray  # noqa: N815

    def commutator(self) -> ComplexArray:
        return np.asarray(self.Qc @ self.Pc - self.Pc @ self.Qc)

    def commutator_norm(self) -> float:
        return float(np.linalg.norm(self.commutator(), ord="fro"))

    def embedded(self) -> tuple[ComplexArray, ComplexArray]:
        """Both operators written on the grid basis as V·diag·V†."""
        v = self.basis.vectors
        return v @ self.Qc @ v.conj().T, v @ self.Pc @ v.conj().T

    def spectra(self) -> tuple[RealArray, RealArray]:
        return np.real(np.diag(self.Qc)).copy(), np.real(np.diag(self.Pc)).copy()


@dataclass(frozen=True)
class CommutatorCheck:
    deviations: tuple[float, ...]
    flagged: tuple[int, ...]
    max_deviation: float


@dataclass(frozen=True, eq=False)
class PlanckCellMixture:
    """Cell populations of a state, with the weight outside the cell family."""

    labels: tuple[CellLabel, ...]
    weights: RealArray
    discarded: float
    ensemble: Ensemble
    warning: bool = False


def coherent_state(
    grid: Grid1D, q: float, p: float, sigma: float, hbar: float = 1.0
) -> ComplexArray:
    """Gaussian centred at (q, p) as a unit vector in C^n_points."""
    x = grid.x
    amps = np.exp(-((x - q) ** 2) / (4.0 * sigma**2) + 1j * p * (x - q) / hbar)
    return np.asarray(amps / np.linalg.norm(amps), dtype=np.complex128)


def _momentum_op(psi: ComplexArray, grid: Grid1D, hbar: float) -> ComplexArray:
    return np.asarray(np.fft.ifft(hbar * grid.k * np.fft.fft(psi)), dtype=np.complex128)


def _touches_boundary(psi: WaveFunction) -> bool:
    density = psi.probability_density()
    band = max(1, int(psi.grid.n_points * EDGE_FRACTION))
    edge = max(float(density[:band].max()), float(density[-band:].max()))
    return edge > EDGE_DENSITY_TOL * float(density.max())


def fine_commutator_check(
    grid: Grid1D, test_states: Sequence[WaveFunction], hbar: float = 1.0
) -> CommutatorCheck:
    """|⟨ψ|[Q, P]|ψ⟩ − iħ| with grid Q and spectral P for each test state.

    States with weight at the grid boundary are flagged and left out of the max.
    """
    x = grid.x
    deviations: list[float] = []
    flagged: list[int] = []
    for index, psi in enumerate(test_states):
        if psi.grid != grid:
            raise InvalidStateError(f"Test state {index} lives on a different grid")
        amps = np.asarray(psi.amplitudes)
        qp = x * _momentum_op(amps, grid, hbar)
        pq = _momentum_op(x * amps, grid, hbar)
        expectation = complex(np.vdot(amps, qp - pq) * grid.dx)
        deviations.append(abs(expectation - 1j * hbar))
        if _touches_boundary(psi):
            logger.warning("test state %d touches the grid boundary; excluded", index)
            flagged.append(index)
    kept = [d for i, d in enumerate(deviations) if i not in flagged]
    return CommutatorCheck(tuple(deviations), tuple(flagged), max(kept, default=0.0))


def build_cell_basis(lattice: PhaseSpaceLattice, grid: Grid1D, scale: float = 1.0) -> CellBasis:
    """Coherent-state seeds on the cell centres, Löwdin-orthonormalised."""
    if grid.dx * MIN_POINTS_PER_CELL > lattice.dQ:
        raise ConstructionError(
            f"Grid spacing {grid.dx:.4g} does not resolve dQ={lattice.dQ:.4g} "
            f"(need >= {MIN_POINTS_PER_CELL} points per cell)"
        )
    sigma = lattice.seed_width(scale)
    sigma_p = lattice.hbar / (2.0 * sigma)
    p_max = math.pi * lattice.hbar / grid.dx
    qs, ps = lattice.q_values(), lattice.p_values()
    if qs[0] - SUPPORT_MARGIN * sigma < grid.x_min or qs[-1] + SUPPORT_MARGIN * sigma > grid.x_max:
        raise ConstructionError(f"Cell window q in [{qs[0]:.4g}, {qs[-1]:.4g}] exceeds the grid")
    if max(abs(ps[0]), abs(ps[-1])) + SUPPORT_MARGIN * sigma_p > p_max:
        raise ConstructionError(f"Cell momenta up to {abs(ps).max():.4g} exceed grid cutoff")

    labels = lattice.labels()
    seeds = np.column_stack(
        [coherent_state(grid, float(qs[j]), float(ps[k]), sigma, lattice.hbar) for j, k in labels]
    )
    overlap = seeds.conj().T @ seeds
    evals, evecs = linalg.eigh(overlap)
    if evals[0] < GRAM_FLOOR:
        raise ConstructionError(
            f"Gram matrix of {len(labels)} cells is singular "
            f"(smallest eigenvalue {evals[0]:.3e}); request fewer cells"
        )
    inv_sqrt = (evecs * evals**-0.5) @ evecs.conj().T
    vectors = seeds @ inv_sqrt
    basis = CellBasis(lattice, grid, vectors, seeds, tuple(labels))
    deviation = basis.gram_deviation()
    if deviation > ORTHONORMALITY_TOL:
        raise ConstructionError(f"Orthonormalised basis deviates from identity by {deviation:.3e}")
    logger.debug("built %d-cell basis, Gram deviation %.2e", len(labels), deviation)
    return basis


def build_coarse_observables(basis: CellBasis) -> CoarseObservables:
    """Qc = Σ q_j |v⟩⟨v|, Pc = Σ p_k |v⟩⟨v| in the cell representation."""
    qs, ps = basis.lattice.q_values(), basis.lattice.p_values()
    q_diag = np.array([qs[j] for j, _ in basis.labels], dtype=np.complex128)
    p_diag = np.array([ps[k] for _, k in basis.labels], dtype=np.complex128)
    return CoarseObservables(basis, np.diag(q_diag), np.diag(p_diag))


def planck_cell_mixture(rho: DensityMatrix, basis: CellBasis) -> PlanckCellMixture:
    """Populations ⟨v|ρ|v⟩ over the cell family as a classical ensemble."""
    if rho.dim != basis.grid.n_points:
        raise InvalidStateError(
            f"State dimension {rho.dim} does not match grid of {basis.grid.n_points} points"
        )
    v = basis.vectors
    raw = np.real(np.einsum("ij,ik,kj->j", v.conj(), rho.entries, v))
    weights = np.clip(raw, 0.0, None)
    total = math.fsum(weights.tolist())
    discarded = max(0.0, 1.0 - total)
    keep = [i for i, w in enumerate(weights) if w > KEEP_FLOOR]
    if not keep:
        raise InvalidStateError("State has no population on the cell family")
    kept_total = math.fsum(float(weights[i]) for i in keep)
    ensemble = Ensemble.of((float(weights[i]) / kept_total, v[:, i]) for i in keep)
    warning = discarded > DISCARD_WARNING
    if warning:
        logger.warning("%.1f%% of the state lies outside the cell family", 100 * discarded)
    return PlanckCellMixture(basis.labels, weights, discarded, ensemble, warning)


__all__ = [
    "PhaseSpaceLattice",
    "CellBasis",
    "CoarseObservables",
    "CommutatorCheck",
    "PlanckCellMixture",
    "coherent_state",
    "fine_commutator_check",
    "build_cell_basis",
    "build_coarse_observables",
    "planck_cell_mixture",
]
