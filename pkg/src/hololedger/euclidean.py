"""The Euclidean regime: heat kernel, Wick rotation and Wiener paths.

Continuing t → −iτ turns the free Schrödinger equation into the heat equation
with diffusion constant D = ħ/2m, so path increments over Δτ are Gaussian with
variance (ħ/m)Δτ. The off-shell action of a sampled path is read out as
information I = S_E/(ħ·ln 2) bits.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError, InvalidStateError
from .lorentzian import propagator_formula
from .qstate import BIT_FACTOR

logger = logging.getLogger(__name__)

RealArray = NDArray[np.float64]

DEFAULT_CHUNK_SIZE = 1000


@dataclass(frozen=True)
class EuclideanParams:
    m: float = 1.0
    hbar: float = 1.0
    x_start: float = 0.0

    def __post_init__(self) -> None:
        if not self.m > 0 or not self.hbar > 0:
            raise DomainError(f"m and hbar must be positive, got m={self.m}, hbar={self.hbar}")

    @property
    def diffusion(self) -> float:
        """D = ħ/2m."""
        return self.hbar / (2.0 * self.m)


@dataclass(frozen=True, eq=False)
class BrownianPath:
    """Positions x_0..x_n of an imaginary-time path sampled every tau_step."""

    tau_step: float
    positions: RealArray
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self) -> None:
        pos = np.array(self.positions, dtype=np.float64, copy=True)
        if pos.ndim != 1 or pos.size < 2:
            raise InvalidStateError(f"A path needs at least 2 positions, got shape {pos.shape}")
        if not self.tau_step > 0:
            raise InvalidStateError(f"tau_step must be positive, got {self.tau_step}")
        if not np.all(np.isfinite(pos)):
            raise InvalidStateError("Path contains NaN or Inf")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n_steps(self) -> int:
        return int(self.positions.size - 1)

    @property
    def taus(self) -> RealArray:
        return self.tau_step * np.arange(self.positions.size, dtype=np.float64)

    @property
    def duration(self) -> float:
        return self.tau_step * self.n_steps

    def save_csv(self, path: str | Path) -> Path:
        """Write columns step, tau, x."""
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "tau", "x"])
            for step, (tau, x) in enumerate(zip(self.taus.tolist(), self.positions.tolist())):
                writer.writerow([step, repr(tau), repr(x)])
        return target


@dataclass(frozen=True)
class InfoReadout:
    """Off-shell action and the information it carries, I = S_E/(ħb)."""

    S_E: float
    I: float  # noqa: E741
    hbar: float
    b: float = BIT_FACTOR


def heat_kernel(
    x: ArrayLike, x0: ArrayLike, tau: float, m: float = 1.0, hbar: float = 1.0
) -> RealArray:
    """√(m/2πħτ)·exp(−m(x−x0)²/2ħτ)."""
    if not tau > 0:
        raise DomainError(f"Heat kernel needs tau > 0, got {tau}")
    dx2 = (np.asarray(x, dtype=np.float64) - np.asarray(x0, dtype=np.float64)) ** 2
    norm = math.sqrt(m / (2.0 * math.pi * hbar * tau))
    return np.asarray(norm * np.exp(-m * dx2 / (2.0 * hbar * tau)), dtype=np.float64)


def wick_check(x: ArrayLike, x0: ArrayLike, tau: float, params: EuclideanParams) -> float:
    """Max |K(x, x0; t = −iτ) − K_E(x, x0; τ)| over the given points.

    With t = −iτ the prefactor argument m/(2πiħt) becomes the positive real
    m/(2πħτ), so the principal square root lands on the real heat kernel.
    """
    if not tau > 0:
        raise DomainError(f"Wick check needs tau > 0, got {tau}")
    continued = propagator_formula(x, x0, -1j * tau, params.m, params.hbar)
    euclid = heat_kernel(x, x0, tau, params.m, params.hbar)
    return float(np.max(np.abs(continued - euclid)))


def _increment_scale(tau_step: float, params: EuclideanParams) -> float:
    return math.sqrt(params.hbar / params.m * tau_step)


def sample_path(
    n_steps: int,
    tau_step: float,
    params: EuclideanParams,
    seed: int | np.random.SeedSequence,
) -> BrownianPath:
    """Wiener path with independent N(0, (ħ/m)Δτ) increments; deterministic per seed."""
    if n_steps < 1:
        raise DomainError(f"n_steps must be >= 1, got {n_steps}")
    if not tau_step > 0:
        raise DomainError(f"tau_step must be positive, got {tau_step}")
    rng = np.random.default_rng(seed)
    increments = rng.normal(0.0, _increment_scale(tau_step, params), size=n_steps)
    positions = params.x_start + np.concatenate(([0.0], np.cumsum(increments)))
    return BrownianPath(tau_step, positions, m=params.m, hbar=params.hbar)


def euclidean_action(path: BrownianPath) -> float:
    """Forward-difference kinetic action Σ (m/2)(Δx)²/Δτ."""
    steps = np.diff(path.positions)
    return float(0.5 * path.m * np.sum(steps**2) / path.tau_step)


def information(S_E: float, hbar: float = 1.0) -> InfoReadout:  # noqa: N803
    if S_E < 0:
        raise DomainError(f"Euclidean action must be non-negative, got {S_E}")
    if not hbar > 0:
        raise DomainError(f"hbar must be positive, got {hbar}")
    return InfoReadout(S_E=float(S_E), I=float(S_E) / (hbar * BIT_FACTOR), hbar=hbar)


def total_information(readouts: Iterable[InfoReadout]) -> float:
    """I_tot = Σ_n I_n; additivity of the action across free particles."""
    items = list(readouts)
    if not items:
        return 0.0
    hbars = {r.hbar for r in items}
    if len(hbars) > 1:
        raise DomainError(f"Readouts mix different hbar values: {sorted(hbars)}")
    return math.fsum(r.I for r in items)


@dataclass(frozen=True, eq=False)
class PathSample:
    """Per-path actions and endpoints of a Monte-Carlo batch."""

    n_steps: int
    tau_step: float
    actions: RealArray
    endpoints: RealArray
    hbar: float = 1.0

    @property
    def n_paths(self) -> int:
        return int(self.actions.size)

    def summary(self) -> MonteCarloSummary:
        mean_se = float(np.mean(self.actions))
        return MonteCarloSummary(
            n_paths=self.n_paths,
            n_steps=self.n_steps,
            mean_SE=mean_se,
            var_SE=float(np.var(self.actions)),
            mean_I=mean_se / (self.hbar * BIT_FACTOR),
        )


@dataclass(frozen=True)
class MonteCarloSummary:
    n_paths: int
    n_steps: int
    mean_SE: float  # noqa: N815
    var_SE: float  # noqa: N815
    mean_I: float  # noqa: N815

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def save_json(self, path: str | Path) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.json() + "\n", encoding="utf-8")
        return target


def _chunk_sizes(n_paths: int, chunk_size: int) -> list[int]:
    full, rest = divmod(n_paths, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _run_chunks(
    sizes: Sequence[int],
    seed: int,
    work: Callable[[int, np.random.Generator], tuple[RealArray, RealArray]],
    workers: int,
) -> list[tuple[RealArray, RealArray]]:
    # One child seed per chunk, so results do not depend on the worker count.
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(size, np.random.default_rng(child)) for size, child in zip(sizes, children)]
    if workers <= 1:
        return [work(size, rng) for size, rng in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: work(*job), jobs))


def sample_paths(
    n_paths: int,
    n_steps: int,
    tau_step: float,
    params: EuclideanParams,
    seed: int,
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> PathSample:
    """Sample many independent paths and keep only their actions and endpoints."""
    if n_paths < 1:
        raise DomainError(f"n_paths must be >= 1, got {n_paths}")
    if n_steps < 1:
        raise DomainError(f"n_steps must be >= 1, got {n_steps}")
    if not tau_step > 0:
        raise DomainError(f"tau_step must be positive, got {tau_step}")
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be >= 1, got {chunk_size}")
    scale = _increment_scale(tau_step, params)
    coupling = 0.5 * params.m / tau_step

    def work(size: int, rng: np.random.Generator) -> tuple[RealArray, RealArray]:
        increments = rng.normal(0.0, scale, size=(size, n_steps))
        actions = coupling * np.einsum("ij,ij->i", increments, increments)
        endpoints = params.x_start + increments.sum(axis=1)
        return actions, endpoints

    chunks = _run_chunks(_chunk_sizes(n_paths, chunk_size), seed, work, workers)
    logger.info("sampled %d paths x %d steps in %d chunks", n_paths, n_steps, len(chunks))
    return PathSample(
        n_steps=n_steps,
        tau_step=tau_step,
        actions=np.concatenate([a for a, _ in chunks]),
        endpoints=np.concatenate([e for _, e in chunks]),
        hbar=params.hbar,
    )


__all__ = [
    "EuclideanParams",
    "BrownianPath",
    "InfoReadout",
    "PathSample",
    "MonteCarloSummary",
    "heat_kernel",
    "wick_check",
    "sample_path",
    "sample_paths",
    "euclidean_action",
    "information",
    "total_information",
]
