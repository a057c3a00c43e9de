"""Two-step projective measurement and the regime ledger.

Step one (non-selective) decoheres ρ into Σ PρP; step two reads one event
out of that mixture. A schedule of unitary spans and measurement windows is
run into a `RegimeLedger` of Lorentzian records; `attach_euclidean_duals`
then annotates every entropy-free record outside the windows with an
imaginary-time dual carrying S_vN = A_TN and I = S_E/(ħb).
"""

from __future__ import annotations

import html
import json
import logging
import re
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from .errors import DomainError, InvalidStateError, LedgerError
from .euclidean import EuclideanParams, euclidean_action, information, sample_path
from .qstate import DensityMatrix, probabilities_from, shannon_entropy, vn_entropy

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]
Label = int | str
SeedLike = int | np.random.SeedSequence | np.random.Generator

PROJECTOR_TOL = 1e-12
COMMUTATION_TOL = 1e-10
ENTROPY_ZERO_TOL = 1e-9
LEDGER_SCHEMA_VERSION = 1


class Regime(str, Enum):
    LORENTZIAN = "Lorentzian"
    EUCLIDEAN = "Euclidean"


class RecordKind(str, Enum):
    UNITARY = "unitary"
    POST_NONSELECTIVE = "post-nonselective"
    POST_READ = "post-read"
    EUCLIDEAN_DUAL = "euclidean-dual"

    @property
    def symbol(self) -> str:
        return _KIND_SYMBOLS[self]


_KIND_SYMBOLS = {
    RecordKind.UNITARY: "U",
    RecordKind.POST_NONSELECTIVE: "N",
    RecordKind.POST_READ: "R",
    RecordKind.EUCLIDEAN_DUAL: "D",
}
_LORENTZIAN_GRAMMAR = re.compile(r"U(NR)*")


@dataclass(frozen=True, eq=False)
class ProjectiveFamily:
    """Orthogonal Hermitian projectors with outcome labels.

    Completeness (ΣP = I) is not required here; `nonselective` and
    `read_event` reject incomplete families.
    """

    projectors: tuple[ComplexArray, ...]
    labels: tuple[Label, ...]

    def __post_init__(self) -> None:
        if not self.projectors:
            raise InvalidStateError("Projective family needs at least one projector")
        if len(self.labels) != len(self.projectors):
            raise InvalidStateError(
                f"{len(self.labels)} labels for {len(self.projectors)} projectors"
            )
        if len(set(self.labels)) != len(self.labels):
            raise InvalidStateError(f"Outcome labels must be unique, got {self.labels}")
        frozen = []
        for label, proj in zip(self.labels, self.projectors):
            p = np.array(proj, dtype=np.complex128, copy=True)
            if p.ndim != 2 or p.shape[0] != p.shape[1]:
                raise InvalidStateError(f"Projector {label!r} is not square: {p.shape}")
            if np.max(np.abs(p - p.conj().T)) > PROJECTOR_TOL:
                raise InvalidStateError(f"Projector {label!r} is not Hermitian")
            if np.max(np.abs(p @ p - p)) > PROJECTOR_TOL:
                raise InvalidStateError(f"Projector {label!r} is not idempotent")
            p.setflags(write=False)
            frozen.append(p)
        dims = {p.shape[0] for p in frozen}
        if len(dims) != 1:
            raise InvalidStateError(f"Projectors have mismatched dimensions {sorted(dims)}")
        for i, a in enumerate(frozen):
            for j in range(i + 1, len(frozen)):
                if np.max(np.abs(a @ frozen[j])) > PROJECTOR_TOL:
                    raise InvalidStateError(
                        f"Projectors {self.labels[i]!r} and {self.labels[j]!r} are not orthogonal"
                    )
        object.__setattr__(self, "projectors", tuple(frozen))

    @classmethod
    def from_basis(
        cls, basis: ArrayLike, labels: Sequence[Label] | None = None
    ) -> ProjectiveFamily:
        """Rank-1 projectors onto the columns of a unitary matrix."""
        u = np.asarray(basis, dtype=np.complex128)
        cols = [u[:, i] for i in range(u.shape[1])]
        names = tuple(labels) if labels is not None else tuple(range(len(cols)))
        return cls(tuple(np.outer(c, c.conj()) for c in cols), names)

    @classmethod
    def computational(cls, dim: int) -> ProjectiveFamily:
        return cls.from_basis(np.eye(dim))

    @classmethod
    def from_blocks(
        cls, dim: int, blocks: Sequence[Sequence[int]], labels: Sequence[Label] | None = None
    ) -> ProjectiveFamily:
        """Diagonal projectors onto groups of computational basis states."""
        projectors = []
        for block in blocks:
            diag = np.zeros(dim, dtype=np.complex128)
            diag[list(block)] = 1.0
            projectors.append(np.diag(diag))
        names = tuple(labels) if labels is not None else tuple(range(len(projectors)))
        return cls(tuple(projectors), names)

    @property
    def dim(self) -> int:
        return int(self.projectors[0].shape[0])

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(int(round(float(np.trace(p).real))) for p in self.projectors)

    @property
    def is_rank_one(self) -> bool:
        return all(r == 1 for r in self.ranks)

    def completeness_error(self) -> float:
        total = np.sum(self.projectors, axis=0)
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def is_complete(self) -> bool:
        return self.completeness_error() <= PROJECTOR_TOL

    def __len__(self) -> int:
        return len(self.projectors)


def _require_usable(rho: DensityMatrix, family: ProjectiveFamily) -> None:
    if rho.dim != family.dim:
        raise InvalidStateError(f"State dimension {rho.dim} does not match family {family.dim}")
    if not family.is_complete():
        raise InvalidStateError(
            f"Projectors do not sum to the identity (error {family.completeness_error():.3e})"
        )


def nonselective(rho: DensityMatrix, family: ProjectiveFamily) -> DensityMatrix:
    """ρ' = Σ P ρ P: the decohered mixture of all outcomes."""
    _require_usable(rho, family)
    out = np.zeros_like(rho.entries)
    for p in family.projectors:
        out += p @ rho.entries @ p
    return DensityMatrix.from_matrix(out)


def born_probabilities(rho: DensityMatrix, family: ProjectiveFamily) -> RealArray:
    _require_usable(rho, family)
    raw = [float(np.real(np.trace(p @ rho.entries))) for p in family.projectors]
    return probabilities_from(raw)


@dataclass(frozen=True, eq=False)
class ReadResult:
    outcome: Label
    index: int
    state: DensityMatrix
    info_gain: float
    probabilities: RealArray
    rank: int = 1

    @property
    def partial(self) -> bool:
        """Read through a degenerate projector; the outcome leaves a subspace."""
        return self.rank > 1


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _require_commuting(rho: DensityMatrix, family: ProjectiveFamily) -> None:
    for label, p in zip(family.labels, family.projectors):
        gap = float(np.max(np.abs(p @ rho.entries - rho.entries @ p)))
        if gap > COMMUTATION_TOL:
            raise InvalidStateError(
                f"State does not commute with projector {label!r} (gap {gap:.3e}); "
                "apply nonselective first"
            )


def read_event(rho_mixed: DensityMatrix, family: ProjectiveFamily, seed: SeedLike) -> ReadResult:
    """Read one outcome from a decohered mixture.

    The gain is the Shannon entropy of the Born distribution, the expected
    information acquired by the reading system.
    """
    _require_usable(rho_mixed, family)
    _require_commuting(rho_mixed, family)
    probs = born_probabilities(rho_mixed, family)
    index = int(_rng(seed).choice(len(family), p=probs))
    p = family.projectors[index]
    collapsed = p @ rho_mixed.entries @ p / probs[index]
    return ReadResult(
        outcome=family.labels[index],
        index=index,
        state=DensityMatrix.from_matrix(collapsed),
        info_gain=shannon_entropy(probs),
        probabilities=probs,
        rank=family.ranks[index],
    )


def read_events(
    rho_mixed: DensityMatrix, family: ProjectiveFamily, n_reads: int, seed: SeedLike
) -> NDArray[np.int64]:
    """Outcome indices of n_reads independent reads of identical copies."""
    if n_reads < 0:
        raise DomainError(f"n_reads must be >= 0, got {n_reads}")
    _require_usable(rho_mixed, family)
    _require_commuting(rho_mixed, family)
    probs = born_probabilities(rho_mixed, family)
    return np.asarray(_rng(seed).choice(len(family), size=n_reads, p=probs), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class UnitarySpan:
    start: float
    end: float
    hamiltonian: ComplexArray | None = None

    def __post_init__(self) -> None:
        if self.end < self.start:
            raise LedgerError(f"Unitary span ends before it starts: ({self.start}, {self.end})")


@dataclass(frozen=True, eq=False)
class MeasurementEvent:
    """Measurement window t_i ≤ t ≤ t_f with its projective family."""

    start: float
    end: float
    family: ProjectiveFamily

    def __post_init__(self) -> None:
        if self.end < self.start:
            raise LedgerError(f"Measurement window is reversed: ({self.start}, {self.end})")


Segment = UnitarySpan | MeasurementEvent


@dataclass(frozen=True, eq=False)
class SystemSpec:
    initial: DensityMatrix
    seed: int
    hbar: float = 1.0
    t0: float = 0.0

    def __post_init__(self) -> None:
        if not self.hbar > 0:
            raise DomainError(f"hbar must be positive, got {self.hbar}")
        if vn_entropy(self.initial) > ENTROPY_ZERO_TOL:
            raise InvalidStateError("The measured system must start in a pure state")


@dataclass(frozen=True)
class DualSamplerConfig:
    """How dual imaginary-time paths are sampled.

    A record of zero real-time duration gets a dual of `default_steps` steps.
    """

    tau_step: float = 1e-3
    default_steps: int = 1000
    seed: int = 0
    params: EuclideanParams = field(default_factory=EuclideanParams)

    def __post_init__(self) -> None:
        if not self.tau_step > 0:
            raise DomainError(f"tau_step must be positive, got {self.tau_step}")
        if self.default_steps < 1:
            raise DomainError(f"default_steps must be >= 1, got {self.default_steps}")

    def steps_for(self, duration: float) -> int:
        if duration <= 0:
            return self.default_steps
        return max(1, int(round(duration / self.tau_step)))


@dataclass(frozen=True)
class PhaseRecord:
    regime: Regime
    kind: RecordKind
    S_vN: float  # noqa: N815
    I: float  # noqa: E741
    span: tuple[float, float]
    partial: bool = False
    dual_of: int | None = None
    outcome: Label | None = None

    def __post_init__(self) -> None:
        if self.S_vN < 0 or self.I < 0:
            raise LedgerError(f"{self.kind.value} record has negative S_vN or I")
        if self.kind is RecordKind.EUCLIDEAN_DUAL:
            if self.regime is not Regime.EUCLIDEAN:
                raise LedgerError("Dual records live in the Euclidean regime")
            if not (self.S_vN > 0 and self.I > 0):
                raise LedgerError("Dual records need S_vN = A_TN > 0 and I > 0")
            if self.dual_of is None:
                raise LedgerError("Dual record does not name its source record")
            return
        if self.regime is not Regime.LORENTZIAN:
            raise LedgerError(f"{self.kind.value} records live in the Lorentzian regime")
        if self.kind is RecordKind.POST_NONSELECTIVE or self.partial:
            return
        if self.S_vN != 0.0 or self.I != 0.0:
            raise LedgerError(
                f"{self.kind.value} record must carry S_vN = 0 and I = 0, "
                f"got ({self.S_vN}, {self.I})"
            )

    @property
    def in_window(self) -> bool:
        return self.kind is RecordKind.POST_NONSELECTIVE

    @property
    def dual_eligible(self) -> bool:
        return (
            self.regime is Regime.LORENTZIAN
            and not self.in_window
            and not self.partial
            and self.S_vN == 0.0
        )

    @property
    def duration(self) -> float:
        return self.span[1] - self.span[0]

    def to_dict(self) -> dict[str, Any]:
        return {
            "regime": self.regime.value,
            "kind": self.kind.value,
            "S_vN_bits": self.S_vN,
            "I_bits": self.I,
            "span": list(self.span),
            "partial": self.partial,
            "dual_of": self.dual_of,
            "outcome": self.outcome,
        }


@dataclass(frozen=True)
class ReadArchive:
    """Information acquired by the reading system at one measurement."""

    time: float
    outcome: Label
    info_bits: float
    partial: bool = False


@dataclass(frozen=True, eq=False)
class RegimeLedger:
    records: tuple[PhaseRecord, ...]
    archive: tuple[ReadArchive, ...] = ()
    final_state: DensityMatrix | None = None

    def __post_init__(self) -> None:
        pattern = self.lorentzian_pattern()
        if not _LORENTZIAN_GRAMMAR.fullmatch(pattern):
            raise LedgerError(f"Lorentzian records break the U(NR)* pattern: {pattern!r}")
        seen: set[int] = set()
        for record in self.duals():
            source = record.dual_of
            assert source is not None
            if not 0 <= source < len(self.records) or not self.records[source].dual_eligible:
                raise LedgerError(f"Dual points at record {source}, which cannot carry a dual")
            if source in seen:
                raise LedgerError(f"Record {source} has more than one dual")
            seen.add(source)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[PhaseRecord]:
        return iter(self.records)

    def __getitem__(self, index: int) -> PhaseRecord:
        return self.records[index]

    def lorentzian(self) -> list[PhaseRecord]:
        return [r for r in self.records if r.regime is Regime.LORENTZIAN]

    def duals(self) -> list[PhaseRecord]:
        return [r for r in self.records if r.kind is RecordKind.EUCLIDEAN_DUAL]

    def lorentzian_pattern(self) -> str:
        return "".join(r.kind.symbol for r in self.lorentzian())

    def eligible_indices(self) -> list[int]:
        return [i for i, r in enumerate(self.records) if r.dual_eligible]

    def windows(self) -> list[tuple[float, float]]:
        return [r.span for r in self.records if r.in_window]

    @property
    def total_information(self) -> float:
        return sum(entry.info_bits for entry in self.archive)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": LEDGER_SCHEMA_VERSION,
            "records": [r.to_dict() for r in self.records],
            "archive": [
                {
                    "time": a.time,
                    "outcome": a.outcome,
                    "info_bits": a.info_bits,
                    "partial": a.partial,
                }
                for a in self.archive
            ],
        }

    def json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def save_json(self, path: str | Path) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(self.json() + "\n", encoding="utf-8")
        return target

    def _repr_html_(self) -> str:
        headers = ["#", "regime", "kind", "S_vN", "I", "span", "dual_of"]
        rows = []
        for i, r in enumerate(self.records):
            cells = [
                str(i),
                r.regime.value,
                r.kind.value + (" (partial)" if r.partial else ""),
                f"{r.S_vN:.6g}",
                f"{r.I:.6g}",
                f"[{r.span[0]:g}, {r.span[1]:g}]",
                "" if r.dual_of is None else str(r.dual_of),
            ]
            rows.append("<tr>" + "".join(f"<td>{html.escape(c)}</td>" for c in cells) + "</tr>")
        header_html = "<tr>" + "".join(f"<th>{h}</th>" for h in headers) + "</tr>"
        return f"<table><thead>{header_html}</thead><tbody>{''.join(rows)}</tbody></table>"


def _entropy(rho: DensityMatrix) -> float:
    value = vn_entropy(rho)
    return 0.0 if value <= ENTROPY_ZERO_TOL else value


def _apply_unitary(rho: DensityMatrix, span: UnitarySpan, hbar: float) -> DensityMatrix:
    if span.hamiltonian is None or span.end == span.start:
        return rho
    h = np.asarray(span.hamiltonian, dtype=np.complex128)
    if h.shape != (rho.dim, rho.dim):
        raise InvalidStateError(f"Hamiltonian shape {h.shape} does not match state dim {rho.dim}")
    if np.max(np.abs(h - h.conj().T)) > PROJECTOR_TOL:
        raise InvalidStateError("Hamiltonian is not Hermitian")
    u = linalg.expm(-1j * h * (span.end - span.start) / hbar)
    return rho.conjugate_by(u)


def _check_order(segments: Sequence[Segment], t0: float) -> None:
    cursor = t0
    for i, seg in enumerate(segments):
        if seg.start < cursor:
            raise LedgerError(
                f"Segment {i} starts at {seg.start} before the previous one ends at {cursor}"
            )
        cursor = seg.end


def run_lorentzian_schedule(segments: Sequence[Segment], system: SystemSpec) -> RegimeLedger:
    """Run unitary spans and measurement windows in order into Lorentzian records.

    Each measurement contributes a post-nonselective record over its window
    and a post-read record that stays open until the next window. Gaps
    between segments are free (identity) evolution.
    """
    _check_order(segments, system.t0)
    n_reads = sum(isinstance(s, MeasurementEvent) for s in segments)
    read_seeds = iter(np.random.SeedSequence(system.seed).spawn(n_reads))
    rho = system.initial
    records: list[PhaseRecord] = []
    archive: list[ReadArchive] = []
    # The open record absorbs unitary time until the next window.
    open_kind, open_start, open_partial = RecordKind.UNITARY, system.t0, False
    open_outcome: Label | None = None
    cursor = system.t0

    def close(end: float) -> None:
        records.append(
            PhaseRecord(
                Regime.LORENTZIAN,
                open_kind,
                _entropy(rho) if open_partial else 0.0,
                0.0,
                (open_start, end),
                partial=open_partial,
                outcome=open_outcome,
            )
        )

    for seg in segments:
        if isinstance(seg, UnitarySpan):
            rho = _apply_unitary(rho, seg, system.hbar)
            cursor = seg.end
            continue
        close(seg.start)
        mixed = nonselective(rho, seg.family)
        result = read_event(mixed, seg.family, next(read_seeds))
        records.append(
            PhaseRecord(
                Regime.LORENTZIAN,
                RecordKind.POST_NONSELECTIVE,
                _entropy(mixed),
                result.info_gain,
                (seg.start, seg.end),
            )
        )
        partial = result.partial
        if partial:
            logger.warning("read at t=%g used a degenerate projector (partial read)", seg.end)
        archive.append(ReadArchive(seg.end, result.outcome, result.info_gain, partial))
        rho = result.state
        open_kind, open_start, open_partial = RecordKind.POST_READ, seg.end, partial
        open_outcome = result.outcome
        cursor = seg.end
    close(cursor)
    logger.info("schedule produced %d Lorentzian records, %d reads", len(records), len(archive))
    return RegimeLedger(tuple(records), tuple(archive), rho)


def attach_euclidean_duals(
    ledger: RegimeLedger, a_tn: float, sampler: DualSamplerConfig
) -> RegimeLedger:
    """Give every entropy-free record outside a measurement window one dual.

    Each dual samples a Brownian path over the record's duration in imaginary
    time and carries S_vN = A_TN together with I = S_E/(ħb).
    """
    if not a_tn > 0:
        raise DomainError(f"A_TN must be positive, got {a_tn}")
    if ledger.duals():
        raise LedgerError("Ledger already carries Euclidean duals")
    sources = ledger.eligible_indices()
    seeds = iter(np.random.SeedSequence(sampler.seed).spawn(len(sources)))
    hbar = sampler.params.hbar
    out: list[PhaseRecord] = []
    for record in ledger.records:
        out.append(record)
        if not record.dual_eligible:
            continue
        source = len(out) - 1
        n_steps = sampler.steps_for(record.duration)
        path = sample_path(n_steps, sampler.tau_step, sampler.params, next(seeds))
        readout = information(euclidean_action(path), hbar)
        out.append(
            PhaseRecord(
                Regime.EUCLIDEAN,
                RecordKind.EUCLIDEAN_DUAL,
                float(a_tn),
                readout.I,
                (0.0, path.duration),
                dual_of=source,
            )
        )
    logger.info("attached %d Euclidean duals (A_TN=%g)", len(sources), a_tn)
    return replace(ledger, records=tuple(out))


__all__ = [
    "Regime",
    "RecordKind",
    "ProjectiveFamily",
    "ReadResult",
    "UnitarySpan",
    "MeasurementEvent",
    "SystemSpec",
    "DualSamplerConfig",
    "PhaseRecord",
    "ReadArchive",
    "RegimeLedger",
    "nonselective",
    "born_probabilities",
    "read_event",
    "read_events",
    "run_lorentzian_schedule",
    "attach_euclidean_duals",
]
