"""Regime-ledger simulator for free-particle quantum measurement accounting."""

from __future__ import annotations

from .config import RunConfig, load_config, resolve_config, save_config, validate
from .errors import (
    ConfigError,
    ConstructionError,
    ContractViolation,
    DomainError,
    HoloLedgerError,
    InvalidDistributionError,
    InvalidStateError,
    LedgerError,
)
from .euclidean import (
    BrownianPath,
    EuclideanParams,
    InfoReadout,
    MonteCarloSummary,
    PathSample,
    euclidean_action,
    heat_kernel,
    information,
    sample_path,
    sample_paths,
    total_information,
    wick_check,
)
from .holotn import (
    ClassicalizedHologram,
    CutScaling,
    MeraNetwork,
    SpinEvent,
    brute_force_cut,
    build_mera,
    classicalize,
    cut_scaling,
    discretized_area,
    minimal_cut,
    readout_spin_events,
    spin_event_budget,
)
from .lorentzian import (
    GaussianPacketSpec,
    LorentzianParams,
    entropy_drift,
    evolve,
    free_propagator,
    gaussian_packet,
    trajectory,
)
from .measurement import (
    DualSamplerConfig,
    MeasurementEvent,
    PhaseRecord,
    ProjectiveFamily,
    RegimeLedger,
    SystemSpec,
    UnitarySpan,
    attach_euclidean_duals,
    born_probabilities,
    nonselective,
    read_event,
    read_events,
    run_lorentzian_schedule,
)
from .qstate import (
    BIT_FACTOR,
    DensityMatrix,
    Ensemble,
    Grid1D,
    WaveFunction,
    ensemble_to_density,
    shannon_entropy,
    vn_entropy,
)
from .reports import Report
from .superselection import (
    CellBasis,
    CoarseObservables,
    PhaseSpaceLattice,
    PlanckCellMixture,
    build_cell_basis,
    build_coarse_observables,
    fine_commutator_check,
    planck_cell_mixture,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "HoloLedgerError",
    "InvalidStateError",
    "InvalidDistributionError",
    "DomainError",
    "ConstructionError",
    "LedgerError",
    "ConfigError",
    "ContractViolation",
    # states
    "BIT_FACTOR",
    "Grid1D",
    "WaveFunction",
    "DensityMatrix",
    "Ensemble",
    "vn_entropy",
    "shannon_entropy",
    "ensemble_to_density",
    # real time
    "LorentzianParams",
    "GaussianPacketSpec",
    "gaussian_packet",
    "free_propagator",
    "evolve",
    "trajectory",
    "entropy_drift",
    # imaginary time
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
    # superselection
    "PhaseSpaceLattice",
    "CellBasis",
    "CoarseObservables",
    "PlanckCellMixture",
    "fine_commutator_check",
    "build_cell_basis",
    "build_coarse_observables",
    "planck_cell_mixture",
    # measurement
    "ProjectiveFamily",
    "PhaseRecord",
    "RegimeLedger",
    "UnitarySpan",
    "MeasurementEvent",
    "SystemSpec",
    "DualSamplerConfig",
    "nonselective",
    "born_probabilities",
    "read_event",
    "read_events",
    "run_lorentzian_schedule",
    "attach_euclidean_duals",
    # network
    "MeraNetwork",
    "ClassicalizedHologram",
    "SpinEvent",
    "CutScaling",
    "build_mera",
    "discretized_area",
    "classicalize",
    "readout_spin_events",
    "spin_event_budget",
    "minimal_cut",
    "brute_force_cut",
    "cut_scaling",
    # runs
    "RunConfig",
    "load_config",
    "save_config",
    "resolve_config",
    "validate",
    "Report",
]
