"""Command-line entry point: `hololedger <experiment> [options]`.

Each experiment writes report.json, metadata.json and its CSV/SVG artifacts
into the output directory. Exit codes: 0 success, 2 bad configuration or
input, 3 a numerical contract was violated (the report is still written).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np
from scipy import integrate, stats

from .config import RunConfig, parse_schedule, resolve_config, validate
from .errors import ConfigError, ContractViolation, HoloLedgerError
from .euclidean import (
    EuclideanParams,
    euclidean_action,
    heat_kernel,
    information,
    sample_path,
    sample_paths,
    total_information,
    wick_check,
)
from .holotn import (
    build_mera,
    classicalize,
    cut_scaling,
    readout_spin_events,
    save_events_csv,
    spin_event_budget,
)
from .lorentzian import (
    GaussianPacketSpec,
    LorentzianParams,
    entropy_drift,
    evolve,
    gaussian_packet,
    kinetic_energy,
    packet_width,
    position_mean,
    position_variance,
)
from .measurement import (
    DualSamplerConfig,
    MeasurementEvent,
    ProjectiveFamily,
    Segment,
    SystemSpec,
    UnitarySpan,
    attach_euclidean_duals,
    run_lorentzian_schedule,
)
from .qstate import DensityMatrix, Grid1D, basis_state
from .reports import Report

logger = logging.getLogger(__name__)

NORM_BOUND = 1e-10
ENTROPY_BOUND = 1e-9
WIDTH_BOUND = 1e-6
WICK_BOUND = 1e-12
NORMALIZATION_BOUND = 1e-9
ADDITIVITY_BOUND = 1e-12
ACTION_MEAN_TOLERANCE = 0.01
MIN_CUT_R_SQUARED = 0.99
QUADRATURE_HALF_WIDTH = 12.0
QUADRATURE_POINTS = 4001

Command = Callable[[RunConfig, bool], Report]


def _report_config(config: RunConfig) -> dict[str, object]:
    data = config.to_dict()
    data.pop("out_dir", None)
    return data


def _finish(report: Report, config: RunConfig, failures: Sequence[str]) -> Report:
    path = report.save(config.out_dir)
    logger.info("wrote %s", path)
    if failures:
        raise ContractViolation("; ".join(failures))
    return report


def cmd_evolve(config: RunConfig, svg: bool = True) -> Report:
    """Free packet evolution: unitarity, zero entropy and the width law."""
    from .plotting import plot_snapshots

    grid = Grid1D(config.x_min, config.x_max, config.n_points)
    params = LorentzianParams(m=config.m, hbar=config.hbar, dt=config.dt)
    spec = GaussianPacketSpec(x0=config.x0, sigma0=config.sigma0, p0=config.p0)
    psi0 = gaussian_packet(grid, spec, config.hbar)
    steps = [round(i * config.n_steps / config.n_snapshots) for i in range(config.n_snapshots + 1)]
    states = [evolve(psi0, n, params) for n in steps]
    final = states[-1]
    t = config.n_steps * config.dt

    expected_width = packet_width(spec, t, params)
    width_error = abs(position_variance(final) / expected_width**2 - 1.0)
    results = {
        "t_final": t,
        "norm_drift": max(abs(psi.norm() - 1.0) for psi in states),
        "entropy_drift": entropy_drift(states),
        "width_fit_error": width_error,
        "width": math.sqrt(position_variance(final)),
        "expected_width": expected_width,
        "mean_position": position_mean(final),
        "expected_mean_position": config.x0 + config.p0 * t / config.m,
        "energy_drift": abs(kinetic_energy(final, params) / kinetic_energy(psi0, params) - 1.0),
    }
    report = Report("evolve", results, _report_config(config), config.seed)
    if svg:
        target = Path(config.out_dir) / "snapshots.svg"
        plot_snapshots(states, [n * config.dt for n in steps], target)
        report.artifacts.append(target.name)

    failures: list[str] = []
    if results["norm_drift"] >= NORM_BOUND:
        failures.append(f"norm drift {results['norm_drift']:.3e} >= {NORM_BOUND}")
    if results["entropy_drift"] >= ENTROPY_BOUND:
        failures.append(f"entropy drift {results['entropy_drift']:.3e} >= {ENTROPY_BOUND}")
    if width_error >= WIDTH_BOUND:
        failures.append(f"width error {width_error:.3e} >= {WIDTH_BOUND}")
    return _finish(report, config, failures)


def cmd_wick(config: RunConfig, svg: bool = True) -> Report:
    """Continued kernel against heat kernel over an (x, τ) sweep."""
    params = EuclideanParams(m=config.m, hbar=config.hbar)
    xs = np.linspace(config.wick_x_min, config.wick_x_max, config.wick_points)
    per_tau: list[dict[str, float]] = []
    for tau in config.tau_values:
        scale = math.sqrt(config.hbar * tau / config.m)
        quad_x = np.linspace(-QUADRATURE_HALF_WIDTH * scale, QUADRATURE_HALF_WIDTH * scale,
                             QUADRATURE_POINTS)
        mass = float(integrate.trapezoid(heat_kernel(quad_x, 0.0, tau, params.m, params.hbar),
                                         quad_x))
        per_tau.append(
            {
                "tau": tau,
                "discrepancy": wick_check(xs, 0.0, tau, params),
                "normalization_error": abs(mass - 1.0),
                "kernel_at_origin": float(heat_kernel(0.0, 0.0, tau, params.m, params.hbar)),
            }
        )
    max_discrepancy = max(row["discrepancy"] for row in per_tau)
    max_normalization = max(row["normalization_error"] for row in per_tau)
    results = {
        "n_points": int(xs.size),
        "n_tau": len(per_tau),
        "max_discrepancy": max_discrepancy,
        "max_normalization_error": max_normalization,
        "sweep": per_tau,
    }
    report = Report("wick", results, _report_config(config), config.seed)
    failures: list[str] = []
    if max_discrepancy >= WICK_BOUND:
        failures.append(f"Wick discrepancy {max_discrepancy:.3e} >= {WICK_BOUND}")
    if max_normalization >= NORMALIZATION_BOUND:
        failures.append(f"heat kernel normalization off by {max_normalization:.3e}")
    return _finish(report, config, failures)


def cmd_paths(config: RunConfig, svg: bool = True) -> Report:
    """Monte-Carlo action statistics plus the multi-particle information sum."""
    from .plotting import plot_endpoint_histogram

    assert config.seed is not None
    params = EuclideanParams(m=config.m, hbar=config.hbar)
    batch_seed, particle_seed = np.random.SeedSequence(config.seed).spawn(2)
    sample = sample_paths(
        config.n_paths,
        config.path_steps,
        config.tau_step,
        params,
        int(batch_seed.generate_state(1)[0]),
        chunk_size=config.chunk_size,
        workers=config.workers,
    )
    summary = sample.summary()
    out = Path(config.out_dir)

    paths = [
        sample_path(config.path_steps, config.tau_step, params, child)
        for child in particle_seed.spawn(config.n_particles)
    ]
    readouts = [information(euclidean_action(p), config.hbar) for p in paths]
    i_tot = total_information(readouts)
    from_total = information(math.fsum(r.S_E for r in readouts), config.hbar).I
    additivity_error = abs(i_tot - from_total) / from_total if from_total else 0.0

    expected_mean = config.path_steps * config.hbar / 2.0
    mean_error = abs(summary.mean_SE - expected_mean) / expected_mean
    duration = config.path_steps * config.tau_step
    ks = stats.kstest(
        sample.endpoints,
        stats.norm(loc=params.x_start, scale=math.sqrt(config.hbar * duration / config.m)).cdf,
    )
    results = {
        **summary.to_dict(),
        "expected_mean_SE": expected_mean,
        "mean_SE_error": mean_error,
        "endpoint_ks_pvalue": float(ks.pvalue),
        "particles": [{"S_E": r.S_E, "I": r.I} for r in readouts],
        "I_tot": i_tot,
        "I_tot_from_total_action": from_total,
        "additivity_error": additivity_error,
    }
    report = Report("paths", results, _report_config(config), config.seed)
    report.artifacts.append(summary.save_json(out / "paths_summary.json").name)
    report.artifacts.append(paths[0].save_csv(out / "path.csv").name)
    if svg:
        target = plot_endpoint_histogram(
            sample.endpoints, duration, params, out / "endpoints.svg", bins=config.histogram_bins
        )
        report.artifacts.append(target.name)
    failures: list[str] = []
    if mean_error > ACTION_MEAN_TOLERANCE:
        failures.append(f"mean action off by {mean_error:.2%} of n_steps·ħ/2")
    if additivity_error > ADDITIVITY_BOUND:
        failures.append(f"information additivity error {additivity_error:.3e}")
    return _finish(report, config, failures)


_LEDGER_STATES = {
    "zero": basis_state(2, 0),
    "one": basis_state(2, 1),
    "plus": np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2.0),
}


def cmd_ledger(config: RunConfig, svg: bool = True) -> Report:
    """Run a measurement schedule on a qubit and attach Euclidean duals."""
    from .plotting import plot_ledger_timeline

    assert config.seed is not None
    schedule_seed, dual_seed = (
        int(s) for s in np.random.SeedSequence(config.seed).generate_state(2)
    )
    family = ProjectiveFamily.computational(2)
    segments: list[Segment] = []
    for kind, start, end in parse_schedule(config.schedule):
        if kind == "U":
            segments.append(UnitarySpan(start, end))
        else:
            segments.append(MeasurementEvent(start, end, family))
    system = SystemSpec(
        DensityMatrix.pure(_LEDGER_STATES[config.ledger_state]), schedule_seed, config.hbar
    )
    ledger = run_lorentzian_schedule(segments, system)
    eligible = len(ledger.eligible_indices())

    hologram = classicalize(build_mera(config.n_leaves))
    sampler = DualSamplerConfig(
        tau_step=config.tau_step,
        default_steps=config.path_steps,
        seed=dual_seed,
        params=EuclideanParams(m=config.m, hbar=config.hbar),
    )
    ledger = attach_euclidean_duals(ledger, hologram.A_TN, sampler)
    duals = ledger.duals()
    budgets = [spin_event_budget(d.I) for d in duals]

    out = Path(config.out_dir)
    results = {
        "A_TN": hologram.A_TN,
        "pattern": ledger.lorentzian_pattern(),
        "n_lorentzian": len(ledger.lorentzian()),
        "n_duals": len(duals),
        "acquired_information_bits": ledger.total_information,
        "spin_events": [{"events": n, "remainder": r} for n, r in budgets],
        "ledger": ledger.to_dict(),
    }
    report = Report("ledger", results, _report_config(config), config.seed)
    report.artifacts.append(ledger.save_json(out / "ledger.json").name)
    if svg:
        report.artifacts.append(plot_ledger_timeline(ledger, out / "timeline.svg").name)
    failures: list[str] = []
    if len(duals) != eligible:
        failures.append(f"{len(duals)} duals for {eligible} eligible records")
    if any(d.S_vN != hologram.A_TN or not d.I > 0 for d in duals):
        failures.append("a dual record does not carry S_vN = A_TN and I > 0")
    return _finish(report, config, failures)


def cmd_mera(config: RunConfig, svg: bool = True) -> Report:
    """Entropy-equals-area, interval min-cuts and a spin-event readout."""
    from .plotting import plot_cut_scaling

    assert config.seed is not None
    network = build_mera(config.n_leaves)
    hologram = classicalize(network)
    scaling = cut_scaling(network, config.interval_lengths)
    events = readout_spin_events(hologram, config.n_events, config.seed)
    ups = sum(e.up for e in events)

    out = Path(config.out_dir)
    entropy = hologram.entropy_bits()
    results = {
        "A_TN": hologram.A_TN,
        "entropy_bits": entropy,
        "n_bonds": network.n_bonds,
        "n_layers": network.n_layers,
        **scaling.to_dict(),
        "n_events": len(events),
        "up_fraction": ups / len(events) if events else 0.0,
    }
    report = Report("mera", results, _report_config(config), config.seed)
    report.artifacts.append(network.save_json(out / "network.json").name)
    report.artifacts.append(save_events_csv(events, out / "events.csv").name)
    if svg:
        report.artifacts.append(plot_cut_scaling(scaling, out / "cut_scaling.svg").name)
    failures: list[str] = []
    if entropy != hologram.A_TN:
        failures.append(f"entropy {entropy} != A_TN {hologram.A_TN}")
    if scaling.r_squared <= MIN_CUT_R_SQUARED:
        failures.append(f"min-cut vs log2 length fit has R² {scaling.r_squared:.4f}")
    return _finish(report, config, failures)


COMMANDS: dict[str, Command] = {
    "evolve": cmd_evolve,
    "wick": cmd_wick,
    "paths": cmd_paths,
    "ledger": cmd_ledger,
    "mera": cmd_mera,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON or key=value config file")
    common.add_argument("--seed", type=int, help="master seed for stochastic experiments")
    common.add_argument("--out", help="output directory (env HOLOLEDGER_OUT_DIR)")
    common.add_argument("--json", action="store_true", help="write JSON/CSV only, no SVG")
    common.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key"
    )
    common.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")

    parser = argparse.ArgumentParser(
        prog="hololedger", description="Regime-ledger experiments for free-particle measurement"
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name, command in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(command.__doc__ or "").strip())
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = validate(
            resolve_config(args.experiment, args.config, args.set, args.seed, args.out)
        )
        report = COMMANDS[args.experiment](config, not args.json)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ContractViolation as exc:
        print(f"contract violated: {exc}", file=sys.stderr)
        return 3
    except HoloLedgerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"✓ {report.experiment}: wrote {Path(config.out_dir) / 'report.json'}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
