"""Tests for hololedger.lorentzian module."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hololedger.lorentzian import GaussianPacketSpec
from hololedger.qstate import WaveFunction


def _packet(p0: float = 1.0, n_points: int = 1024) -> tuple[GaussianPacketSpec, WaveFunction]:
    from hololedger.lorentzian import gaussian_packet
    from hololedger.qstate import Grid1D

    grid = Grid1D(-40.0, 40.0, n_points)
    spec = GaussianPacketSpec(x0=0.0, sigma0=1.0, p0=p0)
    return spec, gaussian_packet(grid, spec)


class TestParams:
    """Tests for parameter validation."""

    @pytest.mark.parametrize("name", ["m", "hbar", "dt"])
    def test_rejects_non_positive(self, name: str) -> None:
        from hololedger.errors import DomainError
        from hololedger.lorentzian import LorentzianParams

        with pytest.raises(DomainError, match=name):
            LorentzianParams(**{name: 0.0})

    def test_packet_must_fit_grid(self) -> None:
        from hololedger.errors import DomainError
        from hololedger.lorentzian import GaussianPacketSpec, gaussian_packet
        from hololedger.qstate import Grid1D

        with pytest.raises(DomainError, match="does not fit"):
            gaussian_packet(Grid1D(-5.0, 5.0, 64), GaussianPacketSpec(x0=3.0))


class TestPropagator:
    """Tests for the free propagator."""

    def test_value_at_origin(self) -> None:
        from hololedger.lorentzian import LorentzianParams, free_propagator

        value = free_propagator(0.0, 0.0, 1.0, LorentzianParams())
        assert abs(complex(value)) == pytest.approx(0.3989423, abs=1e-7)

    @pytest.mark.parametrize("t", [0.0, -1.0])
    def test_rejects_non_positive_time(self, t: float) -> None:
        from hololedger.errors import DomainError
        from hololedger.lorentzian import LorentzianParams, free_propagator

        with pytest.raises(DomainError):
            free_propagator(0.0, 0.0, t, LorentzianParams())

    def test_symmetric_in_endpoints(self) -> None:
        from hololedger.lorentzian import LorentzianParams, free_propagator

        params = LorentzianParams()
        assert complex(free_propagator(1.5, -0.5, 0.7, params)) == pytest.approx(
            complex(free_propagator(-0.5, 1.5, 0.7, params))
        )

    def test_kernel_matches_spectral_evolution_near_centre(self) -> None:
        from hololedger.lorentzian import LorentzianParams, evolve, propagate_with_kernel

        params = LorentzianParams(dt=1e-3)
        _, psi = _packet()
        spectral = evolve(psi, 1000, params).amplitudes
        direct = propagate_with_kernel(psi, 1.0, params)
        central = np.abs(psi.grid.x) < 5.0
        np.testing.assert_allclose(direct[central], spectral[central], atol=1e-6)


class TestEvolve:
    """Tests for spectral free evolution."""

    def test_norm_is_preserved(self) -> None:
        from hololedger.lorentzian import LorentzianParams, evolve

        _, psi = _packet()
        out = evolve(psi, 1000, LorentzianParams())
        assert abs(out.norm() - 1.0) < 1e-10

    def test_zero_steps_is_identity(self) -> None:
        from hololedger.lorentzian import LorentzianParams, evolve

        _, psi = _packet()
        assert evolve(psi, 0, LorentzianParams()) is psi

    def test_negative_steps_rejected(self) -> None:
        from hololedger.errors import DomainError
        from hololedger.lorentzian import LorentzianParams, evolve

        _, psi = _packet()
        with pytest.raises(DomainError, match="time_reverse"):
            evolve(psi, -1, LorentzianParams())

    def test_width_follows_spreading_law(self) -> None:
        from hololedger.lorentzian import LorentzianParams, evolve, packet_width, position_variance

        params = LorentzianParams(dt=1e-3)
        spec, psi = _packet()
        out = evolve(psi, 1000, params)
        expected = packet_width(spec, 1.0, params)
        assert expected == pytest.approx(math.sqrt(1.25))
        assert abs(math.sqrt(position_variance(out)) - expected) / expected < 1e-6

    def test_centre_moves_with_group_velocity(self) -> None:
        from hololedger.lorentzian import LorentzianParams, evolve, position_mean

        _, psi = _packet(p0=1.0)
        out = evolve(psi, 1000, LorentzianParams())
        assert position_mean(out) == pytest.approx(1.0, abs=1e-8)

    def test_kinetic_energy_is_conserved(self) -> None:
        from hololedger.lorentzian import LorentzianParams, evolve, kinetic_energy

        params = LorentzianParams()
        _, psi = _packet(p0=1.0)
        before = kinetic_energy(psi, params)
        after = kinetic_energy(evolve(psi, 2000, params), params)
        assert before == pytest.approx(0.5 + 0.125, rel=1e-8)
        assert after == pytest.approx(before, rel=1e-10)

    def test_time_reversal_recovers_initial_state(self) -> None:
        from hololedger.lorentzian import LorentzianParams, evolve, time_reverse

        params = LorentzianParams()
        _, psi = _packet()
        forward = evolve(psi, 500, params)
        back = time_reverse(evolve(time_reverse(forward), 500, params))
        np.testing.assert_allclose(back.amplitudes, psi.amplitudes, atol=1e-10)


class TestEntropyDrift:
    """Tests for trajectory entropy tracking."""

    def test_unitary_trajectory_stays_pure(self) -> None:
        from hololedger.lorentzian import LorentzianParams, entropy_drift, trajectory

        _, psi = _packet()
        states = trajectory(psi, 5, 200, LorentzianParams())
        assert len(states) == 6
        assert entropy_drift(states) < 1e-9

    def test_snapshot_density_is_pure(self) -> None:
        from hololedger.lorentzian import LorentzianParams, entropy_drift, trajectory
        from hololedger.qstate import vn_entropy

        _, psi = _packet(n_points=256)
        states = trajectory(psi, 2, 200, LorentzianParams())
        rho = states[-1].to_density()
        assert rho.dim == 256
        assert vn_entropy(rho) < 1e-9
        assert entropy_drift(states) == pytest.approx(vn_entropy(rho), abs=1e-9)

    def test_mixed_snapshot_is_reported(self) -> None:
        from hololedger.lorentzian import entropy_drift
        from hololedger.qstate import DensityMatrix

        _, psi = _packet()
        assert entropy_drift([psi, DensityMatrix.maximally_mixed(2)]) == pytest.approx(1.0)

    def test_empty_trajectory_rejected(self) -> None:
        from hololedger.errors import DomainError
        from hololedger.lorentzian import entropy_drift

        with pytest.raises(DomainError):
            entropy_drift([])
