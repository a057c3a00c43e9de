"""Tests for hololedger.superselection module."""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path

import numpy as np
import pytest

from hololedger.qstate import Grid1D
from hololedger.superselection import CellBasis, PhaseSpaceLattice


def _grid() -> Grid1D:
    return Grid1D(-16.0, 16.0, 256)


def _basis(n_q: int = 4, n_p: int = 3) -> CellBasis:
    from hololedger.superselection import build_cell_basis

    return build_cell_basis(PhaseSpaceLattice(dQ=2.0, n_q=n_q, n_p=n_p), _grid())


class TestPhaseSpaceLattice:
    """Tests for the Planck-cell lattice."""

    def test_cells_have_planck_area(self) -> None:
        lattice = PhaseSpaceLattice(dQ=2.0, n_q=4, n_p=3)
        assert lattice.dP == pytest.approx(math.pi)
        assert lattice.dQ * lattice.dP == lattice.h
        assert lattice.seed_width() == pytest.approx(math.sqrt(1.0 / math.pi))

    def test_centres_are_symmetric(self) -> None:
        lattice = PhaseSpaceLattice(dQ=2.0, n_q=4, n_p=3)
        assert lattice.q_values().tolist() == [-3.0, -1.0, 1.0, 3.0]
        assert lattice.p_values().tolist() == pytest.approx([-math.pi, 0.0, math.pi])

    def test_labels_are_q_major(self) -> None:
        lattice = PhaseSpaceLattice(dQ=2.0, n_q=2, n_p=2)
        assert lattice.labels() == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert lattice.n_cells == 4

    def test_edge_cells(self) -> None:
        lattice = PhaseSpaceLattice(dQ=2.0, n_q=3, n_p=3)
        assert not lattice.is_edge((1, 1))
        assert lattice.is_edge((0, 1))
        assert lattice.is_edge((2, 2))

    @pytest.mark.parametrize("kwargs", [{"dQ": 0.0}, {"n_q": 0}, {"hbar": -1.0}])
    def test_rejects_bad_parameters(self, kwargs: dict[str, float]) -> None:
        from hololedger.errors import DomainError

        args: dict[str, float] = {"dQ": 2.0, "n_q": 2, "n_p": 2}
        args.update(kwargs)
        with pytest.raises(DomainError):
            PhaseSpaceLattice(**args)  # type: ignore[arg-type]


class TestCellBasis:
    """Tests for the orthonormalised cell basis."""

    def test_orthonormal(self) -> None:
        basis = _basis()
        assert len(basis) == 12
        assert basis.gram_deviation() < 1e-10

    def test_vectors_stay_close_to_seeds(self) -> None:
        overlaps = _basis().parent_overlaps()
        assert overlaps.shape == (12,)
        assert float(overlaps.min()) > 0.5
        assert float(overlaps.max()) <= 1.0 + 1e-12

    def test_four_by_four_window(self) -> None:
        basis = _basis(n_q=4, n_p=4)
        assert len(basis) == 16
        assert basis.gram_deviation() < 1e-10
        overlaps = basis.parent_overlaps()
        interior = [i for i, label in enumerate(basis.labels) if not basis.lattice.is_edge(label)]
        assert len(interior) == 4
        assert float(overlaps[interior].min()) > 0.9

    def test_single_cell_is_its_gaussian(self) -> None:
        from hololedger.superselection import build_cell_basis, coherent_state

        lattice = PhaseSpaceLattice(dQ=2.0, n_q=1, n_p=1)
        basis = build_cell_basis(lattice, _grid())
        gaussian = coherent_state(_grid(), 0.0, 0.0, lattice.seed_width())
        np.testing.assert_allclose(basis.vectors[:, 0], gaussian, atol=1e-12)

    def test_wavefunction_and_projector(self) -> None:
        from hololedger.qstate import vn_entropy

        basis = _basis()
        psi = basis.wavefunction((1, 1))
        assert psi.norm() == pytest.approx(1.0, abs=1e-10)
        assert vn_entropy(basis.projector((1, 1))) == pytest.approx(0.0, abs=1e-9)

    def test_edge_cells_listed(self) -> None:
        basis = _basis(n_q=3, n_p=3)
        assert (1, 1) not in basis.edge_cells()
        assert len(basis.edge_cells()) == 8

    def test_grid_too_coarse(self) -> None:
        from hololedger.errors import ConstructionError
        from hololedger.superselection import build_cell_basis

        lattice = PhaseSpaceLattice(dQ=2.0, n_q=2, n_p=2)
        with pytest.raises(ConstructionError, match="resolve"):
            build_cell_basis(lattice, Grid1D(-16.0, 16.0, 32))

    def test_window_wider_than_grid(self) -> None:
        from hololedger.errors import ConstructionError
        from hololedger.superselection import build_cell_basis

        lattice = PhaseSpaceLattice(dQ=2.0, n_q=16, n_p=1)
        with pytest.raises(ConstructionError, match="exceeds the grid"):
            build_cell_basis(lattice, _grid())

    def test_momenta_beyond_cutoff(self) -> None:
        from hololedger.errors import ConstructionError
        from hololedger.superselection import build_cell_basis

        lattice = PhaseSpaceLattice(dQ=2.0, n_q=1, n_p=15)
        with pytest.raises(ConstructionError, match="cutoff"):
            build_cell_basis(lattice, _grid())

    def test_save_csv(self, tmp_path: Path) -> None:
        basis = _basis(n_q=2, n_p=1)
        target = basis.save_csv(tmp_path / "basis.csv")
        with target.open(encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["cell", "j", "k", "q", "p", "i", "x", "re", "im"]
        assert len(rows) == 1 + 2 * 256


class TestCoarseObservables:
    """Tests for the commuting coarse observables."""

    def test_coarse_operators_commute(self) -> None:
        from hololedger.superselection import build_coarse_observables

        coarse = build_coarse_observables(_basis())
        assert coarse.commutator_norm() == 0.0

    def test_embedded_operators_commute(self) -> None:
        from hololedger.superselection import build_coarse_observables

        q_op, p_op = build_coarse_observables(_basis()).embedded()
        assert q_op.shape == (256, 256)
        assert float(np.max(np.abs(q_op @ p_op - p_op @ q_op))) < 1e-10

    def test_spectra_are_cell_centres(self) -> None:
        from hololedger.superselection import build_coarse_observables

        q_spec, p_spec = build_coarse_observables(_basis(n_q=2, n_p=2)).spectra()
        assert q_spec.tolist() == [-1.0, -1.0, 1.0, 1.0]
        assert p_spec.tolist() == pytest.approx([-math.pi / 2, math.pi / 2] * 2)


class TestFineCommutator:
    """Tests for the fine-grained canonical commutator."""

    def test_centred_packets_satisfy_ccr(self) -> None:
        from hololedger.lorentzian import GaussianPacketSpec, gaussian_packet
        from hololedger.superselection import fine_commutator_check

        grid = _grid()
        states = [
            gaussian_packet(grid, GaussianPacketSpec(x0=x0, sigma0=1.0, p0=p0))
            for x0, p0 in [(0.0, 0.0), (-2.0, 1.5), (3.0, -2.0)]
        ]
        check = fine_commutator_check(grid, states)
        assert check.flagged == ()
        assert check.max_deviation < 1e-8

    def test_boundary_state_is_flagged(self, caplog: pytest.LogCaptureFixture) -> None:
        from hololedger.lorentzian import GaussianPacketSpec, gaussian_packet
        from hololedger.qstate import WaveFunction
        from hololedger.superselection import fine_commutator_check

        grid = _grid()
        inner = gaussian_packet(grid, GaussianPacketSpec(sigma0=1.0))
        edge = WaveFunction.normalized(grid, np.exp(-((grid.x - 15.0) ** 2) / 4.0))
        with caplog.at_level(logging.WARNING, logger="hololedger.superselection"):
            check = fine_commutator_check(grid, [inner, edge])
        assert check.flagged == (1,)
        assert check.max_deviation == check.deviations[0]
        assert "boundary" in caplog.text

    def test_rejects_foreign_grid(self) -> None:
        from hololedger.errors import InvalidStateError
        from hololedger.lorentzian import GaussianPacketSpec, gaussian_packet
        from hololedger.superselection import fine_commutator_check

        other = gaussian_packet(Grid1D(-20.0, 20.0, 256), GaussianPacketSpec())
        with pytest.raises(InvalidStateError):
            fine_commutator_check(_grid(), [other])


class TestPlanckCellMixture:
    """Tests for projecting states onto cell populations."""

    def test_cell_state_is_a_single_member(self) -> None:
        from hololedger.superselection import planck_cell_mixture

        basis = _basis()
        mixture = planck_cell_mixture(basis.projector((2, 1)), basis)
        assert len(mixture.ensemble) == 1
        assert mixture.weights[basis.index_of((2, 1))] == pytest.approx(1.0, abs=1e-10)
        assert mixture.discarded < 1e-10
        assert not mixture.warning

    def test_superposition_of_two_cells(self) -> None:
        from hololedger.qstate import DensityMatrix, ensemble_to_density, vn_entropy
        from hololedger.superselection import planck_cell_mixture

        basis = _basis()
        a, b = basis.index_of((0, 0)), basis.index_of((3, 2))
        vec = (basis.vectors[:, a] + basis.vectors[:, b]) / math.sqrt(2.0)
        mixture = planck_cell_mixture(DensityMatrix.pure(vec), basis)
        assert len(mixture.ensemble) == 2
        assert mixture.ensemble.weights.tolist() == pytest.approx([0.5, 0.5], abs=1e-10)
        assert vn_entropy(ensemble_to_density(mixture.ensemble)) == pytest.approx(1.0, abs=1e-9)

    def test_state_outside_window_warns(self, caplog: pytest.LogCaptureFixture) -> None:
        from hololedger.qstate import DensityMatrix
        from hololedger.superselection import coherent_state, planck_cell_mixture

        basis = _basis()
        far = coherent_state(basis.grid, 5.0, 0.0, basis.lattice.seed_width())
        with caplog.at_level(logging.WARNING, logger="hololedger.superselection"):
            mixture = planck_cell_mixture(DensityMatrix.pure(far), basis)
        assert mixture.warning
        assert mixture.discarded > 0.05
        assert "outside the cell family" in caplog.text

    def test_dimension_mismatch(self) -> None:
        from hololedger.errors import InvalidStateError
        from hololedger.qstate import DensityMatrix
        from hololedger.superselection import planck_cell_mixture

        with pytest.raises(InvalidStateError, match="dimension"):
            planck_cell_mixture(DensityMatrix.maximally_mixed(4), _basis())
