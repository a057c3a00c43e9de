"""Tests for hololedger.holotn module."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest


class TestBuildMera:
    """Tests for the binary MERA graph."""

    @pytest.mark.parametrize(
        ("n_leaves", "n_sites", "n_bonds", "n_layers"),
        [(4, 9, 10, 2), (8, 21, 26, 3), (64, 189, 250, 6)],
    )
    def test_counts(self, n_leaves: int, n_sites: int, n_bonds: int, n_layers: int) -> None:
        from hololedger.holotn import build_mera, discretized_area

        network = build_mera(n_leaves)
        assert network.n_sites == n_sites
        assert network.n_bonds == n_bonds
        assert network.n_layers == n_layers
        assert discretized_area(network) == n_sites

    def test_layer_structure(self) -> None:
        from hololedger.holotn import build_mera

        layers = build_mera(8).layers
        assert [(la.width, la.disentanglers, la.isometries) for la in layers] == [
            (8, 4, 4),
            (4, 2, 2),
            (2, 0, 1),
        ]

    def test_leaves_and_top(self) -> None:
        from hololedger.holotn import build_mera

        network = build_mera(8)
        assert network.leaves() == list(range(8))
        top = network.sites[network.top]
        assert top.kind == "top"
        assert network.degree(network.top) == 2
        assert all(network.degree(leaf) == 1 for leaf in network.leaves())

    def test_rows_increase_upwards(self) -> None:
        from hololedger.holotn import build_mera

        network = build_mera(16)
        rows: dict[str, set[int]] = {}
        for site in network.sites:
            rows.setdefault(site.kind, set()).add(site.row)
        assert rows["leaf"] == {0}
        assert rows["disentangler"] == {1, 3, 5}
        assert rows["isometry"] == {2, 4, 6}
        assert rows["top"] == {8}

    @pytest.mark.parametrize(("n_leaves", "branching"), [(2, 2), (6, 2), (12, 2), (8, 3)])
    def test_rejects_bad_shapes(self, n_leaves: int, branching: int) -> None:
        from hololedger.errors import ConstructionError
        from hololedger.holotn import build_mera

        with pytest.raises(ConstructionError):
            build_mera(n_leaves, branching=branching)

    def test_rejects_disconnected_graph(self) -> None:
        from hololedger.errors import ConstructionError
        from hololedger.holotn import MeraNetwork, Site

        sites = (Site(0, "leaf", 0, 0, 0), Site(1, "leaf", 0, 0, 1), Site(2, "top", 1, 2, 0))
        with pytest.raises(ConstructionError, match="disconnected"):
            MeraNetwork(2, sites, ((0, 2),))

    def test_rejects_site_without_upward_bond(self) -> None:
        from hololedger.errors import ConstructionError
        from hololedger.holotn import MeraNetwork, Site

        sites = (Site(0, "leaf", 0, 0, 0), Site(1, "leaf", 0, 0, 1), Site(2, "top", 1, 2, 0))
        with pytest.raises(ConstructionError, match="upward"):
            MeraNetwork(2, sites, ((0, 1), (1, 2)))

    def test_single_site_network(self) -> None:
        from hololedger.holotn import MeraNetwork, classicalize

        network = MeraNetwork.single_site()
        assert network.n_sites == 1
        assert network.leaves() == []
        assert classicalize(network).entropy_bits() == 1.0

    def test_save_json(self, tmp_path: Path) -> None:
        from hololedger.holotn import build_mera

        target = build_mera(4).save_json(tmp_path / "network.json")
        data = json.loads(target.read_text(encoding="utf-8"))
        assert data["schema_version"] == 1
        assert len(data["sites"]) == 9
        assert len(data["bonds"]) == 10


class TestClassicalizedHologram:
    """Tests for the classicalized network entropy."""

    @pytest.mark.parametrize("n_leaves", [4, 8, 64])
    def test_entropy_equals_area(self, n_leaves: int) -> None:
        from hololedger.holotn import build_mera, classicalize

        hologram = classicalize(build_mera(n_leaves))
        assert hologram.site_entropy == pytest.approx(1.0, abs=1e-12)
        assert hologram.entropy_bits() == pytest.approx(hologram.A_TN, abs=1e-9)

    def test_joint_distribution_is_product(self) -> None:
        from hololedger.holotn import build_mera, classicalize

        hologram = classicalize(build_mera(4))
        joint = hologram.joint_distribution()
        assert joint.shape == (2**9,)
        assert hologram.joint_entropy() == pytest.approx(9.0, abs=1e-9)

    def test_joint_enumeration_limit(self) -> None:
        from hololedger.errors import DomainError
        from hololedger.holotn import build_mera, classicalize

        with pytest.raises(DomainError):
            classicalize(build_mera(8)).joint_distribution()

    def test_html(self) -> None:
        from hololedger.holotn import build_mera, classicalize

        assert "sites (A_TN)" in classicalize(build_mera(4))._repr_html_()


class TestSpinEvents:
    """Tests for spin readout events."""

    def test_events_cycle_over_sites(self) -> None:
        from hololedger.holotn import build_mera, classicalize, readout_spin_events

        hologram = classicalize(build_mera(4))
        events = readout_spin_events(hologram, 20, seed=0)
        assert [e.site for e in events[:10]] == [0, 1, 2, 3, 4, 5, 6, 7, 8, 0]
        assert {e.spin for e in events} <= {-1, 1}

    def test_fair_and_deterministic(self) -> None:
        from hololedger.holotn import build_mera, classicalize, readout_spin_events

        hologram = classicalize(build_mera(64))
        events = readout_spin_events(hologram, 4000, seed=12)
        again = readout_spin_events(hologram, 4000, seed=12)
        assert events == again
        assert sum(e.up for e in events) / 4000 == pytest.approx(0.5, abs=0.04)

    def test_zero_events(self) -> None:
        from hololedger.holotn import build_mera, classicalize, readout_spin_events

        assert readout_spin_events(classicalize(build_mera(4)), 0, seed=1) == []

    def test_save_csv(self, tmp_path: Path) -> None:
        from hololedger.holotn import (
            build_mera,
            classicalize,
            readout_spin_events,
            save_events_csv,
        )

        events = readout_spin_events(classicalize(build_mera(4)), 5, seed=1)
        target = save_events_csv(events, tmp_path / "events.csv")
        with target.open(encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["index", "site", "spin"]
        assert len(rows) == 6

    def test_budget(self) -> None:
        from hololedger.errors import DomainError
        from hololedger.holotn import spin_event_budget

        whole, rest = spin_event_budget(721.3475)
        assert whole == 721
        assert rest == pytest.approx(0.3475)
        with pytest.raises(DomainError):
            spin_event_budget(-1.0)


class TestMinimalCut:
    """Tests for interval cuts through the bond graph."""

    def test_single_leaf_and_whole_boundary(self) -> None:
        from hololedger.holotn import build_mera, minimal_cut

        network = build_mera(16)
        assert minimal_cut(network, (5, 6)) == 1
        assert minimal_cut(network, (0, 16)) == 2

    def test_logarithmic_growth(self) -> None:
        from hololedger.holotn import build_mera, cut_scaling

        scaling = cut_scaling(build_mera(64), [2, 4, 8, 16])
        assert scaling.cuts == (2, 4, 6, 8)
        assert scaling.slope == pytest.approx(2.0)
        assert scaling.r_squared > 0.99
        assert scaling.to_dict()["cut_by_interval"] == {"2": 2, "4": 4, "8": 6, "16": 8}

    @pytest.mark.parametrize("interval", [(0, 1), (0, 2), (1, 3), (2, 5), (3, 7), (0, 8)])
    def test_matches_brute_force(self, interval: tuple[int, int]) -> None:
        from hololedger.holotn import brute_force_cut, build_mera, minimal_cut

        network = build_mera(8)
        assert minimal_cut(network, interval) == brute_force_cut(network, interval)

    def test_reflection_symmetry(self) -> None:
        from hololedger.holotn import build_mera, minimal_cut

        network = build_mera(16)
        for a, b in [(0, 3), (1, 6), (2, 11), (5, 9)]:
            assert minimal_cut(network, (a, b)) == minimal_cut(network, (16 - b, 16 - a))

    def test_nested_dyadic_intervals_never_shrink(self) -> None:
        from hololedger.holotn import build_mera, minimal_cut

        cuts = [minimal_cut(build_mera(64), (0, ell)) for ell in (1, 2, 4, 8, 16)]
        assert cuts == [1, 2, 4, 6, 8]
        assert cuts == sorted(cuts)

    def test_inclusion_can_lower_the_cut(self) -> None:
        from hololedger.holotn import build_mera, minimal_cut

        # Cut size is submodular in the interval, not monotone.
        network = build_mera(32)
        assert minimal_cut(network, (0, 10)) == 7
        assert minimal_cut(network, (0, 11)) == 6
        assert minimal_cut(network, (0, 32)) == 2

    @pytest.mark.parametrize("interval", [(3, 3), (-1, 2), (0, 17)])
    def test_rejects_bad_intervals(self, interval: tuple[int, int]) -> None:
        from hololedger.errors import DomainError
        from hololedger.holotn import build_mera, minimal_cut

        with pytest.raises(DomainError):
            minimal_cut(build_mera(16), interval)

    def test_brute_force_limit(self) -> None:
        from hololedger.errors import DomainError
        from hololedger.holotn import brute_force_cut, build_mera

        with pytest.raises(DomainError, match="free sites"):
            brute_force_cut(build_mera(16), (0, 4))

    def test_scaling_needs_two_lengths(self) -> None:
        from hololedger.errors import DomainError
        from hololedger.holotn import build_mera, cut_scaling

        with pytest.raises(DomainError):
            cut_scaling(build_mera(16), [4])
