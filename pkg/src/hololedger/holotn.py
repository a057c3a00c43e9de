"""Classicalized holographic tensor network on a binary MERA graph.

Every site carries one classical spin at (1/2, 1/2), so the entropy of the
network is its discretized area A_TN = number of sites. Interval entropies
are approximated by minimal cuts through the bond graph.
"""

from __future__ import annotations

import csv
import html
import itertools
import json
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray
from scipy import sparse, stats
from scipy.sparse import csgraph

from .errors import ConstructionError, DomainError
from .qstate import DensityMatrix, shannon_entropy, vn_entropy

logger = logging.getLogger(__name__)

SiteKind = Literal["leaf", "disentangler", "isometry", "top"]

NETWORK_SCHEMA_VERSION = 1
JOINT_ENUMERATION_LIMIT = 20
BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class Site:
    id: int
    kind: SiteKind
    layer: int
    row: int
    position: int


@dataclass(frozen=True)
class Layer:
    index: int
    width: int
    disentanglers: int
    isometries: int


@dataclass(frozen=True, eq=False)
class MeraNetwork:
    """Sites and undirected bonds of a binary MERA.

    Rows order the graph bottom-up: leaves are row 0, layer k puts its
    disentanglers on row 2k-1 and its isometries on row 2k.
    """

    n_leaves: int
    sites: tuple[Site, ...]
    bonds: tuple[tuple[int, int], ...]
    layers: tuple[Layer, ...] = ()

    def __post_init__(self) -> None:
        if not self.sites:
            raise ConstructionError("Network has no sites")
        if [s.id for s in self.sites] != list(range(len(self.sites))):
            raise ConstructionError("Site ids must be 0..n_sites-1 in order")
        for a, b in self.bonds:
            if not (0 <= a < len(self.sites) and 0 <= b < len(self.sites)) or a == b:
                raise ConstructionError(f"Bond ({a}, {b}) does not join two distinct sites")
        n_components, _ = csgraph.connected_components(self.adjacency(), directed=False)
        if n_components != 1:
            raise ConstructionError(f"Network is disconnected ({n_components} components)")
        neighbors = self._neighbor_lists()
        for site in self.sites:
            if site.kind == "top":
                continue
            if not any(self.sites[n].row > site.row for n in neighbors[site.id]):
                raise ConstructionError(f"Site {site.id} ({site.kind}) has no upward bond")

    def _neighbor_lists(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.sites]
        for a, b in self.bonds:
            out[a].append(b)
            out[b].append(a)
        return out

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def n_bonds(self) -> int:
        return len(self.bonds)

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def top(self) -> int:
        return next(s.id for s in self.sites if s.kind == "top")

    def leaves(self) -> list[int]:
        """Leaf ids in boundary order."""
        found = [s for s in self.sites if s.kind == "leaf"]
        return [s.id for s in sorted(found, key=lambda s: s.position)]

    def neighbors(self, site: int) -> list[int]:
        return sorted(self._neighbor_lists()[site])

    def degree(self, site: int) -> int:
        return len(self._neighbor_lists()[site])

    def adjacency(self) -> sparse.csr_matrix:
        n = len(self.sites)
        if not self.bonds:
            return sparse.csr_matrix((n, n), dtype=np.int32)
        a, b = np.array(self.bonds, dtype=np.int64).T
        data = np.ones(2 * a.size, dtype=np.int32)
        coo = sparse.coo_matrix(
            (data, (np.concatenate([a, b]), np.concatenate([b, a]))), shape=(n, n)
        )
        return coo.tocsr()

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": NETWORK_SCHEMA_VERSION,
            "n_leaves": self.n_leaves,
            "layers": [
                {"index": la.index, "width": la.width, "disentanglers": la.disentanglers,
                 "isometries": la.isometries}
                for la in self.layers
            ],
            "sites": [
                {"id": s.id, "kind": s.kind, "layer": s.layer, "row": s.row,
                 "position": s.position}
                for s in self.sites
            ],
            "bonds": [list(b) for b in self.bonds],
        }

    def save_json(self, path: str | Path) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")
        return target

    @classmethod
    def single_site(cls) -> MeraNetwork:
        return cls(n_leaves=0, sites=(Site(0, "top", 0, 0, 0),), bonds=())


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def build_mera(n_leaves: int, branching: int = 2) -> MeraNetwork:
    """Binary MERA over n_leaves boundary sites.

    Each layer of width w >= 4 first places w/2 disentanglers on the leg
    pairs (2j+1, 2j+2) mod w, then w/2 isometries on (2j, 2j+1). The last
    layer (w = 2) is a single isometry, the top.
    """
    if branching != 2:
        raise ConstructionError(f"Only binary MERA is supported, got branching={branching}")
    if n_leaves < 4 or not _is_power_of_two(n_leaves):
        raise ConstructionError(f"n_leaves must be a power of two >= 4, got {n_leaves}")

    sites: list[Site] = [Site(i, "leaf", 0, 0, i) for i in range(n_leaves)]
    bonds: list[tuple[int, int]] = []
    layers: list[Layer] = []

    def add(kind: SiteKind, layer: int, row: int, position: int) -> int:
        sites.append(Site(len(sites), kind, layer, row, position))
        return len(sites) - 1

    legs = list(range(n_leaves))
    width, layer = n_leaves, 1
    while width >= 2:
        n_dis = 0
        if width >= 4:
            for j in range(width // 2):
                a, b = (2 * j + 1) % width, (2 * j + 2) % width
                d = add("disentangler", layer, 2 * layer - 1, j)
                bonds += [(legs[a], d), (legs[b], d)]
                legs[a] = legs[b] = d
                n_dis += 1
        upper = []
        for j in range(width // 2):
            kind: SiteKind = "top" if width == 2 else "isometry"
            s = add(kind, layer, 2 * layer, j)
            bonds += [(legs[2 * j], s), (legs[2 * j + 1], s)]
            upper.append(s)
        layers.append(Layer(layer, width, n_dis, width // 2))
        legs, width, layer = upper, width // 2, layer + 1

    network = MeraNetwork(n_leaves, tuple(sites), tuple(bonds), tuple(layers))
    logger.debug("MERA n_leaves=%d: %d sites, %d bonds", n_leaves, len(sites), len(bonds))
    return network


def discretized_area(network: MeraNetwork) -> int:
    """A_TN: the number of network sites. Bonds do not contribute."""
    return network.n_sites


@dataclass(frozen=True, eq=False)
class ClassicalizedHologram:
    """Network with every site restricted to a fair classical spin."""

    network: MeraNetwork
    site_entropy: float = 1.0

    @property
    def A_TN(self) -> int:  # noqa: N802
        return discretized_area(self.network)

    def per_site_entropies(self) -> list[float]:
        return [self.site_entropy] * self.A_TN

    def entropy_bits(self) -> float:
        return math.fsum(self.per_site_entropies())

    def joint_distribution(self) -> NDArray[np.float64]:
        """Product distribution over all 2^A_TN spin configurations."""
        if self.A_TN > JOINT_ENUMERATION_LIMIT:
            raise DomainError(
                f"Joint enumeration limited to {JOINT_ENUMERATION_LIMIT} sites, got {self.A_TN}"
            )
        site = np.array([0.5, 0.5])
        joint = np.ones(1)
        for _ in range(self.A_TN):
            joint = np.kron(joint, site)
        return joint

    def joint_entropy(self) -> float:
        return shannon_entropy(self.joint_distribution())

    def _repr_html_(self) -> str:
        rows = [
            ("n_leaves", self.network.n_leaves),
            ("sites (A_TN)", self.A_TN),
            ("bonds", self.network.n_bonds),
            ("layers", self.network.n_layers),
            ("entropy (bits)", self.entropy_bits()),
        ]
        body = "".join(
            f"<tr><td>{html.escape(k)}</td><td>{html.escape(str(v))}</td></tr>" for k, v in rows
        )
        head = "<thead><tr><th>field</th><th>value</th></tr></thead>"
        return f"<table>{head}<tbody>{body}</tbody></table>"


def classicalize(network: MeraNetwork) -> ClassicalizedHologram:
    """Keep only the Pauli-Z algebra per site: each site becomes diag(1/2, 1/2)."""
    site_entropy = vn_entropy(DensityMatrix.maximally_mixed(2))
    return ClassicalizedHologram(network, site_entropy)


@dataclass(frozen=True)
class SpinEvent:
    index: int
    site: int
    spin: int

    @property
    def up(self) -> bool:
        return self.spin > 0


def readout_spin_events(
    hologram: ClassicalizedHologram, n_events: int, seed: int | np.random.SeedSequence
) -> list[SpinEvent]:
    """n_events fair spin reads, visiting sites in id order and wrapping around."""
    if n_events < 0:
        raise DomainError(f"n_events must be >= 0, got {n_events}")
    rng = np.random.default_rng(seed)
    spins = np.where(rng.integers(0, 2, size=n_events) == 1, 1, -1).tolist()
    n_sites = hologram.A_TN
    return [SpinEvent(i, i % n_sites, s) for i, s in enumerate(spins)]


def save_events_csv(events: Iterable[SpinEvent], path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "site", "spin"])
        for event in events:
            writer.writerow([event.index, event.site, event.spin])
    return target


def spin_event_budget(information_bits: float) -> tuple[int, float]:
    """Whole spin events covered by I bits, and the fractional remainder."""
    if information_bits < 0 or not math.isfinite(information_bits):
        raise DomainError(f"Information must be finite and non-negative, got {information_bits}")
    whole = math.floor(information_bits)
    return int(whole), information_bits - whole


def _interval_leaves(
    network: MeraNetwork, interval: tuple[int, int]
) -> tuple[list[int], list[int]]:
    start, stop = interval
    leaves = network.leaves()
    if not leaves:
        raise DomainError("Network has no boundary leaves")
    if stop <= start:
        raise DomainError(f"Interval [{start}, {stop}) is empty")
    if start < 0 or stop > len(leaves):
        raise DomainError(f"Interval [{start}, {stop}) exceeds {len(leaves)} leaves")
    return leaves[start:stop], leaves[:start] + leaves[stop:]


def minimal_cut(network: MeraNetwork, interval: tuple[int, int]) -> int:
    """Fewest bonds separating the interval's leaves from the other leaves and the top.

    Solved as a unit-capacity max-flow between a super-source tied to the
    interval and a super-sink tied to the rest of the boundary.
    """
    inside, outside = _interval_leaves(network, interval)
    n = network.n_sites
    source, sink = n, n + 1
    big = network.n_bonds + 1
    rows: list[int] = []
    cols: list[int] = []
    caps: list[int] = []
    for a, b in network.bonds:
        rows += [a, b]
        cols += [b, a]
        caps += [1, 1]
    for leaf in inside:
        rows.append(source)
        cols.append(leaf)
        caps.append(big)
    for node in [*outside, network.top]:
        rows.append(node)
        cols.append(sink)
        caps.append(big)
    graph = sparse.coo_matrix(
        (np.array(caps, dtype=np.int32), (rows, cols)), shape=(n + 2, n + 2)
    ).tocsr()
    return int(csgraph.maximum_flow(graph, source, sink).flow_value)


def brute_force_cut(network: MeraNetwork, interval: tuple[int, int]) -> int:
    """Exhaustive minimum over every side assignment of the internal sites."""
    inside, _ = _interval_leaves(network, interval)
    free = [s.id for s in network.sites if s.kind in ("disentangler", "isometry")]
    if len(free) > BRUTE_FORCE_LIMIT:
        raise DomainError(f"Brute force allows {BRUTE_FORCE_LIMIT} free sites, got {len(free)}")
    configs = np.array(list(itertools.product((0, 1), repeat=len(free))), dtype=np.int8)
    sides = np.zeros((configs.shape[0], network.n_sites), dtype=np.int8)
    sides[:, inside] = 1
    sides[:, free] = configs
    a, b = np.array(network.bonds, dtype=np.int64).T
    crossings = np.abs(sides[:, a] - sides[:, b]).sum(axis=1)
    return int(crossings.min())


@dataclass(frozen=True)
class CutScaling:
    """Least-squares fit cut(ℓ) = slope·log2 ℓ + intercept."""

    lengths: tuple[int, ...]
    cuts: tuple[int, ...]
    slope: float
    intercept: float
    r_squared: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "cut_by_interval": {str(ell): cut for ell, cut in zip(self.lengths, self.cuts)},
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
        }


def cut_scaling(network: MeraNetwork, lengths: Sequence[int], start: int = 0) -> CutScaling:
    if len(lengths) < 2:
        raise DomainError("cut_scaling needs at least two interval lengths")
    cuts = [minimal_cut(network, (start, start + ell)) for ell in lengths]
    fit = stats.linregress(np.log2(np.asarray(lengths, dtype=np.float64)), cuts)
    return CutScaling(
        tuple(int(ell) for ell in lengths),
        tuple(cuts),
        float(fit.slope),
        float(fit.intercept),
        float(fit.rvalue**2),
    )


__all__ = [
    "Site",
    "Layer",
    "MeraNetwork",
    "ClassicalizedHologram",
    "SpinEvent",
    "CutScaling",
    "build_mera",
    "discretized_area",
    "classicalize",
    "readout_spin_events",
    "save_events_csv",
    "spin_event_budget",
    "minimal_cut",
    "brute_force_cut",
    "cut_scaling",
]
