"""Random realisations of the fused lattice and their cluster structure.

Failure model per trial:

* tetrahedron ``t`` survives as a K4 iff ``u_t < p``; otherwise it keeps one
  perfect matching of its corners (two disjoint edges);
* site ``s`` is retained iff ``v_s < p**2`` (both Bell measurements of its
  chain succeed); a deleted site loses every incident edge.

``u_t`` and ``v_s`` come from counter-based streams, so all ``p`` values share
the same draws for a given trial and spanning is monotone in ``p``.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import rng
from .lattice import Lattice

DEBUG = os.environ.get("PYROFUSE_DEBUG", "") not in ("", "0")

PAIRINGS = ("fixed", "random")

# K4 edges grouped by perfect matching: matching m is edges 2m and 2m+1.
# Matching 0 pairs sublattices {0,1} and {2,3}.
K4_EDGES = np.array([(0, 1), (2, 3), (0, 2), (1, 3), (0, 3), (1, 2)], dtype=np.int64)


@njit(nogil=True, cache=True)
def _find(parent, a):
    root = a
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


@njit(nogil=True, cache=True)
def _union(parent, size, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return False
    if size[ra] < size[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    size[ra] += size[rb]
    return True


@njit(nogil=True, cache=True)
def _percolate(corners, k4, alive, matching, retained, source, target, parent, size):
    """Union realised edges, flatten roots and find the largest spanning cluster."""
    n_sites = parent.shape[0]
    for s in range(n_sites):
        parent[s] = s
        size[s] = 1
    for t in range(corners.shape[0]):
        for e in range(6):
            if not alive[t] and e // 2 != matching[t]:
                continue
            a = corners[t, k4[e, 0]]
            b = corners[t, k4[e, 1]]
            if retained[a] and retained[b]:
                _union(parent, size, a, b)
    for s in range(n_sites):
        parent[s] = _find(parent, s)
    touches_source = np.zeros(n_sites, dtype=np.bool_)
    for s in source:
        if retained[s]:
            touches_source[parent[s]] = True
    largest = 0
    for s in target:
        if retained[s]:
            r = parent[s]
            if touches_source[r] and size[r] > largest:
                largest = size[r]
    return largest


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)
        self.size = np.ones(n, dtype=np.int64)

    def find(self, a: int) -> int:
        return int(_find(self.parent, a))

    def union(self, a: int, b: int) -> bool:
        return bool(_union(self.parent, self.size, a, b))

    def roots(self) -> np.ndarray:
        return np.array([self.find(i) for i in range(len(self.parent))], dtype=np.int64)


@dataclass(frozen=True)
class SampleConfig:
    """Parameters of one random realisation.

    ``stream`` is an extra key component; leave it at 0 to share draws across
    ``p`` values. ``site_deletion_prob`` overrides the default ``1 - p**2``.
    """

    p: float
    pairing: str = "fixed"
    seed: int = 0
    trial_index: int = 0
    site_deletion_prob: float | None = None
    stream: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.pairing not in PAIRINGS:
            raise ValueError(f"pairing must be one of {PAIRINGS}, got {self.pairing!r}")
        if self.site_deletion_prob is not None and not 0.0 <= self.site_deletion_prob <= 1.0:
            raise ValueError("site_deletion_prob must lie in [0, 1]")
        if self.trial_index < 0:
            raise ValueError("trial_index must be nonnegative")

    @property
    def retention_prob(self) -> float:
        if self.site_deletion_prob is not None:
            return 1.0 - self.site_deletion_prob
        return self.p * self.p


@dataclass(frozen=True)
class TrialDraws:
    """Uniform draws of one trial; shared by every ``p`` evaluated on it."""

    tet: np.ndarray
    site: np.ndarray
    matching: np.ndarray


def draw_trial(lat: Lattice, seed: int, trial: int, pairing: str, stream: int = 0) -> TrialDraws:
    tet = rng.uniforms(seed, trial, "tet", lat.tetrahedron_count, stream)
    site = rng.uniforms(seed, trial, "site", lat.site_count, stream)
    if pairing == "random":
        w = rng.uniforms(seed, trial, "pair", lat.tetrahedron_count, stream)
        matching = np.minimum((w * 3).astype(np.int8), 2)
    else:
        matching = np.zeros(lat.tetrahedron_count, dtype=np.int8)
    return TrialDraws(tet, site, matching)


@dataclass(frozen=True, eq=False)
class Realization:
    """One sampled lattice.

    ``labels`` holds the cluster root of each retained site and -1 for deleted
    sites; ``sizes[root]`` is the cluster size. ``matching`` is only meaningful
    where ``alive`` is false.
    """

    config: SampleConfig
    alive: np.ndarray
    matching: np.ndarray
    retained: np.ndarray
    labels: np.ndarray
    sizes: np.ndarray
    spanning: bool
    largest_spanning_cluster_size: int

    def edges(self, lat: Lattice) -> np.ndarray:
        """Realised edges between retained sites, ``(E, 2)``."""
        keep = np.where(self.alive[:, None], True, (np.arange(6)[None, :] // 2) == self.matching[:, None])
        a = lat.corners[:, K4_EDGES[:, 0]][keep]
        b = lat.corners[:, K4_EDGES[:, 1]][keep]
        ok = self.retained[a] & self.retained[b]
        out = np.stack([a[ok], b[ok]], axis=1)
        if DEBUG:
            assert self.retained[out].all(), "edge touches a deleted site"
        return out


def _realize(lat: Lattice, draws: TrialDraws, p: float, retention: float):
    alive = draws.tet < p
    retained = draws.site < retention
    parent = np.empty(lat.site_count, dtype=np.int64)
    size = np.empty(lat.site_count, dtype=np.int64)
    largest = _percolate(
        lat.corners, K4_EDGES, alive, draws.matching, retained,
        lat.source_sites, lat.target_sites, parent, size,
    )
    return alive, retained, parent, size, int(largest)


def spanning_size(lat: Lattice, draws: TrialDraws, p: float, retention: float) -> int:
    """Size of the largest spanning cluster for pre-drawn uniforms; 0 if none spans."""
    return _realize(lat, draws, p, retention)[4]


def sample(lat: Lattice, cfg: SampleConfig) -> Realization:
    """Deterministic realisation of ``lat`` under ``cfg``."""
    draws = draw_trial(lat, cfg.seed, cfg.trial_index, cfg.pairing, cfg.stream)
    alive, retained, parent, size, largest = _realize(lat, draws, cfg.p, cfg.retention_prob)
    labels = np.where(retained, parent, -1)
    return Realization(
        config=cfg,
        alive=alive,
        matching=draws.matching,
        retained=retained,
        labels=labels,
        sizes=size,
        spanning=largest > 0,
        largest_spanning_cluster_size=largest,
    )


def spanning_fraction(r: Realization, lat: Lattice) -> float:
    """Largest spanning cluster over the total site count ``Q``."""
    return r.largest_spanning_cluster_size / lat.site_count


@dataclass(frozen=True)
class ClusterStats:
    count: int
    histogram: dict[int, int]
    largest: int


def cluster_stats(r: Realization) -> ClusterStats:
    roots = np.unique(r.labels[r.retained])
    sizes = r.sizes[roots]
    hist = Counter(int(s) for s in sizes)
    return ClusterStats(
        count=len(roots),
        histogram=dict(sorted(hist.items())),
        largest=int(sizes.max()) if len(sizes) else 0,
    )


def clusters(r: Realization) -> list[np.ndarray]:
    """Site ids of every cluster, each sorted, ordered by smallest member."""
    ids = np.flatnonzero(r.retained)
    order = np.argsort(r.labels[ids], kind="stable")
    ids, roots = ids[order], r.labels[ids][order]
    cuts = np.flatnonzero(np.diff(roots)) + 1
    groups = np.split(ids, cuts) if len(ids) else []
    return sorted((np.sort(g) for g in groups), key=lambda g: g[0])
