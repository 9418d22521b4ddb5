"""Open-boundary pyrochlore lattices built from their diamond parent.

Every diamond vertex is a tetrahedron and every diamond bond midpoint is a
pyrochlore site (qubit). Integer coordinates are used throughout: diamond
vertices in quarter-cell units, sites in eighth-cell units.

Boundary convention: a diamond vertex belongs to the lattice when it lies in
the closed box ``[0, n_x] x [0, n_y] x [0, n_z]`` (cell units) and has at
least one diamond neighbour inside the same box. Sites are the midpoints of
all bonds of the kept vertices; a bond leaving the box yields a boundary site
that belongs to a single tetrahedron. This reproduces

    Q = 16 n_x n_y n_z + 8 (n_x n_y + n_y n_z + n_x n_z) + 4 (n_x + n_y + n_z) - 12

sites for every box.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FORMAT_NAME = "pyrofuse-lattice"
FORMAT_VERSION = 1

# Bond vectors of an A-parity diamond vertex in quarter-cell units. The order
# fixes the sublattice index; it is chosen so that both fixed pairs {0,1} and
# {2,3} are separated along x.
SUBLATTICE_VECTORS = np.array([(1, 1, 1), (-1, -1, 1), (1, -1, -1), (-1, 1, -1)], dtype=np.int64)


@dataclass(frozen=True)
class LatticeSpec:
    n_x: int
    n_y: int
    n_z: int

    def __post_init__(self):
        for name in ("n_x", "n_y", "n_z"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.n_x, self.n_y, self.n_z)

    def expected_site_count(self) -> int:
        a, b, c = self.dims
        return 16 * a * b * c + 8 * (a * b + b * c + a * c) + 4 * (a + b + c) - 12


@dataclass(frozen=True, eq=False)
class Lattice:
    """Immutable pyrochlore lattice.

    Attributes:
        spec: box dimensions in conventional cubic cells.
        positions: ``(Q, 3)`` site coordinates in cell units.
        sublattice: ``(Q,)`` sublattice index 0-3 of each site.
        corners: ``(T, 4)`` site ids of each tetrahedron, ordered by sublattice.
        parity: ``(T,)`` ``"A"`` or ``"B"`` diamond sublattice of each tetrahedron.
        tet_positions: ``(T, 3)`` tetrahedron centres in cell units.
        site_tets: ``(Q, 2)`` incident tetrahedron ids, ``-1`` padded.
        source_sites, target_sites: sorted site ids on the -x and +x faces.
    """

    spec: LatticeSpec
    positions: np.ndarray
    sublattice: np.ndarray
    corners: np.ndarray
    parity: np.ndarray
    tet_positions: np.ndarray
    site_tets: np.ndarray
    source_sites: np.ndarray
    target_sites: np.ndarray

    def __post_init__(self):
        for name in ("positions", "sublattice", "corners", "parity", "tet_positions",
                     "site_tets", "source_sites", "target_sites"):
            getattr(self, name).setflags(write=False)

    @property
    def site_count(self) -> int:
        return len(self.positions)

    @property
    def tetrahedron_count(self) -> int:
        return len(self.corners)

    def tetrahedra_of(self, site: int) -> list[int]:
        return [int(t) for t in self.site_tets[site] if t >= 0]

    def site_membership(self) -> np.ndarray:
        """Number of tetrahedra (1 or 2) each site belongs to."""
        return (self.site_tets >= 0).sum(axis=1)

    def face_sets(self) -> tuple[np.ndarray, np.ndarray]:
        return self.source_sites, self.target_sites


def _box_vertices(dims: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Diamond vertices in the closed box; returns (positions, is_a)."""
    hi = [4 * d for d in dims]
    even = np.stack(np.meshgrid(*[np.arange(0, h + 1, 2) for h in hi], indexing="ij"), -1).reshape(-1, 3)
    a = even[even.sum(axis=1) % 4 == 0]
    odd = np.stack(np.meshgrid(*[np.arange(1, h, 2) for h in hi], indexing="ij"), -1).reshape(-1, 3)
    b = odd[(odd.sum(axis=1) - 3) % 4 == 0]
    pos = np.concatenate([a, b])
    is_a = np.concatenate([np.ones(len(a), bool), np.zeros(len(b), bool)])
    return pos, is_a


def build(spec: LatticeSpec | tuple[int, int, int]) -> Lattice:
    """Construct the fully connected lattice for an ``n_x x n_y x n_z`` box."""
    if not isinstance(spec, LatticeSpec):
        spec = LatticeSpec(*spec)
    dims = spec.dims
    pos, is_a = _box_vertices(dims)
    step = np.where(is_a, 1, -1)[:, None, None] * SUBLATTICE_VECTORS[None, :, :]
    nbrs = pos[:, None, :] + step  # (V, 4, 3)

    # integer keys for membership tests; coordinates are >= -1 so shift by one
    span = np.array([4 * d + 3 for d in dims], dtype=np.int64)

    def key(p):
        p = p + 1
        return (p[..., 0] * span[1] + p[..., 1]) * span[2] + p[..., 2]

    inside = np.isin(key(nbrs), key(pos))
    keep = inside.any(axis=1)
    pos, is_a, nbrs = pos[keep], is_a[keep], nbrs[keep]

    order = np.lexsort((pos[:, 2], pos[:, 1], pos[:, 0]))
    pos, is_a, nbrs = pos[order], is_a[order], nbrs[order]

    site_pts = pos[:, None, :] + nbrs  # eighth-cell units, (T, 4, 3)
    uniq, inverse = np.unique(site_pts.reshape(-1, 3), axis=0, return_inverse=True)
    corners = inverse.reshape(-1, 4).astype(np.int64)
    q = len(uniq)
    sublattice = np.empty(q, dtype=np.int8)
    sublattice[corners] = np.arange(4, dtype=np.int8)[None, :]

    site_tets = np.full((q, 2), -1, dtype=np.int64)
    flat_sites = corners.ravel()
    flat_tets = np.repeat(np.arange(len(corners)), 4)
    by_site = np.argsort(flat_sites, kind="stable")
    s_sorted, t_sorted = flat_sites[by_site], flat_tets[by_site]
    first = np.r_[True, s_sorted[1:] != s_sorted[:-1]]
    slot = np.where(first, 0, 1)
    site_tets[s_sorted, slot] = t_sorted

    x8 = uniq[:, 0]
    source = np.flatnonzero(x8 < 4)
    target = np.flatnonzero(x8 > 8 * dims[0] - 4)

    return Lattice(
        spec=spec,
        positions=uniq / 8.0,
        sublattice=sublattice,
        corners=corners,
        parity=np.where(is_a, "A", "B"),
        tet_positions=pos / 4.0,
        site_tets=site_tets,
        source_sites=source,
        target_sites=target,
    )


def face_sets(lat: Lattice) -> tuple[np.ndarray, np.ndarray]:
    """Sites within half a cell of the -x and +x box faces."""
    return lat.face_sets()


def full_edges(lat: Lattice) -> np.ndarray:
    """All K4 edges of the fully connected lattice as an ``(E, 2)`` array."""
    i, j = np.triu_indices(4, k=1)
    return np.stack([lat.corners[:, i].ravel(), lat.corners[:, j].ravel()], axis=1)


def to_dict(lat: Lattice) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "spec": {"nx": lat.spec.n_x, "ny": lat.spec.n_y, "nz": lat.spec.n_z},
        "site_count": lat.site_count,
        "sites": [
            {"id": i, "x": float(p[0]), "y": float(p[1]), "z": float(p[2]), "sublattice": int(s)}
            for i, (p, s) in enumerate(zip(lat.positions, lat.sublattice))
        ],
        "tetrahedra": [
            {"id": t, "corners": [int(c) for c in cs], "parity": str(par)}
            for t, (cs, par) in enumerate(zip(lat.corners, lat.parity))
        ],
        "source_sites": [int(s) for s in lat.source_sites],
        "target_sites": [int(s) for s in lat.target_sites],
    }


def from_dict(doc: dict) -> Lattice:
    if doc.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} document")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported lattice format version {doc.get('version')!r}")
    spec = LatticeSpec(doc["spec"]["nx"], doc["spec"]["ny"], doc["spec"]["nz"])
    sites = doc["sites"]
    if [s["id"] for s in sites] != list(range(len(sites))):
        raise ValueError("site ids must be dense 0..Q-1 in order")
    positions = np.array([[s["x"], s["y"], s["z"]] for s in sites], dtype=float)
    sublattice = np.array([s["sublattice"] for s in sites], dtype=np.int8)
    tets = doc["tetrahedra"]
    corners = np.array([t["corners"] for t in tets], dtype=np.int64).reshape(-1, 4)
    parity = np.array([t["parity"] for t in tets])
    tet_positions = positions[corners].mean(axis=1)
    site_tets = np.full((len(sites), 2), -1, dtype=np.int64)
    fill = np.zeros(len(sites), dtype=np.int64)
    for t, cs in enumerate(corners):
        for c in cs:
            site_tets[c, fill[c]] = t
            fill[c] += 1
    return Lattice(
        spec=spec,
        positions=positions,
        sublattice=sublattice,
        corners=corners,
        parity=parity,
        tet_positions=tet_positions,
        site_tets=site_tets,
        source_sites=np.array(doc["source_sites"], dtype=np.int64),
        target_sites=np.array(doc["target_sites"], dtype=np.int64),
    )


def dumps(lat: Lattice) -> str:
    return json.dumps(to_dict(lat), separators=(",", ":"))


def loads(text: str) -> Lattice:
    return from_dict(json.loads(text))


def dump(lat: Lattice, path: str | Path) -> None:
    Path(path).write_text(dumps(lat) + "\n")


def load(path: str | Path) -> Lattice:
    return loads(Path(path).read_text())
