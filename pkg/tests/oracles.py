"""Independent reference implementations used by the tests.

Nothing here imports the package's algorithms: a dense state-vector simulator
for small qubit counts, a brute-force diamond-bond lattice builder and a
breadth-first cluster finder.
"""

from __future__ import annotations

import itertools
from collections import deque

import numpy as np

# -- dense state vectors (qubit k is bit k of the basis index) -------------

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
S = np.diag([1, 1j])
PX = np.array([[0, 1], [1, 0]])
PY = np.array([[0, -1j], [1j, 0]])
PZ = np.diag([1, -1])
GATE = {"H": H, "S": S, "X": PX, "Y": PY, "Z": PZ, "I": np.eye(2)}


def graph_vector(n: int, edges) -> np.ndarray:
    idx = np.arange(2 ** n)
    phase = np.zeros(2 ** n, dtype=int)
    for a, b in edges:
        phase += (idx >> a) & (idx >> b) & 1
    return ((-1.0) ** phase / np.sqrt(2 ** n)).astype(complex)


def apply_1q(psi: np.ndarray, n: int, q: int, u: np.ndarray) -> np.ndarray:
    t = psi.reshape([2] * n)  # axis n-1-q is qubit q
    t = np.moveaxis(np.tensordot(u, t, axes=([1], [n - 1 - q])), 0, n - 1 - q)
    return t.reshape(-1)


def apply_pauli_string(psi: np.ndarray, n: int, letters: dict[int, str], sign: int = 1) -> np.ndarray:
    out = psi
    for q, ch in letters.items():
        out = apply_1q(out, n, q, GATE[ch])
    return sign * out


def project(psi, n, letters, sign) -> np.ndarray:
    """Project onto the ``sign`` eigenspace of a Pauli string and renormalise."""
    out = (psi + apply_pauli_string(psi, n, letters, sign)) / 2
    norm = np.linalg.norm(out)
    if norm < 1e-9:
        raise ValueError("outcome has zero probability")
    return out / norm


def pauli_letters(p) -> dict[int, str]:
    """``{qubit: letter}`` of a package ``PauliOperator`` (read through its string form)."""
    s = str(p)
    return {k: ch for k, ch in enumerate(s[1:]) if ch != "I"}


def stabilizes(psi, n, letters, sign) -> bool:
    return np.allclose(apply_pauli_string(psi, n, letters, sign), psi, atol=1e-9)


def same_up_to_phase(a, b) -> bool:
    return abs(abs(np.vdot(a, b)) - 1) < 1e-9


# -- small graphs ----------------------------------------------------------


def all_graphs(n: int):
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(2 ** len(pairs)):
        yield [pairs[i] for i in range(len(pairs)) if bits >> i & 1]


def connected(n: int, edges) -> bool:
    if n == 0:
        return False
    adj = {v: set() for v in range(n)}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    seen, todo = {0}, [0]
    while todo:
        for w in adj[todo.pop()]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen) == n


def connected_graphs_upto(n_max: int):
    """All connected labelled graphs on 1..n_max vertices as ``(n, edges)``."""
    for n in range(1, n_max + 1):
        for edges in all_graphs(n):
            if connected(n, edges):
                yield n, edges


def fusion_rule(n1, e1, n2, e2):
    """Expected graph after fusing vertex 0 of graph 1 with vertex 0 of graph 2.

    Vertices are renamed ``("a", v)`` and ``("b", v)``; the fused pair is
    deleted and every neighbour of one is joined to every neighbour of the other.
    """
    na = {w for a, b in e1 for v, w in ((a, b), (b, a)) if v == 0}
    nb = {w for a, b in e2 for v, w in ((a, b), (b, a)) if v == 0}
    nodes = [("a", v) for v in range(1, n1)] + [("b", v) for v in range(1, n2)]
    edges = [(("a", a), ("a", b)) for a, b in e1 if 0 not in (a, b)]
    edges += [(("b", a), ("b", b)) for a, b in e2 if 0 not in (a, b)]
    edges += [(("a", u), ("b", w)) for u in sorted(na) for w in sorted(nb)]
    return nodes, edges


# -- lattice ---------------------------------------------------------------


def brute_force_sites(nx: int, ny: int, nz: int) -> set[tuple[int, int, int]]:
    """Pyrochlore sites of a closed box, in units of 1/8 cell.

    Diamond atoms (quarter-cell units) are the fcc points (all even, sum % 4 == 0)
    and the same shifted by (1,1,1). An atom is kept when it lies in the box and
    has a bonded neighbour in the box; every bond of a kept atom contributes its
    midpoint, including bonds that leave the box.
    """
    lim = (4 * nx, 4 * ny, 4 * nz)
    inside = lambda p: all(0 <= p[i] <= lim[i] for i in range(3))  # noqa: E731
    grid = itertools.product(*(range(0, m + 1) for m in lim))
    atoms = []
    for p in grid:
        if all(c % 2 == 0 for c in p) and sum(p) % 4 == 0:
            atoms.append((p, 1))
        elif all(c % 2 == 1 for c in p) and (sum(p) - 3) % 4 == 0:
            atoms.append((p, -1))
    bonds = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    sites = set()
    for p, sgn in atoms:
        nbrs = [tuple(p[i] + sgn * d[i] for i in range(3)) for d in bonds]
        if not any(inside(q) for q in nbrs):
            continue
        for q in nbrs:
            sites.add(tuple(p[i] + q[i] for i in range(3)))
    return sites


def table_q(nx: int, ny: int, nz: int) -> int:
    """Closed form fitted to the reference site counts."""
    return 16 * nx * ny * nz + 8 * (nx * ny + ny * nz + nx * nz) + 4 * (nx + ny + nz) - 12


# -- percolation -----------------------------------------------------------

MATCHINGS = {0: [(0, 1), (2, 3)], 1: [(0, 2), (1, 3)], 2: [(0, 3), (1, 2)]}
K4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def realised_edges(corners, alive, matching, retained):
    edges = []
    for t, tet in enumerate(corners):
        pairs = K4 if alive[t] else MATCHINGS[int(matching[t])]
        for i, j in pairs:
            a, b = int(tet[i]), int(tet[j])
            if retained[a] and retained[b]:
                edges.append((a, b))
    return edges


def bfs_components(n_sites, edges, retained) -> list[frozenset]:
    adj = [[] for _ in range(n_sites)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * n_sites
    comps = []
    for s in range(n_sites):
        if seen[s] or not retained[s]:
            continue
        seen[s] = True
        comp, todo = [s], deque([s])
        while todo:
            for w in adj[todo.popleft()]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    todo.append(w)
        comps.append(frozenset(comp))
    return comps


def bfs_largest_spanning(comps, source, target) -> int:
    src, tgt = set(map(int, source)), set(map(int, target))
    sizes = [len(c) for c in comps if c & src and c & tgt]
    return max(sizes, default=0)
