"""Stabilizer states on labelled qubits with Bell-measurement fusion.

Generators are stored row-wise as integer bit masks (``x``, ``z``) plus a sign
bit ``r``. Qubit labels are stable: operations take labels, and removing
qubits never renames the survivors.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

from .clifford import (
    CLIFFORDS,
    GATES,
    LocalCliffordLayer,
    conjugate,
    index_of_word,
    inverse_word,
)
from .graphs import GraphState
from .pauli import PauliOperator, anticommutes, multiply

# Checks tableau invariants after every mutation; tests switch this on.
DEBUG = os.environ.get("PYROFUSE_DEBUG", "") not in ("", "0")

BRANCHES = ("phi+", "phi-", "psi+", "psi-")
# (sign of X_a X_b, sign of Z_a Z_b) for each Bell state
_BRANCH_SIGNS = {"phi+": (1, 1), "phi-": (-1, 1), "psi+": (1, -1), "psi-": (-1, -1)}


class StabilizerError(ValueError):
    pass


class OutcomeConflictError(StabilizerError):
    """A forced measurement sign contradicts a deterministic outcome."""


class EntangledQubitError(StabilizerError):
    """Attempt to remove qubits that are still entangled with the rest."""


@dataclass(frozen=True)
class FusionOutcome:
    """Result tag of a probabilistic Bell measurement.

    A success carries the Bell branch; a failure carries the two single-qubit
    collapse signs (``za`` on the plain qubit, ``xb`` on the Hadamard side).
    """

    success: bool
    branch: str | None = None
    za: int | None = None
    xb: int | None = None

    def __post_init__(self):
        if self.success:
            if self.branch not in BRANCHES or self.za is not None or self.xb is not None:
                raise ValueError(f"success needs a branch in {BRANCHES} and no failure signs")
        else:
            if self.branch is not None or self.za not in (1, -1) or self.xb not in (1, -1):
                raise ValueError("failure needs za, xb in {+1, -1} and no branch")

    @classmethod
    def succeeded(cls, branch: str = "phi+") -> FusionOutcome:
        return cls(True, branch=branch)

    @classmethod
    def failed(cls, za: int = 1, xb: int = 1) -> FusionOutcome:
        return cls(False, za=za, xb=xb)

    @classmethod
    def random(cls, rng, p_success: float) -> FusionOutcome:
        """Success with probability ``p_success`` and equal weights on every branch."""
        if rng.random() < p_success:
            return cls.succeeded(BRANCHES[int(rng.random() * 4) % 4])
        return cls.failed(1 if rng.random() < 0.5 else -1, 1 if rng.random() < 0.5 else -1)

    @classmethod
    def all(cls) -> list[FusionOutcome]:
        return [cls.succeeded(b) for b in BRANCHES] + [
            cls.failed(za, xb) for za in (1, -1) for xb in (1, -1)
        ]

    def __str__(self) -> str:
        if self.success:
            return f"success({self.branch})"
        return f"failure({self.za:+d},{self.xb:+d})"


@dataclass(frozen=True)
class PairResidual:
    """State left on the two measured qubits after ``fuse``."""

    qubits: tuple
    outcome: FusionOutcome
    stabilizers: tuple[str, str]


class StabilizerState:
    """Pure ``n``-qubit stabilizer state.

    Mutating methods work in place and return ``self`` so calls can be chained;
    use :meth:`copy` to branch.
    """

    def __init__(self, generators: Sequence[PauliOperator | str], labels: Sequence[Hashable] | None = None):
        paulis = [PauliOperator.from_label(g) if isinstance(g, str) else g for g in generators]
        if not paulis:
            raise ValueError("at least one generator is required")
        n = paulis[0].n
        if len(paulis) != n or any(p.n != n for p in paulis):
            raise ValueError(f"need exactly n generators on n qubits, got {len(paulis)} on {n}")
        self._x = [p.x for p in paulis]
        self._z = [p.z for p in paulis]
        self._r = [p.r for p in paulis]
        self._set_labels(list(range(n)) if labels is None else list(labels))
        self.check_invariants()

    def _set_labels(self, labels: list):
        if len(labels) != len(self._x):
            raise ValueError("one label per qubit required")
        if len(set(labels)) != len(labels):
            raise ValueError("qubit labels must be unique")
        self.labels = labels
        self._pos = {q: i for i, q in enumerate(labels)}

    @property
    def n(self) -> int:
        return len(self._x)

    @property
    def generators(self) -> list[PauliOperator]:
        return [PauliOperator(self.n, x, z, -1 if r else 1) for x, z, r in zip(self._x, self._z, self._r)]

    def copy(self) -> StabilizerState:
        new = object.__new__(StabilizerState)
        new._x, new._z, new._r = list(self._x), list(self._z), list(self._r)
        new._set_labels(list(self.labels))
        return new

    def position(self, q: Hashable) -> int:
        try:
            return self._pos[q]
        except KeyError:
            raise IndexError(f"no qubit labelled {q!r}") from None

    def pauli(self, letters: dict[Hashable, str], sign: int = 1) -> PauliOperator:
        """Pauli operator in this state's qubit order, given ``{label: letter}``."""
        return PauliOperator.on(self.n, {self.position(q): ch for q, ch in letters.items()}, sign)

    # -- invariants -----------------------------------------------------

    def check_invariants(self):
        """Raise ``AssertionError`` unless generators commute and are independent."""
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                if anticommutes(self._x[i], self._z[i], self._x[j], self._z[j]):
                    raise AssertionError(f"generators {i} and {j} anticommute")
        if _gf2_rank([x | (z << n) for x, z in zip(self._x, self._z)]) != n:
            raise AssertionError("generators are not independent")

    def _mutated(self):
        if DEBUG:
            self.check_invariants()

    # -- unitary updates ------------------------------------------------

    def apply_local(self, q: Hashable, gate: str) -> StabilizerState:
        """Conjugate every generator by a single-qubit gate in ``{H, S, X, Y, Z}``."""
        if gate not in GATES:
            raise ValueError(f"unknown gate {gate!r}; expected one of {GATES}")
        k = self.position(q)
        for i in range(self.n):
            self._x[i], self._z[i], self._r[i] = conjugate(gate, self._x[i], self._z[i], self._r[i], k)
        self._mutated()
        return self

    def apply_word(self, q: Hashable, word: str) -> StabilizerState:
        for gate in word:
            self.apply_local(q, gate)
        return self

    def apply_layer(self, layer: LocalCliffordLayer) -> StabilizerState:
        for q, idx in layer.labels.items():
            self.apply_word(q, CLIFFORDS[idx].word)
        return self

    def apply_cz(self, a: Hashable, b: Hashable) -> StabilizerState:
        ia, ib = self.position(a), self.position(b)
        if ia == ib:
            raise ValueError("controlled-Z needs two distinct qubits")
        ma, mb = 1 << ia, 1 << ib
        for i in range(self.n):
            x, z = self._x[i], self._z[i]
            xa, xb = bool(x & ma), bool(x & mb)
            if xa and xb and (bool(z & ma) != bool(z & mb)):
                self._r[i] ^= 1
            if xb:
                z ^= ma
            if xa:
                z ^= mb
            self._z[i] = z
        self._mutated()
        return self

    # -- group queries --------------------------------------------------

    def _row_product(self, mask: int) -> tuple[int, int, int]:
        x = z = r = 0
        i = 0
        while mask:
            if mask & 1:
                x, z, r = multiply(x, z, r, self._x[i], self._z[i], self._r[i])
            mask >>= 1
            i += 1
        return x, z, r

    def stabilizer_sign(self, p: PauliOperator) -> int | None:
        """+1 or -1 if ``±p`` stabilizes the state, ``None`` if neither does."""
        if p.n != self.n:
            raise ValueError(f"operator acts on {p.n} qubits, state has {self.n}")
        for i in range(self.n):
            if anticommutes(self._x[i], self._z[i], p.x, p.z):
                return None
        combo = _solve_gf2([x | (z << self.n) for x, z in zip(self._x, self._z)], p.x | (p.z << self.n))
        if combo is None:
            return None
        x, z, r = self._row_product(combo)
        assert (x, z) == (p.x, p.z)
        return p.sign * (-1 if r else 1)

    def same_state(self, other: StabilizerState) -> bool:
        """Equality of the stabilized states (same labels, same signed group)."""
        if set(self.labels) != set(other.labels):
            return False
        for g in other.generators:
            letters = {other.labels[k]: g.letter(k) for k in range(other.n) if g.letter(k) != "I"}
            if self.stabilizer_sign(self.pauli(letters, g.sign)) != 1:
                return False
        return True

    # -- measurement ----------------------------------------------------

    def measure_pauli(self, p: PauliOperator, forced: int | None = None, rng=None) -> int:
        """Measure the Pauli observable ``p`` and collapse the state.

        Deterministic outcomes leave the state unchanged. Random outcomes take
        ``forced`` when given, otherwise a fair draw from ``rng`` (anything with
        a ``random()`` method).

        Raises:
            OutcomeConflictError: ``forced`` disagrees with a deterministic outcome.
        """
        if p.n != self.n:
            raise ValueError(f"operator acts on {p.n} qubits, state has {self.n}")
        if forced not in (None, 1, -1):
            raise ValueError("forced outcome must be +1, -1 or None")
        anti = [i for i in range(self.n) if anticommutes(self._x[i], self._z[i], p.x, p.z)]
        if not anti:
            value = self.stabilizer_sign(p)
            if forced is not None and forced != value:
                raise OutcomeConflictError(f"outcome of {p} is fixed at {value:+d}, forced {forced:+d}")
            return value
        if forced is None:
            if rng is None:
                raise ValueError("random outcome needs either a forced sign or an rng")
            forced = 1 if rng.random() < 0.5 else -1
        k = anti[0]
        for i in anti[1:]:
            self._x[i], self._z[i], self._r[i] = multiply(
                self._x[i], self._z[i], self._r[i], self._x[k], self._z[k], self._r[k]
            )
        self._x[k], self._z[k] = p.x, p.z
        self._r[k] = 0 if p.sign * forced == 1 else 1
        self._mutated()
        return forced

    def measure(self, letters: dict[Hashable, str], forced: int | None = None, rng=None) -> int:
        """Label-based shorthand for :meth:`measure_pauli`."""
        return self.measure_pauli(self.pauli(letters), forced=forced, rng=rng)

    def fuse(self, a: Hashable, b: Hashable, outcome: FusionOutcome) -> PairResidual:
        """Bell-measurement fusion of qubits ``a`` (plain) and ``b`` (Hadamard side).

        ``H`` is applied to ``b`` first. A success projects the pair onto the
        Bell branch via ``X_a X_b`` and ``Z_a Z_b``; a failure collapses ``a``
        in Z with sign ``za`` and ``b`` in Z (post-Hadamard) with sign ``xb``.
        Either way ``a`` and ``b`` end up disentangled from everything else;
        they stay in the state until :meth:`remove_qubits`.
        """
        if a == b:
            raise ValueError("fusion needs two distinct qubits")
        self.position(a), self.position(b)
        self.apply_local(b, "H")
        if outcome.success:
            sxx, szz = _BRANCH_SIGNS[outcome.branch]
            self.measure({a: "X", b: "X"}, forced=sxx)
            self.measure({a: "Z", b: "Z"}, forced=szz)
            stabs = (_sign_char(sxx) + "XX", _sign_char(szz) + "ZZ")
        else:
            self.measure({a: "Z"}, forced=outcome.za)
            self.measure({b: "Z"}, forced=outcome.xb)
            stabs = (_sign_char(outcome.za) + "ZI", _sign_char(outcome.xb) + "IZ")
        return PairResidual((a, b), outcome, stabs)

    # -- removal --------------------------------------------------------

    def remove_qubits(self, qubits: Iterable[Hashable]) -> StabilizerState:
        """Trace out qubits that are in a product with the rest.

        Raises:
            EntangledQubitError: some listed qubit is entangled with the complement.
        """
        drop = {self.position(q) for q in qubits}
        if not drop:
            return self
        if len(drop) == self.n:
            raise ValueError("cannot remove every qubit")
        n = self.n
        keep = [i for i in range(n) if i not in drop]
        drop_mask = sum(1 << i for i in drop)
        rows = list(zip(self._x, self._z, self._r))
        # eliminate the dropped columns; rows left untouched live on the kept qubits only
        cols = [(True, i) for i in sorted(drop)] + [(False, i) for i in sorted(drop)]
        pivot_row = 0
        for is_x, c in cols:
            bit = 1 << c
            sel = next(
                (i for i in range(pivot_row, n) if (rows[i][0] if is_x else rows[i][1]) & bit),
                None,
            )
            if sel is None:
                continue
            rows[pivot_row], rows[sel] = rows[sel], rows[pivot_row]
            px, pz, pr = rows[pivot_row]
            for i in range(n):
                if i != pivot_row and (rows[i][0] if is_x else rows[i][1]) & bit:
                    rows[i] = multiply(*rows[i], px, pz, pr)
            pivot_row += 1
        if pivot_row != len(drop):
            bad = [self.labels[i] for i in sorted(drop)]
            raise EntangledQubitError(f"qubits {bad!r} are entangled with the remaining qubits")
        kept_rows = rows[pivot_row:]
        assert all(not ((x | z) & drop_mask) for x, z, _ in kept_rows)
        new_x, new_z, new_r = [], [], []
        for x, z, r in kept_rows:
            new_x.append(_compress(x, keep))
            new_z.append(_compress(z, keep))
            new_r.append(r)
        self._x, self._z, self._r = new_x, new_z, new_r
        self._set_labels([self.labels[i] for i in keep])
        self._mutated()
        return self

    def __str__(self) -> str:
        return "\n".join(str(g) for g in self.generators)

    def __repr__(self) -> str:
        return f"StabilizerState(labels={self.labels!r}, generators={[str(g) for g in self.generators]!r})"


def _sign_char(s: int) -> str:
    return "+" if s == 1 else "-"


def _compress(mask: int, keep: list[int]) -> int:
    out = 0
    for new, old in enumerate(keep):
        if mask >> old & 1:
            out |= 1 << new
    return out


def _gf2_rank(rows: list[int]) -> int:
    basis: dict[int, int] = {}
    for v in rows:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


def _solve_gf2(rows: list[int], target: int) -> int | None:
    """Bit mask of rows whose XOR equals ``target``, or ``None``."""
    basis: dict[int, tuple[int, int]] = {}
    for i, v in enumerate(rows):
        combo = 1 << i
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = (v, combo)
                break
            bv, bc = basis[top]
            v ^= bv
            combo ^= bc
    combo = 0
    while target:
        top = target.bit_length() - 1
        if top not in basis:
            return None
        bv, bc = basis[top]
        target ^= bv
        combo ^= bc
    return combo


def graph_state(g: GraphState) -> StabilizerState:
    """Stabilizer state with generators ``X_v prod_{w in N(v)} Z_w``, all signs +1."""
    n = g.n
    gens = []
    for i in range(n):
        z = sum(1 << int(j) for j in np.flatnonzero(g.adjacency[i]))
        gens.append(PauliOperator(n, 1 << i, z, 1))
    return StabilizerState(gens, g.labels)


def to_graph_form(state: StabilizerState) -> tuple[GraphState, LocalCliffordLayer]:
    """Graph ``g`` and local Clifford layer ``L`` with ``L |g> = |state>``.

    The round trip is checked before returning.
    """
    work = state.copy()
    n = work.n
    applied: list[list[str]] = [[] for _ in range(n)]

    def gate(k: int, name: str):
        work.apply_local(work.labels[k], name)
        applied[k].append(name)

    while True:
        pivots = _reduce_x(work)
        if len(pivots) == n:
            break
        # first row without X support; it must touch some non-pivot column in Z
        row = len(pivots)
        free = work._z[row] & ~sum(1 << c for c in pivots)
        gate((free & -free).bit_length() - 1, "H")

    # rows now read X_j (Z part) with X part the identity
    for j in range(n):
        if work._z[j] >> j & 1:
            gate(j, "S")
    for j in range(n):
        if work._r[j]:
            gate(j, "Z")

    adj = np.zeros((n, n), dtype=bool)
    for j in range(n):
        assert work._x[j] == 1 << j and work._r[j] == 0
        for k in range(n):
            adj[j, k] = bool(work._z[j] >> k & 1)
    g = GraphState(adj, tuple(state.labels))
    layer = LocalCliffordLayer(
        {state.labels[k]: index_of_word(inverse_word("".join(applied[k]))) for k in range(n)}
    )
    check = graph_state(g).apply_layer(layer)
    if not check.same_state(state):
        raise RuntimeError("graph-form round trip failed")
    return g, layer


def _reduce_x(state: StabilizerState) -> list[int]:
    """Gauss-Jordan on the X block in place; returns pivot columns in row order."""
    n = state.n
    xs, zs, rs = state._x, state._z, state._r
    pivots = []
    row = 0
    for c in range(n):
        bit = 1 << c
        sel = next((i for i in range(row, n) if xs[i] & bit), None)
        if sel is None:
            continue
        xs[row], xs[sel] = xs[sel], xs[row]
        zs[row], zs[sel] = zs[sel], zs[row]
        rs[row], rs[sel] = rs[sel], rs[row]
        for i in range(n):
            if i != row and xs[i] & bit:
                xs[i], zs[i], rs[i] = multiply(xs[i], zs[i], rs[i], xs[row], zs[row], rs[row])
        pivots.append(c)
        row += 1
    return pivots
