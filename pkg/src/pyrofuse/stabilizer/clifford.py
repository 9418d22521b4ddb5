"""Single-qubit Clifford conjugation rules and the 24-element local Clifford table.

Enumeration of the 24 elements (fixed, used for ``LocalCliffordLayer`` labels):
an element ``C`` is identified by the signed images ``C X C^dag`` and
``C Z C^dag``. The X image is ranked in the order ``+X -X +Y -Y +Z -Z`` and
the Z image in the order ``+Z -Z +X -X +Y -Y`` restricted to the four
choices that anticommute with the X image, giving
``index = 4 * x_rank + z_rank``. Index 0 is the identity and index 16 is H.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Mapping

GATES = ("H", "S", "X", "Y", "Z")

_INVERSE_WORD = {"H": "H", "S": "SSS", "X": "X", "Y": "Y", "Z": "Z"}

_X_ORDER = ("+X", "-X", "+Y", "-Y", "+Z", "-Z")
_Z_ORDER = ("+Z", "-Z", "+X", "-X", "+Y", "-Y")
_LETTER_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def conjugate(gate: str, x: int, z: int, r: int, q: int) -> tuple[int, int, int]:
    """Image of the signed Pauli ``(x, z, r)`` under ``G P G^dag`` with ``G`` on qubit ``q``."""
    m = 1 << q
    xb = 1 if x & m else 0
    zb = 1 if z & m else 0
    if gate == "H":
        r ^= xb & zb
        if xb != zb:
            x ^= m
            z ^= m
    elif gate == "S":
        r ^= xb & zb
        if xb:
            z ^= m
    elif gate == "X":
        r ^= zb
    elif gate == "Z":
        r ^= xb
    elif gate == "Y":
        r ^= xb ^ zb
    else:
        raise ValueError(f"unknown gate {gate!r}; expected one of {GATES}")
    return x, z, r


def inverse_word(word: str) -> str:
    return "".join(_INVERSE_WORD[g] for g in reversed(word))


def _signed_letter(x: int, z: int, r: int) -> str:
    letter = {(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(x, z)]
    return ("-" if r else "+") + letter


def word_images(word: str) -> tuple[str, str]:
    """Signed images of X and Z under the gate sequence ``word`` (applied left to right)."""
    images = []
    for x, z in ((1, 0), (0, 1)):
        r = 0
        for g in word:
            x, z, r = conjugate(g, x, z, r, 0)
        images.append(_signed_letter(x, z, r))
    return images[0], images[1]


def index_of_images(x_image: str, z_image: str) -> int:
    xr = _X_ORDER.index(x_image)
    z_choices = [p for p in _Z_ORDER if p[1] != x_image[1]]
    return 4 * xr + z_choices.index(z_image)


@dataclass(frozen=True)
class SingleQubitClifford:
    index: int
    x_image: str
    z_image: str
    word: str  # shortest H/S word realizing the element


def _build_table() -> tuple[SingleQubitClifford, ...]:
    found: dict[int, str] = {}
    queue = deque([""])
    while queue:
        word = queue.popleft()
        idx = index_of_images(*word_images(word))
        if idx in found:
            continue
        found[idx] = word
        queue.extend(word + g for g in "HS")
    if len(found) != 24:
        raise RuntimeError(f"expected 24 single-qubit Cliffords, found {len(found)}")
    return tuple(
        SingleQubitClifford(i, *word_images(found[i]), found[i]) for i in range(24)
    )


CLIFFORDS: tuple[SingleQubitClifford, ...] = _build_table()
IDENTITY = 0
HADAMARD = index_of_images("+Z", "+X")


def index_of_word(word: str) -> int:
    return index_of_images(*word_images(word))


def is_pauli_index(index: int) -> bool:
    c = CLIFFORDS[index]
    return c.x_image[1] == "X" and c.z_image[1] == "Z"


@dataclass(frozen=True)
class LocalCliffordLayer:
    """One single-qubit Clifford label per qubit, keyed by qubit label."""

    labels: Mapping[Hashable, int] = field(default_factory=dict)

    def __post_init__(self):
        for q, idx in self.labels.items():
            if not 0 <= idx < 24:
                raise ValueError(f"Clifford index {idx} for qubit {q!r} out of range")

    @classmethod
    def identity(cls, qubits) -> LocalCliffordLayer:
        return cls({q: IDENTITY for q in qubits})

    def word(self, q: Hashable) -> str:
        return CLIFFORDS[self.labels[q]].word

    def is_identity(self) -> bool:
        return all(idx == IDENTITY for idx in self.labels.values())

    def is_pauli(self) -> bool:
        """True when every element is a Pauli (only signs differ from the identity)."""
        return all(is_pauli_index(idx) for idx in self.labels.values())

    def nontrivial(self) -> dict[Hashable, int]:
        return {q: idx for q, idx in self.labels.items() if idx != IDENTITY}
