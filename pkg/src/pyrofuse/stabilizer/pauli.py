"""Hermitian Pauli operators packed into integer bit masks.

Bit ``k`` of ``x`` / ``z`` refers to qubit ``k``. A qubit with both bits set
carries ``Y`` (the Hermitian ``iXZ``), so every operator here is Hermitian
and its sign is just +1 or -1.
"""

from __future__ import annotations

from dataclasses import dataclass

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTERS.items()}


def phase_exponent(x1: int, z1: int, x2: int, z2: int) -> int:
    """Power of ``i`` picked up when multiplying two unsigned Paulis.

    Sum over qubits of the Aaronson-Gottesman ``g`` function, computed with
    popcounts instead of a per-qubit loop.
    """
    y1 = x1 & z1
    xo = x1 & ~z1
    zo = z1 & ~x1
    x_only2 = x2 & ~z2
    z_only2 = z2 & ~x2
    y2 = x2 & z2
    total = (
        (y1 & z_only2).bit_count()
        - (y1 & x_only2).bit_count()
        + (xo & y2).bit_count()
        - (xo & z_only2).bit_count()
        + (zo & x_only2).bit_count()
        - (zo & y2).bit_count()
    )
    return total % 4


def anticommutes(x1: int, z1: int, x2: int, z2: int) -> bool:
    return bool((((x1 & z2) ^ (z1 & x2)).bit_count()) & 1)


def multiply(x1: int, z1: int, r1: int, x2: int, z2: int, r2: int) -> tuple[int, int, int]:
    """Product of two signed commuting Paulis as ``(x, z, r)``; ``r`` is the sign bit."""
    total = (2 * r1 + 2 * r2 + phase_exponent(x1, z1, x2, z2)) % 4
    if total & 1:
        raise ValueError("product of anticommuting Paulis is not Hermitian")
    return x1 ^ x2, z1 ^ z2, total >> 1


@dataclass(frozen=True)
class PauliOperator:
    """Signed Pauli string on ``n`` qubits.

    Args:
        n: number of qubits.
        x: X bit mask.
        z: Z bit mask.
        sign: +1 or -1.
    """

    n: int
    x: int = 0
    z: int = 0
    sign: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a Pauli operator needs at least one qubit")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("mask exceeds qubit count")

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> PauliOperator:
        """Parse strings like ``"+XZI"`` or ``"-YY"``; character ``k`` acts on qubit ``k``."""
        sign = 1
        if label and label[0] in "+-":
            sign = -1 if label[0] == "-" else 1
            label = label[1:]
        x = z = 0
        for k, ch in enumerate(label.upper()):
            if ch not in _BITS:
                raise ValueError(f"bad Pauli letter {ch!r}")
            bx, bz = _BITS[ch]
            x |= bx << k
            z |= bz << k
        return cls(len(label), x, z, sign)

    @classmethod
    def on(cls, n: int, letters: dict[int, str], sign: int = 1) -> PauliOperator:
        """Build from a sparse ``{qubit: letter}`` mapping."""
        x = z = 0
        for q, ch in letters.items():
            if not 0 <= q < n:
                raise IndexError(f"qubit {q} outside 0..{n - 1}")
            bx, bz = _BITS[ch.upper()]
            x |= bx << q
            z |= bz << q
        return cls(n, x, z, sign)

    @property
    def r(self) -> int:
        return 0 if self.sign == 1 else 1

    @property
    def support(self) -> int:
        return self.x | self.z

    def weight(self) -> int:
        return self.support.bit_count()

    def letter(self, q: int) -> str:
        return _LETTERS[((self.x >> q) & 1, (self.z >> q) & 1)]

    def commutes(self, other: PauliOperator) -> bool:
        self._check_size(other)
        return not anticommutes(self.x, self.z, other.x, other.z)

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        self._check_size(other)
        x, z, r = multiply(self.x, self.z, self.r, other.x, other.z, other.r)
        return PauliOperator(self.n, x, z, -1 if r else 1)

    def __neg__(self) -> PauliOperator:
        return PauliOperator(self.n, self.x, self.z, -self.sign)

    def _check_size(self, other: PauliOperator):
        if self.n != other.n:
            raise ValueError(f"qubit count mismatch: {self.n} vs {other.n}")

    def __str__(self) -> str:
        return ("+" if self.sign == 1 else "-") + "".join(self.letter(q) for q in range(self.n))
