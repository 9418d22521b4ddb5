"""Counter-based random streams keyed by (seed, trial, kind, entity).

Each ``(seed, trial, kind, stream)`` tuple derives a Philox key; the draw for
entity ``i`` is output ``i`` of that keyed counter sequence. Results therefore
do not depend on the order in which entities or trials are visited.
"""

from __future__ import annotations

import numpy as np

KINDS = {"tet": 1, "site": 2, "pair": 3}
_UINT64_MAX = (1 << 64) - 1
_TO_UNIT = 2.0 ** -53


def _check(seed: int, trial: int, stream: int):
    for name, v in (("seed", seed), ("trial", trial), ("stream", stream)):
        if not 0 <= int(v) <= _UINT64_MAX:
            raise ValueError(f"{name} must fit in an unsigned 64-bit integer, got {v}")


def stream_key(seed: int, trial: int, kind: str, stream: int = 0) -> np.ndarray:
    _check(seed, trial, stream)
    try:
        code = KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown stream kind {kind!r}; expected one of {sorted(KINDS)}") from None
    ss = np.random.SeedSequence([int(seed), int(trial), code, int(stream)])
    return ss.generate_state(2, np.uint64)


def _generator(seed, trial, kind, stream) -> np.random.Philox:
    return np.random.Philox(key=stream_key(seed, trial, kind, stream))


def _to_unit(raw: np.ndarray) -> np.ndarray:
    return (raw >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def uniforms(seed: int, trial: int, kind: str, count: int, stream: int = 0) -> np.ndarray:
    """Draws in ``[0, 1)`` for entities ``0..count-1`` of one stream."""
    if count == 0:
        return np.empty(0)
    return _to_unit(_generator(seed, trial, kind, stream).random_raw(count))


def uniform_at(seed: int, trial: int, kind: str, entity: int, stream: int = 0) -> float:
    """Draw for a single entity, without generating the ones before it."""
    bg = _generator(seed, trial, kind, stream)
    # Philox4x64 yields four outputs per counter step
    bg.advance(entity // 4)
    return float(_to_unit(bg.random_raw(4))[entity % 4])
