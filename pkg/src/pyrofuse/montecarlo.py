"""Probability sweeps, threshold estimation and lattice-size scans.

All aggregation is integer addition (spanning counts and summed spanning
cluster sizes), so results do not depend on the number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .lattice import Lattice, LatticeSpec, build
from .percolation import PAIRINGS, draw_trial, spanning_size
from .stats import wilson_interval

# (n_x, n_y, n_z, site count, reported spanning probability at p = 0.75)
TABLE1 = (
    (4, 4, 4, 1444, 0.96),
    (5, 5, 3, 1680, 0.91),
    (6, 6, 3, 2352, 0.91),
    (7, 7, 3, 3136, 0.92),
    (8, 7, 3, 3556, 0.93),
    (9, 7, 3, 3976, 0.90),
    (10, 8, 3, 4984, 0.94),
    (11, 8, 3, 5460, 0.94),
    (12, 9, 3, 6636, 0.96),
    (13, 9, 3, 7168, 0.92),
    (14, 9, 3, 7700, 0.92),
    (15, 9, 3, 8232, 0.91),
)

_P_DIGITS = 9


def _round_p(p: float) -> float:
    return round(p, _P_DIGITS)


def _uncoupled_stream(p: float) -> int:
    return 1 + int(round(p * 1_000_000))


def _retention(p: float, site_deletion_prob: float | None) -> float:
    return p * p if site_deletion_prob is None else 1.0 - site_deletion_prob


def count_spanning(
    lat: Lattice,
    ps: list[float],
    trials: int,
    seed: int = 0,
    pairing: str = "fixed",
    coupled: bool = True,
    site_deletion_prob: float | None = None,
    threads: int = 1,
    first_trial: int = 0,
) -> list[tuple[int, int]]:
    """Per ``p``: (number of spanning trials, summed largest-spanning-cluster sizes).

    Coupled runs draw each trial's uniforms once and threshold them at every
    ``p``; uncoupled runs key the draws on ``p`` as well.
    """
    if pairing not in PAIRINGS:
        raise ValueError(f"pairing must be one of {PAIRINGS}, got {pairing!r}")

    def one_trial(trial: int) -> list[int]:
        if coupled:
            draws = draw_trial(lat, seed, trial, pairing)
            return [spanning_size(lat, draws, p, _retention(p, site_deletion_prob)) for p in ps]
        out = []
        for p in ps:
            draws = draw_trial(lat, seed, trial, pairing, stream=_uncoupled_stream(p))
            out.append(spanning_size(lat, draws, p, _retention(p, site_deletion_prob)))
        return out

    trial_ids = range(first_trial, first_trial + trials)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_trial = list(pool.map(one_trial, trial_ids))
    else:
        per_trial = [one_trial(t) for t in trial_ids]

    totals = []
    for j in range(len(ps)):
        sizes = [row[j] for row in per_trial]
        totals.append((sum(1 for s in sizes if s > 0), sum(sizes)))
    return totals


def spanning_indicators(
    lat: Lattice, ps: list[float], trial: int, seed: int = 0, pairing: str = "fixed",
    site_deletion_prob: float | None = None,
) -> list[bool]:
    """Spanning indicator of one coupled trial at each ``p``."""
    draws = draw_trial(lat, seed, trial, pairing)
    return [spanning_size(lat, draws, p, _retention(p, site_deletion_prob)) > 0 for p in ps]


@dataclass(frozen=True)
class SweepSpec:
    spec: LatticeSpec
    p_min: float
    p_max: float
    p_step: float
    trials: int
    seed: int = 0
    pairing: str = "fixed"
    coupled: bool = False
    site_deletion_prob: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p_min <= self.p_max <= 1.0:
            raise ValueError("need 0 <= p_min <= p_max <= 1")
        if self.p_step <= 0:
            raise ValueError("p_step must be positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.pairing not in PAIRINGS:
            raise ValueError(f"pairing must be one of {PAIRINGS}")

    def grid(self) -> list[float]:
        steps = int(math.floor((self.p_max - self.p_min) / self.p_step + 1e-9))
        return [_round_p(self.p_min + k * self.p_step) for k in range(steps + 1)]


@dataclass(frozen=True)
class SweepRow:
    p: float
    trials: int
    spanning_count: int
    spanning_size_total: int
    site_count: int

    @property
    def spanning_prob(self) -> float:
        return self.spanning_count / self.trials

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.spanning_count, self.trials)

    @property
    def mean_spanning_fraction(self) -> float:
        """Mean spanning-cluster fraction over the trials that span (0 if none do)."""
        if self.spanning_count == 0:
            return 0.0
        return self.spanning_size_total / (self.spanning_count * self.site_count)


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    site_count: int
    rows: tuple[SweepRow, ...]


def sweep(s: SweepSpec, threads: int = 1, lat: Lattice | None = None) -> SweepResult:
    lat = lat or build(s.spec)
    ps = s.grid()
    totals = count_spanning(
        lat, ps, s.trials, seed=s.seed, pairing=s.pairing, coupled=s.coupled,
        site_deletion_prob=s.site_deletion_prob, threads=threads,
    )
    rows = tuple(
        SweepRow(p, s.trials, c, size, lat.site_count) for p, (c, size) in zip(ps, totals)
    )
    return SweepResult(s, lat.site_count, rows)


@dataclass(frozen=True)
class ThresholdResult:
    """0.5-crossing of the spanning curve.

    ``p_star`` is ``None`` when the curve does not cross 0.5 inside the range.
    ``bracket`` sides are ``None`` when no evaluated point has a Wilson 95%
    interval excluding 0.5 on that side.
    """

    crossed: bool
    p_star: float | None
    bracket: tuple[float | None, float | None]
    trials: int
    points: tuple[tuple[float, int], ...] = field(default=())

    @property
    def width(self) -> float | None:
        lo, hi = self.bracket
        return None if lo is None or hi is None else hi - lo


def estimate_threshold(
    spec: LatticeSpec,
    trials: int,
    p_lo: float,
    p_hi: float,
    resolution: float,
    seed: int = 0,
    pairing: str = "fixed",
    site_deletion_prob: float | None = None,
    threads: int = 1,
    coarse_points: int = 9,
    lat: Lattice | None = None,
) -> ThresholdResult:
    """Locate the 0.5 crossing on a grid of spacing ``resolution`` by bisection.

    Draws are coupled across ``p``, so the empirical curve is monotone and the
    bisection is well defined.
    """
    if not p_lo < p_hi:
        raise ValueError("need p_lo < p_hi")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    lat = lat or build(spec)
    k_max = int(math.ceil((p_hi - p_lo) / resolution - 1e-9))
    counts: dict[int, int] = {}

    def p_of(k: int) -> float:
        return _round_p(min(p_lo + k * resolution, 1.0))

    def evaluate(ks):
        todo = sorted({k for k in ks if k not in counts})
        if todo:
            res = count_spanning(
                lat, [p_of(k) for k in todo], trials, seed=seed, pairing=pairing,
                coupled=True, site_deletion_prob=site_deletion_prob, threads=threads,
            )
            for k, (c, _) in zip(todo, res):
                counts[k] = c

    def prob(k):
        return counts[k] / trials

    def points():
        return tuple((p_of(k), counts[k]) for k in sorted(counts))

    coarse = sorted({int(round(i * k_max / (coarse_points - 1))) for i in range(coarse_points)})
    evaluate(coarse)
    if prob(0) >= 0.5 or prob(k_max) < 0.5:
        return ThresholdResult(False, None, (None, None), trials, points())

    a = max(k for k in coarse if prob(k) < 0.5)
    b = min(k for k in coarse if k > a and prob(k) >= 0.5)
    while b - a > 1:
        mid = (a + b) // 2
        evaluate([mid])
        if prob(mid) < 0.5:
            a = mid
        else:
            b = mid
    pa, pb = prob(a), prob(b)
    p_star = p_of(a) + (0.5 - pa) / (pb - pa) * (p_of(b) - p_of(a))

    def excludes_half(k, below):
        lo, hi = wilson_interval(counts[k], trials)
        return hi < 0.5 if below else lo > 0.5

    lo_k = a
    while True:
        evaluate([lo_k])
        if excludes_half(lo_k, below=True) or lo_k == 0:
            break
        lo_k -= 1
    hi_k = b
    while True:
        evaluate([hi_k])
        if excludes_half(hi_k, below=False) or hi_k == k_max:
            break
        hi_k += 1
    bracket = (
        p_of(lo_k) if excludes_half(lo_k, below=True) else None,
        p_of(hi_k) if excludes_half(hi_k, below=False) else None,
    )
    return ThresholdResult(True, p_star, bracket, trials, points())


@dataclass(frozen=True)
class TableRow:
    spec: LatticeSpec
    site_count: int
    p: float
    trials: int
    spanning_count: int
    spanning_size_total: int
    reported_probability: float | None = None

    @property
    def spanning_prob(self) -> float:
        return self.spanning_count / self.trials

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.spanning_count, self.trials)

    @property
    def mean_spanning_fraction(self) -> float:
        if self.spanning_count == 0:
            return 0.0
        return self.spanning_size_total / (self.spanning_count * self.site_count)


def table_scan(
    rows: list[LatticeSpec] | None = None,
    p: float = 0.75,
    trials: int = 200,
    seed: int = 0,
    pairing: str = "fixed",
    site_deletion_prob: float | None = None,
    threads: int = 1,
) -> list[TableRow]:
    """Spanning probability and mean spanning fraction for each lattice size.

    Defaults to the twelve reference lattice sizes in ``TABLE1``.
    """
    reported = {(r[0], r[1], r[2]): r[4] for r in TABLE1}
    if rows is None:
        rows = [LatticeSpec(*r[:3]) for r in TABLE1]
    out = []
    for spec in rows:
        lat = build(spec)
        ((c, size),) = count_spanning(
            lat, [p], trials, seed=seed, pairing=pairing,
            site_deletion_prob=site_deletion_prob, threads=threads,
        )
        ref = reported.get(spec.dims) if p == 0.75 else None
        out.append(TableRow(spec, lat.site_count, p, trials, c, size, ref))
    return out
