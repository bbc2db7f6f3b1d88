"""Closure of the value set of a recurrence.

Two independent routes are provided.  :func:`closure_of` works from the
spectral decomposition: every residue class whose trigonometric part is
nonconstant densely fills ``[lam + min F, lam + max F]``, where ``F`` is
optimized over the torus by :func:`trig_range`.  :func:`empirical_closure`
only samples the sequence and clusters the sorted values.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import RecurrenceOverflowError, TrigRangeError
from .recurrence import LinearRecurrence, evaluate, sample
from .spectral import Decomposition, GrowthClass, SpectralConfig, TrigPolySpec, decompose

__all__ = [
    "Classification",
    "ClosureConfig",
    "ClosureReport",
    "EmpiricalClosure",
    "IntervalSet",
    "closure_of",
    "empirical_closure",
    "hausdorff",
    "merge_intervals",
    "trig_range",
]

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


# -- interval sets ---------------------------------------------------------------


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint closed intervals."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        prev = -math.inf
        for lo, hi in self.intervals:
            if lo > hi:
                raise ValueError(f"interval [{lo}, {hi}] has lo > hi")
            if lo <= prev:
                raise ValueError("intervals must be sorted with positive gaps")
            prev = hi

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def distance(self, x) -> np.ndarray:
        """Distance from each point of ``x`` to the union (inf if empty)."""
        x = np.asarray(x, dtype=float)
        if not self.intervals:
            return np.full(x.shape, np.inf)
        lo = np.array([a for a, _ in self.intervals])
        hi = np.array([b for _, b in self.intervals])
        # interval with the largest lo <= x, and the next one
        i = np.clip(np.searchsorted(lo, x, side="right") - 1, 0, len(lo) - 1)
        d_left = np.where(x < lo[i], lo[i] - x, np.maximum(x - hi[i], 0.0))
        j = np.minimum(i + 1, len(lo) - 1)
        d_right = np.where(x < lo[j], lo[j] - x, np.maximum(x - hi[j], 0.0))
        return np.minimum(d_left, d_right)

    def to_list(self) -> list[list[float]]:
        return [[lo, hi] for lo, hi in self.intervals]


def merge_intervals(raw: Iterable[Sequence[float]], gap_tol: float = 0.0) -> IntervalSet:
    """Minimal sorted disjoint cover; touching intervals are merged.

    Intervals separated by at most ``gap_tol`` are merged as well.
    """
    items = []
    for iv in raw:
        lo, hi = float(iv[0]), float(iv[1])
        if lo > hi:
            raise ValueError(f"interval [{lo}, {hi}] has lo > hi")
        items.append((lo, hi))
    out: list[tuple[float, float]] = []
    for lo, hi in sorted(items):
        if out and lo <= out[-1][1] + gap_tol:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return IntervalSet(tuple(out))


def hausdorff(a: Sequence[Sequence[float]], b: Sequence[Sequence[float]]) -> float:
    """Hausdorff distance between two finite unions of closed intervals.

    Points may be passed as degenerate intervals.  The farthest point of one
    union from the other is an endpoint, or the midpoint of a gap of the
    other union clipped into it.
    """
    sa, sb = merge_intervals(a), merge_intervals(b)
    if not sa and not sb:
        return 0.0
    if not sa or not sb:
        return math.inf
    return max(_one_sided(sa, sb), _one_sided(sb, sa))


def _one_sided(a: IntervalSet, b: IntervalSet) -> float:
    cand = [x for iv in a for x in iv]
    gaps = [(b.intervals[i][1], b.intervals[i + 1][0]) for i in range(len(b) - 1)]
    for g0, g1 in gaps:
        mid = 0.5 * (g0 + g1)
        for lo, hi in a:
            if lo <= mid <= hi:
                cand.append(mid)
    return float(np.max(b.distance(np.array(cand))))


# -- torus optimization -------------------------------------------------------------


@dataclass(frozen=True)
class TrigRangeConfig:
    density: int | None = None
    refine_iterations: int = 100
    tol: float = 1e-6
    max_dim: int = 6
    max_cells: int = 2_000_000
    seeds: int = 8

    def grid_density(self, m: int) -> int:
        if self.density is not None:
            return self.density
        if m <= 2:
            return 64
        if m <= 4:
            return 16
        return 8


def _value_grad(amps, c, phases, t):
    """F and its gradient at points t of shape (k, m)."""
    arg = TWO_PI * t @ c.T + phases
    val = np.cos(arg) @ amps
    grad = -(np.sin(arg) * amps) @ c * TWO_PI
    return val, grad


def _maximize(amps, c, phases, cfg: TrigRangeConfig) -> tuple[float, bool]:
    """Certified maximum of F over the unit torus by branch and bound.

    Cell bound: F(center) + |grad|_1 w + (1/2) K w^2 with half-width w and
    K = 4 pi^2 sum |xi_i| |c_i|_1^2 bounding every second directional
    derivative.
    """
    m = c.shape[1]
    dens = cfg.grid_density(m)
    curv = 4 * math.pi**2 * float(np.sum(np.abs(amps) * np.sum(np.abs(c), axis=1) ** 2))
    axes = (np.arange(dens) + 0.5) / dens
    centers = np.stack(np.meshgrid(*([axes] * m), indexing="ij"), -1).reshape(-1, m)
    w = 0.5 / dens
    val, grad = _value_grad(amps, c, phases, centers)
    best = float(val.max())

    def neg(t):
        v, g = _value_grad(amps, c, phases, t[None, :])
        return -v[0], -g[0]

    def polish(points):
        nonlocal best
        for t0 in points:
            res = minimize(neg, t0, jac=True, method="BFGS",
                           options={"maxiter": cfg.refine_iterations, "gtol": 1e-12})
            best = max(best, -float(res.fun))

    polish(centers[np.argsort(val)[-cfg.seeds:]])
    offsets = np.stack(
        np.meshgrid(*([np.array([-1.0, 1.0])] * m), indexing="ij"), -1
    ).reshape(-1, m)
    total = len(centers)
    while True:
        ub = val + np.abs(grad).sum(axis=1) * w + 0.5 * curv * w * w
        live = ub > best + cfg.tol
        if not live.any():
            return best, True
        centers = centers[live]
        total += len(centers) * len(offsets)
        if total > cfg.max_cells:
            return best, False
        w *= 0.5
        centers = (centers[:, None, :] + offsets[None, :, :] * w).reshape(-1, m)
        val, grad = _value_grad(amps, c, phases, centers)
        top = float(val.max())
        if top > best:
            best = top
            polish(centers[np.argsort(val)[-1:]])


def trig_range(spec: TrigPolySpec, cfg: TrigRangeConfig | None = None) -> tuple[float, float]:
    """[min F, max F] over the torus, each within ``cfg.tol`` of the truth.

    Both returned values are attained by F, so the true range can only be
    wider, by at most the tolerance.
    """
    cfg = cfg or TrigRangeConfig()
    if spec.empty:
        return (0.0, 0.0)
    c = np.asarray(spec.freqs, dtype=float)
    # torus directions F does not depend on are irrelevant
    c = c[:, np.any(c != 0, axis=0)]
    m = c.shape[1]
    if m > cfg.max_dim:
        raise TrigRangeError(
            f"torus dimension {m} exceeds grid budget (max {cfg.max_dim}); "
            "use the empirical closure instead"
        )
    amps = np.asarray(spec.amplitudes, dtype=float)
    phases = np.asarray(spec.phases, dtype=float)
    hi, ok_hi = _maximize(amps, c, phases, cfg)
    lo, ok_lo = _maximize(-amps, c, phases, cfg)
    if not (ok_hi and ok_lo):
        log.warning("trig_range: cell budget exhausted before certification at tol %g", cfg.tol)
    bound = float(np.sum(np.abs(amps)))
    return (max(-lo, -bound), min(hi, bound))


# -- reports -----------------------------------------------------------------------


class Classification(str, enum.Enum):
    DIVERGENT_COUNTABLE = "DIVERGENT_COUNTABLE"
    CONVERGENT_COUNTABLE = "CONVERGENT_COUNTABLE"
    FINITE_SET = "FINITE_SET"
    INTERVALS = "INTERVALS"


@dataclass(frozen=True)
class ClosureReport:
    classification: Classification
    intervals: IntervalSet = field(default_factory=IntervalSet)
    countable_extras: tuple[float, ...] = ()
    method: str = "EXACT"
    decomposition: Decomposition | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.classification is Classification.INTERVALS and not self.intervals:
            raise ValueError("INTERVALS report needs at least one interval")
        if self.classification is Classification.FINITE_SET and not self.countable_extras:
            raise ValueError("FINITE_SET report needs at least one value")

    def to_dict(self) -> dict:
        return {
            "classification": self.classification.value,
            "intervals": self.intervals.to_list(),
            "points": list(self.countable_extras),
            "method": self.method,
        }


@dataclass(frozen=True)
class EmpiricalClosure:
    intervals: IntervalSet
    points: tuple[float, ...]
    divergent: bool = False
    samples: int = 0

    def as_intervals(self) -> list[tuple[float, float]]:
        """Intervals plus points as degenerate intervals."""
        return list(self.intervals) + [(p, p) for p in self.points]


@dataclass(frozen=True)
class ClosureConfig:
    spectral: SpectralConfig = field(default_factory=SpectralConfig)
    trig: TrigRangeConfig = field(default_factory=TrigRangeConfig)
    # a[0..burn_in) are reported as transients when outside the intervals
    burn_in: int = 64
    n_samples: int = 1_000_000
    gap_eps: float = 0.01
    min_run: int = 32
    point_tol: float = 1e-9
    overflow_guard: float = 1e12
    empirical_only: bool = False


def _cluster_points(values: Iterable[float], tol: float) -> list[float]:
    """Sorted distinct values; values within tol*(1+|x|) collapse to the first."""
    out: list[float] = []
    for v in sorted(values):
        if out and v - out[-1] <= tol * (1.0 + abs(v)):
            continue
        out.append(float(v))
    return out


def empirical_closure(
    rec: LinearRecurrence,
    n_samples: int = 1_000_000,
    burn_in: int = 0,
    gap_eps: float = 0.01,
    *,
    min_run: int = 32,
    point_tol: float = 1e-9,
    overflow_guard: float = 1e12,
) -> EmpiricalClosure:
    """Cluster the sorted values a[burn_in], ..., a[n_samples - 1].

    Sorted values are split at gaps larger than ``gap_eps``.  A run becomes
    an interval when it holds at least ``min_run`` samples, has positive width
    and no internal gap wider than width / min_run; otherwise its distinct
    values are reported as points.
    """
    if not n_samples > burn_in >= 0:
        raise ValueError("need n_samples > burn_in >= 0")
    if gap_eps <= 0:
        raise ValueError("gap_eps must be positive")
    try:
        vals = sample(rec, burn_in, n_samples - 1)
    except RecurrenceOverflowError:
        return EmpiricalClosure(IntervalSet(), (), divergent=True)
    if np.any(np.abs(vals) > overflow_guard):
        return EmpiricalClosure(IntervalSet(), (), divergent=True, samples=len(vals))
    vals = np.sort(vals)
    gaps = np.diff(vals)
    cuts = np.nonzero(gaps > gap_eps)[0] + 1
    intervals, points = [], []
    for run, run_gaps in zip(np.split(vals, cuts), _split_gaps(gaps, cuts)):
        lo, hi = float(run[0]), float(run[-1])
        width = hi - lo
        dense = len(run_gaps) == 0 or float(run_gaps.max()) <= width / min_run
        if len(run) >= min_run and width > point_tol * (1.0 + abs(lo)) and dense:
            intervals.append((lo, hi))
        else:
            points.extend(_cluster_points(np.unique(run), point_tol))
    return EmpiricalClosure(
        merge_intervals(intervals), tuple(_cluster_points(points, point_tol)), samples=len(vals)
    )


def _split_gaps(gaps: np.ndarray, cuts: np.ndarray):
    """Internal gaps of each run produced by splitting at ``cuts``."""
    bounds = [0, *cuts.tolist(), len(gaps) + 1]
    for a, b in zip(bounds[:-1], bounds[1:]):
        yield gaps[a:b - 1]


def _prefix(rec: LinearRecurrence, count: int) -> np.ndarray:
    """Up to ``count`` leading terms, truncated before any overflow."""
    if count <= 0:
        return np.empty(0)
    try:
        return evaluate(rec, 0, count - 1)
    except RecurrenceOverflowError as exc:
        return evaluate(rec, 0, exc.index - 1) if exc.index > 0 else np.empty(0)


def closure_of(rec: LinearRecurrence, cfg: ClosureConfig | None = None) -> ClosureReport:
    """Closure of {a[n]} from the spectral decomposition.

    Falls back to :func:`empirical_closure` (method EMPIRICAL) when the angle
    independence needed for the exact route could not be verified.
    """
    cfg = cfg or ClosureConfig()
    dec = decompose(rec, cfg.spectral)
    prefix = _prefix(rec, cfg.burn_in)
    if dec.growth is GrowthClass.DIVERGENT:
        return ClosureReport(
            Classification.DIVERGENT_COUNTABLE,
            countable_extras=tuple(_cluster_points(prefix, cfg.point_tol)),
            decomposition=dec,
        )
    if dec.growth is GrowthClass.CONVERGENT_TO_ZERO:
        return ClosureReport(
            Classification.CONVERGENT_COUNTABLE,
            countable_extras=tuple(_cluster_points([*prefix, 0.0], cfg.point_tol)),
            decomposition=dec,
        )
    if dec.growth is GrowthClass.EVENTUALLY_ZERO:
        # nilpotent part dies after at most `order` steps
        head = _prefix(rec, max(cfg.burn_in, rec.order))
        return ClosureReport(
            Classification.FINITE_SET,
            countable_extras=tuple(_cluster_points([*head, 0.0], cfg.point_tol)),
            decomposition=dec,
        )

    if cfg.empirical_only or not dec.independence_verified:
        emp = empirical_closure(
            rec, cfg.n_samples, cfg.burn_in, cfg.gap_eps,
            min_run=cfg.min_run, point_tol=cfg.point_tol, overflow_guard=cfg.overflow_guard,
        )
        return _report(emp.intervals, emp.points, prefix, "EMPIRICAL", dec, cfg)

    raw, limits = [], []
    for sec in dec.sections:
        lam = sec.offsets[0]
        if sec.trig.empty:
            limits.append(lam)
        else:
            lo, hi = trig_range(sec.trig, cfg.trig)
            raw.append((lam + lo, lam + hi))
    # endpoints are only good to the certification tolerance
    merged = merge_intervals(raw, gap_tol=2 * cfg.trig.tol)
    return _report(merged, limits, prefix, "EXACT", dec, cfg)


def _report(intervals: IntervalSet, limits, prefix, method, dec, cfg) -> ClosureReport:
    tol = cfg.point_tol
    outside = [float(v) for v in prefix if intervals.distance(v) > tol * (1 + abs(v))]
    # sampled values stand in for limit points they coincide with
    extras = list(outside)
    for lam in limits:
        if intervals.distance(lam) <= tol * (1 + abs(lam)):
            continue
        if not any(abs(v - lam) <= tol * (1 + abs(lam)) for v in outside):
            extras.append(float(lam))
    extras = _cluster_points(extras, tol)
    cls = Classification.INTERVALS if intervals else Classification.FINITE_SET
    return ClosureReport(cls, intervals, tuple(extras), method, dec)
