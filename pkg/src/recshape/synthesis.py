"""Recurrences with a prescribed value-set closure.

Given closed intervals [mu_k, nu_k], let rho0 be the smallest width and
m_k = floor(width_k / rho0).  A periodic sequence ``w`` runs through the
left endpoints mu_k + i rho0 (i < m_k) and nu_k - rho0; adding

    x[n] = rho0 / 2 * (cos n + 1),

which is dense in [0, rho0] along every residue class, makes each residue
class of ``w + x`` fill [lam, lam + rho0] for its value lam of ``w``.  Those
short intervals tile every target interval exactly.

Point intervals (width 0) are produced by a separate periodic sequence
interlaced with the one above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .closure import EmpiricalClosure, empirical_closure, hausdorff, merge_intervals
from .recurrence import (
    LinearRecurrence,
    add,
    evaluate,
    interlace,
    periodic_from_values,
    reduce,
    verify_satisfies,
)

__all__ = [
    "RoundTrip",
    "SynthesisPlan",
    "build",
    "plan",
    "planned_values",
    "random_targets",
    "roundtrip",
    "synthesize",
    "x_sequence",
]


@dataclass(frozen=True)
class SynthesisPlan:
    targets: tuple[tuple[float, float], ...]
    rho0: float | None
    widths: tuple[float, ...]
    multipliers: tuple[int, ...]
    periodic_values: tuple[float, ...]
    degenerate_points: tuple[float, ...] = ()
    # exact rationals behind the floats above, kept for the cover identity
    exact_values: tuple[Fraction, ...] = field(default=(), repr=False, compare=False)
    exact_rho0: Fraction | None = field(default=None, repr=False, compare=False)

    @property
    def period(self) -> int:
        return len(self.periodic_values)

    @property
    def fat(self) -> bool:
        return self.rho0 is not None

    def cover(self) -> list[tuple[float, float]]:
        """The tiles [lam, lam + rho0] for every periodic value lam."""
        if not self.fat:
            return []
        return [(lam, lam + self.rho0) for lam in self.periodic_values]

    def exact_cover_holds(self) -> bool:
        """Union of the tiles equals the fat targets, in exact arithmetic."""
        if not self.fat:
            return True
        tiles = sorted((v, v + self.exact_rho0) for v in self.exact_values)
        merged: list[list[Fraction]] = []
        for lo, hi in tiles:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        fat = [(Fraction(a), Fraction(b)) for a, b in self.targets if b > a]
        return [tuple(iv) for iv in merged] == fat


def plan(targets: Sequence[Sequence[float]]) -> SynthesisPlan:
    """Periodic offsets and tile width for the target intervals.

    Targets are merged first.  Arithmetic is exact on the binary values of
    the inputs, so the chain mu <= nu - rho0 < mu + m rho0 <= nu holds
    without rounding slack.
    """
    targets = list(targets)
    if not targets:
        raise ValueError("need at least one target interval")
    for iv in targets:
        if len(iv) != 2 or not all(math.isfinite(float(v)) for v in iv):
            raise ValueError(f"bad target interval {iv!r}")
    merged = merge_intervals(targets)
    points = tuple(lo for lo, hi in merged if lo == hi)
    fat = [(Fraction(lo), Fraction(hi)) for lo, hi in merged if hi > lo]
    if not fat:
        return SynthesisPlan(tuple(merged), None, (), (), (), points)

    widths = [nu - mu for mu, nu in fat]
    rho0 = min(widths)
    mults = [int(w // rho0) for w in widths]
    values = [mu + i * rho0 for (mu, _), m in zip(fat, mults) for i in range(m)]
    values += [nu - rho0 for _, nu in fat]
    for (mu, nu), m in zip(fat, mults):
        assert mu <= nu - rho0 < mu + m * rho0 <= nu, (mu, nu, m, rho0)
    return SynthesisPlan(
        targets=tuple(merged),
        rho0=float(rho0),
        widths=tuple(float(w) for w in widths),
        multipliers=tuple(mults),
        periodic_values=tuple(float(v) for v in values),
        degenerate_points=points,
        exact_values=tuple(values),
        exact_rho0=rho0,
    )


def x_sequence(rho0: float) -> LinearRecurrence:
    """rho0/2 (cos n + 1); characteristic polynomial (z - 1)(z^2 - 2 cos(1) z + 1)."""
    if not rho0 > 0:
        raise ValueError("rho0 must be positive")
    c = 1.0 + 2.0 * math.cos(1.0)
    init = tuple(0.5 * rho0 * (math.cos(n) + 1.0) for n in range(3))
    return LinearRecurrence(3, (c, -c, 1.0), init)


def planned_values(p: SynthesisPlan, n) -> np.ndarray:
    """Closed-form values of the sequence :func:`build` realizes."""
    n = np.asarray(n)

    def fat_part(j):
        vals = np.asarray(p.periodic_values)
        return vals[j % len(vals)] + 0.5 * p.rho0 * (np.cos(j) + 1.0)

    def point_part(j):
        pts = np.asarray(p.degenerate_points)
        return pts[j % len(pts)]

    if not p.fat:
        return point_part(n)
    if not p.degenerate_points:
        return fat_part(n)
    out = np.empty(n.shape)
    even = n % 2 == 0
    out[even] = fat_part(n[even] // 2)
    out[~even] = point_part(n[~even] // 2)
    return out


def build(p: SynthesisPlan, *, reduce_order: bool = True, check_tol: float = 1e-8) -> LinearRecurrence:
    """The recurrence w + x (interlaced with the point sequence if any)."""
    parts = []
    if p.fat:
        fat = add(periodic_from_values(p.periodic_values), x_sequence(p.rho0))
        if reduce_order:
            fat = reduce(fat, 1e-9)
        parts.append(fat)
    if p.degenerate_points:
        parts.append(periodic_from_values(p.degenerate_points))
    rec = parts[0] if len(parts) == 1 else interlace(parts)
    samples = planned_values(p, np.arange(max(4 * rec.order, 64)))
    resid = verify_satisfies(rec, samples)
    if resid > check_tol:
        raise ArithmeticError(f"synthesized recurrence misses its target sequence (residual {resid:.3g})")
    return rec


def synthesize(targets: Sequence[Sequence[float]], **kwargs) -> LinearRecurrence:
    return build(plan(targets), **kwargs)


# -- verification --------------------------------------------------------------------


@dataclass(frozen=True)
class RoundTrip:
    plan: SynthesisPlan
    recurrence: LinearRecurrence
    empirical: EmpiricalClosure
    distance: float
    residual: float
    containment: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.distance <= self.tolerance

    def summary(self) -> dict:
        return {
            "status": "PASS" if self.passed else "FAIL",
            "hausdorff": self.distance,
            "tolerance": self.tolerance,
            "residual": self.residual,
            "containment": self.containment,
            "period": self.plan.period,
            "rho0": self.plan.rho0,
            "empirical_intervals": self.empirical.intervals.to_list(),
            "empirical_points": list(self.empirical.points),
        }


def roundtrip(
    targets: Sequence[Sequence[float]],
    n_samples: int = 1_000_000,
    gap_eps: float = 0.01,
    tolerance: float = 0.05,
    containment_samples: int = 100_000,
    recurrence: LinearRecurrence | None = None,
) -> RoundTrip:
    """Synthesize, then recover the closure by sampling and compare.

    Pass ``recurrence`` to check an already built sequence for ``targets``.
    """
    p = plan(targets)
    rec = recurrence if recurrence is not None else build(p)
    emp = empirical_closure(rec, n_samples, 0, gap_eps)
    dist = hausdorff(p.targets, emp.as_intervals())
    n = np.arange(min(containment_samples, n_samples))
    resid = verify_satisfies(rec, planned_values(p, n[: max(4 * rec.order, 1000)]))
    vals = evaluate(rec, 0, len(n) - 1)
    contain = float(np.max(merge_intervals(p.targets).distance(vals)))
    return RoundTrip(p, rec, emp, dist, resid, contain, tolerance)


def random_targets(rng: np.random.Generator, *, count=(1, 5), width=(0.1, 10.0), gap=(0.2, 3.0), start=(-10.0, 10.0)):
    """Random disjoint intervals with widths and gaps in the given ranges."""
    k = int(rng.integers(count[0], count[1] + 1))
    lo = float(rng.uniform(*start))
    out = []
    for _ in range(k):
        hi = lo + float(rng.uniform(*width))
        out.append([lo, hi])
        lo = hi + float(rng.uniform(*gap))
    return out
