"""Characteristic roots, growth classification and the bounded decomposition.

For a recurrence whose dominant characteristic roots are simple and lie on
the unit circle, the sequence splits as

    a[n] = u[n] + v[n] + o(1)

where ``u`` is periodic (roots at rational angles) and ``v`` is a finite sum
of cosines at incommensurate angles.  Along each residue class n = g j + k,
``u`` is constant and ``v`` is a trigonometric polynomial in j evaluated along
an orbit on the torus; :class:`TrigPolySpec` describes that polynomial.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _dd
from .polynomial import RootSet, find_roots
from .recurrence import LinearRecurrence, char_poly, evaluate

__all__ = [
    "Decomposition",
    "DominantRoot",
    "GrowthClass",
    "Section",
    "SpectralData",
    "SpectralConfig",
    "TrigPolySpec",
    "classify_dominant",
    "decompose",
    "find_roots",
    "rational_angle",
    "solve_coefficients",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SpectralConfig:
    root_tol: float = 1e-8
    # relative modulus window for dominance, and for |alpha| == 1
    dominance_tol: float = 1e-9
    angle_q_max: int = 1000
    angle_tol: float = 1e-10
    # roots whose sequence coefficients are below this (relative) are absent
    coeff_tol: float = 1e-10
    relation_bound: int = 50
    relation_tol: float = 1e-9
    # cap on the exhaustive relation search size
    relation_budget: int = 2_000_000


class GrowthClass(str, enum.Enum):
    DIVERGENT = "DIVERGENT"
    CONVERGENT_TO_ZERO = "CONVERGENT_TO_ZERO"
    BOUNDED_OSCILLATORY = "BOUNDED_OSCILLATORY"
    EVENTUALLY_ZERO = "EVENTUALLY_ZERO"


@dataclass(frozen=True)
class DominantRoot:
    angle: float
    multiplicity: int
    commensurate: bool
    ratio: tuple[int, int] | None = None


@dataclass(frozen=True)
class SpectralData:
    dominant_modulus: float
    d: int
    dominant_roots: tuple[DominantRoot, ...]
    g: int


@dataclass(frozen=True)
class TrigPolySpec:
    """F(t) = sum_i xi_i cos(2 pi c_i . t + phi_i) on the m-torus."""

    m: int
    amplitudes: tuple[float, ...] = ()
    freqs: tuple[tuple[int, ...], ...] = ()
    phases: tuple[float, ...] = ()
    taus: tuple[float, ...] = ()

    def __post_init__(self):
        r = len(self.amplitudes)
        if len(self.freqs) != r or len(self.phases) != r:
            raise ValueError("amplitudes, freqs and phases must have equal length")
        if self.m < 0:
            raise ValueError("torus dimension must be non-negative")
        for c in self.freqs:
            if len(c) != self.m:
                raise ValueError(f"frequency row {c} does not have length {self.m}")
            if not any(c):
                raise ValueError("frequency rows must be nonzero")
        if self.taus and len(self.taus) != self.m:
            raise ValueError("need one tau per torus dimension")

    @property
    def empty(self) -> bool:
        return len(self.amplitudes) == 0

    def __call__(self, t) -> np.ndarray:
        """Evaluate at points ``t`` of shape (..., m)."""
        t = np.asarray(t, dtype=float)
        if self.empty:
            return np.zeros(t.shape[:-1] if t.ndim else ())
        c = np.asarray(self.freqs, dtype=float)
        arg = TWO_PI * t @ c.T + np.asarray(self.phases)
        return np.cos(arg) @ np.asarray(self.amplitudes)

    def orbit(self, n) -> np.ndarray:
        """Values along the orbit t = n * tau (mod 1)."""
        n = np.asarray(n, dtype=float)
        if self.empty:
            return np.zeros(n.shape)
        c = np.asarray(self.freqs, dtype=float)
        rate = c @ np.asarray(self.taus)
        arg = TWO_PI * np.multiply.outer(n, rate) + np.asarray(self.phases)
        return np.cos(arg) @ np.asarray(self.amplitudes)


@dataclass(frozen=True)
class Section:
    """Residue class n = g j + k: constant periodic part plus oscillation."""

    k: int
    offsets: tuple[float, ...]
    trig: TrigPolySpec


@dataclass(frozen=True)
class Decomposition:
    growth: GrowthClass
    spectral: SpectralData | None
    g: int = 1
    sections: tuple[Section, ...] = ()
    independence_verified: bool = True
    notes: tuple[str, ...] = ()
    roots: RootSet | None = field(default=None, compare=False)

    def reconstruct(self, n) -> np.ndarray:
        """u[n] + v[n] from the section data (bounded case only)."""
        n = np.asarray(n)
        out = np.zeros(n.shape, dtype=float)
        for sec in self.sections:
            mask = (n % self.g) == sec.k
            j = (n[mask] - sec.k) // self.g
            out[mask] = sec.offsets[0] + sec.trig.orbit(j)
        return out


# -- angles --------------------------------------------------------------------


def _convergents(x: float, q_max: int):
    """Continued-fraction convergents p/q of x in [0, 1) with q <= q_max."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    y = x
    while True:
        a = math.floor(y)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > q_max:
            return
        yield p1, q1
        frac = y - a
        if frac < 1e-300:
            return
        y = 1.0 / frac


def rational_angle(theta: float, q_max: int = 1000, tol: float = 1e-10) -> tuple[int, int] | None:
    """Smallest-denominator p/q with theta/(2 pi) = p/q (mod 1) within ``tol``.

    Only continued-fraction convergents are tried; any p/q within
    1/(2 q^2) of x is one of them.
    """
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    x = (theta / TWO_PI) % 1.0
    if x >= 1.0 - tol:
        return (0, 1)
    for p, q in _convergents(x, q_max):
        if abs(x - p / q) <= tol:
            return (p % q, q)
    return None


def classify_dominant(roots: RootSet, tol: float = 1e-9, *, q_max: int = 1000, angle_tol: float = 1e-10) -> SpectralData:
    if len(roots) == 0:
        raise ValueError("empty root set")
    mods = np.abs(np.asarray(roots.roots))
    top = float(mods.max())
    dom = []
    for r, m in roots:
        if abs(r) >= top * (1 - tol):
            theta = math.atan2(r.imag, r.real)
            ratio = rational_angle(theta, q_max, angle_tol) if top > 0 else (0, 1)
            dom.append(DominantRoot(theta, m, ratio is not None, ratio))
    d = max(dr.multiplicity for dr in dom) - 1
    qs = [dr.ratio[1] for dr in dom if dr.commensurate]
    g = math.lcm(*qs) if qs else 1
    return SpectralData(top, d, tuple(dom), g)


# -- coefficients ----------------------------------------------------------------


def _basis(roots: RootSet, n: np.ndarray) -> np.ndarray:
    """Columns n^j alpha^n for each root alpha and j < multiplicity."""
    cols = []
    n = np.asarray(n)
    for r, m in roots:
        for j in range(m):
            if r == 0:
                cols.append((n == j).astype(complex))
            else:
                cols.append(n.astype(float) ** j * np.power(complex(r), n))
    return np.stack(cols, axis=1)


def _basis_dd(roots: RootSet, n: np.ndarray) -> list:
    """Columns of :func:`_basis` in double-double."""
    n = np.asarray(n)
    cols = []
    for r, m in roots:
        for j in range(m):
            if r == 0:
                cols.append(_dd.lift((n == j).astype(complex)))
            else:
                cols.append(_dd.mul(_dd.powers(r, n), _dd.lift(n.astype(float) ** j)))
    return cols


def _combine_dd(cols: list, hi: np.ndarray, lo: np.ndarray):
    acc = _dd.lift(np.zeros(cols[0][0].shape))
    for k, col in enumerate(cols):
        acc = _dd.add(acc, _dd.mul(col, (np.full(col[0].shape, hi[k]), np.full(col[0].shape, lo[k]))))
    return acc


def solve_coefficients(
    rec: LinearRecurrence,
    roots: RootSet,
    cond_bound: float = 1e12,
    *,
    extended: bool = False,
    refine_steps: int = 2,
):
    """Coefficients c[r, j] of a[n] = sum c[r, j] n^j r^n (flattened).

    Ordered as in :func:`_basis`: root by root, increasing power of n.  The
    solution is refined with residuals computed in double-double, which
    matters when the terms cancel heavily (roots of very different sizes).
    With ``extended`` the pair (hi, lo) of the double-double result is
    returned; pass ``lo`` on to :func:`reconstruct` for full accuracy.
    """
    h = rec.order
    if roots.degree != h:
        raise ValueError(f"root multiplicities sum to {roots.degree}, order is {h}")
    n = np.arange(h)
    v = _basis(roots, n)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > cond_bound:
        warnings.warn(
            f"confluent Vandermonde system is ill-conditioned (cond ~ {cond:.2g})",
            RuntimeWarning,
            stacklevel=2,
        )
    a = np.asarray(rec.initial, dtype=complex)
    hi = np.linalg.solve(v, a)
    lo = np.zeros_like(hi)
    cols = _basis_dd(roots, n)
    for _ in range(refine_steps):
        fit = _combine_dd(cols, hi, lo)
        resid = _dd.add(_dd.lift(a), (-fit[0], -fit[1]))
        delta = np.linalg.solve(v, resid[0] + resid[1])
        hi, lo = _dd.add((hi, lo), _dd.lift(delta))
    return (hi, lo) if extended else hi


def reconstruct(roots: RootSet, coeffs: np.ndarray, n, coeffs_lo: np.ndarray | None = None) -> np.ndarray:
    """sum c[r, j] n^j r^n, evaluated in double-double."""
    n = np.asarray(n)
    coeffs = np.asarray(coeffs, dtype=complex)
    lo = np.zeros_like(coeffs) if coeffs_lo is None else np.asarray(coeffs_lo, dtype=complex)
    hi_part, lo_part = _combine_dd(_basis_dd(roots, n), coeffs, lo)
    return (hi_part + lo_part).real


# -- integer relations -------------------------------------------------------------


def _find_relation(xs: list[float], bound: int, tol: float):
    """Integer vector c (|c_i| <= bound, not all 0) with sum c_i x_i ~ integer."""
    m = len(xs)
    if m < 2:
        return None
    x = np.asarray(xs)
    rng = np.arange(-bound, bound + 1)
    # fix the first nonzero coordinate positive to skip sign duplicates
    head = np.stack(np.meshgrid(*([rng] * (m - 1)), indexing="ij"), -1).reshape(-1, m - 1)
    best = None
    for c0 in range(0, bound + 1):
        combos = np.column_stack((np.full(len(head), c0), head))
        if c0 == 0:
            first = head[np.arange(len(head)), np.argmax(head != 0, axis=1)]
            combos = combos[first > 0]
        s = combos @ x
        dist = np.abs(s - np.round(s))
        hits = np.nonzero(dist <= tol)[0]
        if len(hits):
            cand = combos[hits[np.argmin(np.abs(combos[hits]).sum(axis=1))]]
            if best is None or np.abs(cand).sum() < np.abs(best).sum():
                best = cand
    return None if best is None else [int(v) for v in best]


def _fold_relations(taus: list[float], cfg: SpectralConfig):
    """Reduce angles to an independent generating set by folding relations.

    Returns (basis taus, integer matrix expressing each input in the basis,
    verified flag).  A relation can only be folded when one of its
    coefficients is +-1; otherwise the result is flagged unverified.
    """
    m = len(taus)
    rows = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    basis = list(range(m))
    verified = True
    while len(basis) >= 2:
        size = (2 * cfg.relation_bound + 1) ** (len(basis) - 1) * (cfg.relation_bound + 1)
        bound = cfg.relation_bound
        if size > cfg.relation_budget:
            # shrink the coefficient box to the budget; completeness is lost
            verified = False
            while bound > 1 and (2 * bound + 1) ** (len(basis) - 1) * (bound + 1) > cfg.relation_budget:
                bound -= 1
        rel = _find_relation([taus[b] for b in basis], bound, cfg.relation_tol)
        if rel is None:
            break
        unit = [i for i, c in enumerate(rel) if abs(c) == 1]
        if not unit:
            verified = False
            break
        i = unit[-1]
        sign = rel[i]
        # tau_i = -sign * sum_{l != i} rel_l tau_l  (mod 1)
        expr = {basis[l]: -sign * rel[l] for l in range(len(basis)) if l != i}
        drop = basis[i]
        for row in rows:
            c = row[drop]
            if c:
                row[drop] = 0
                for b, e in expr.items():
                    row[b] += c * e
        basis.pop(i)
    mat = [[row[b] for b in basis] for row in rows]
    return [taus[b] for b in basis], mat, verified


# -- decomposition -----------------------------------------------------------------


def _present_roots(rec: LinearRecurrence, rs: RootSet, cfg: SpectralConfig):
    """Roots actually carried by the sequence, with effective multiplicity."""
    coeffs = solve_coefficients(rec, rs)
    scale = 1.0 + float(np.max(np.abs(rec.initial)))
    kept_r, kept_m, kept_c = [], [], []
    pos = 0
    for r, m in rs:
        c = coeffs[pos:pos + m]
        pos += m
        # weight n^j terms by the horizon where they matter
        big = [j for j in range(m) if abs(c[j]) > cfg.coeff_tol * scale]
        if big:
            top = max(big) + 1
            kept_r.append(r)
            kept_m.append(top)
            kept_c.append(c[:top])
    return kept_r, kept_m, kept_c


def decompose(rec: LinearRecurrence, cfg: SpectralConfig | None = None) -> Decomposition:
    cfg = cfg or SpectralConfig()
    rs = find_roots(char_poly(rec), cfg.root_tol)
    roots, mults, coefs = _present_roots(rec, rs, cfg)
    nonzero = [i for i, r in enumerate(roots) if r != 0]
    if not nonzero:
        return Decomposition(GrowthClass.EVENTUALLY_ZERO, None, roots=rs)
    present = RootSet(tuple(roots[i] for i in nonzero), tuple(mults[i] for i in nonzero))
    sd = classify_dominant(present, cfg.dominance_tol, q_max=cfg.angle_q_max, angle_tol=cfg.angle_tol)
    alpha = sd.dominant_modulus
    if alpha > 1 + cfg.dominance_tol or (alpha >= 1 - cfg.dominance_tol and sd.d >= 1):
        return Decomposition(GrowthClass.DIVERGENT, sd, roots=rs)
    if alpha < 1 - cfg.dominance_tol:
        return Decomposition(GrowthClass.CONVERGENT_TO_ZERO, sd, roots=rs)

    g = sd.g
    comm, incomm = [], []
    for i in nonzero:
        r = roots[i]
        if abs(r) < alpha * (1 - cfg.dominance_tol):
            continue  # subdominant, part of the o(1) remainder
        theta = math.atan2(r.imag, r.real)
        c = complex(coefs[i][0])
        if rational_angle(theta, cfg.angle_q_max, cfg.angle_tol) is not None:
            comm.append((r, c))
        elif r.imag > 0:
            incomm.append((theta, c))

    notes = []
    taus_raw = [(th / TWO_PI) % 1.0 for th, _ in incomm]
    if incomm:
        taus, mat, verified = _fold_relations(taus_raw, cfg)
        if not verified:
            notes.append("integer relation among angles not resolved; per-section specs are approximate")
    else:
        taus, mat, verified = [], [], True
    m = len(taus)

    sections = []
    for k in range(g):
        u = sum(2 * (c * r**k).real if r.imag > 0 else (c * r**k).real
                for r, c in comm if r.imag >= 0)
        amps, freqs, phases = [], [], []
        for (theta, c), row in zip(incomm, mat):
            amps.append(2 * abs(c))
            freqs.append(tuple(g * e for e in row))
            phases.append(math.remainder(theta * k + math.atan2(c.imag, c.real), TWO_PI))
        trig = TrigPolySpec(m, tuple(amps), tuple(freqs), tuple(phases), tuple(taus))
        sections.append(Section(k, (float(u),), trig))
    return Decomposition(
        GrowthClass.BOUNDED_OSCILLATORY,
        sd,
        g=g,
        sections=tuple(sections),
        independence_verified=verified,
        notes=tuple(notes),
        roots=rs,
    )
