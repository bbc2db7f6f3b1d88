"""Real polynomials and simultaneous root finding.

Coefficients are stored highest degree first, the same convention as
``numpy.polyval``.  Roots are found with the Aberth-Ehrlich iteration,
clustered into multiple roots (candidates from overlapping inclusion discs,
kept when their spread matches rounding of a multiple root), then polished
with Newton steps on a compensated (double-double) Horner evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RootFindingError

__all__ = [
    "Polynomial",
    "RootSet",
    "find_roots",
    "horner_compensated",
    "poly_from_roots",
    "poly_lcm",
]

_EPS = np.finfo(float).eps
_SPLITTER = 134217729.0  # 2**27 + 1


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial, coefficients highest degree first."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(x) for x in self.coeffs)
        # strip leading zeros, keep at least one coefficient
        i = 0
        while i < len(c) - 1 and c[i] == 0.0:
            i += 1
        c = c[i:]
        if not c:
            raise ValueError("polynomial needs at least one coefficient")
        if not all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def normalize(self) -> "Polynomial":
        lead = self.coeffs[0]
        if lead == 0.0:
            return self
        return Polynomial(tuple(x / lead for x in self.coeffs))

    def __call__(self, z):
        return np.polyval(np.asarray(self.coeffs), z)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(tuple(np.convolve(self.coeffs, other.coeffs)))

    def substitute_power(self, g: int) -> "Polynomial":
        """Return p(z**g)."""
        out = np.zeros(self.degree * g + 1)
        out[::g] = self.coeffs
        return Polynomial(tuple(out))

    def array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)})"


@dataclass(frozen=True)
class RootSet:
    """Distinct roots with multiplicities, plus the max residual |p(root)|."""

    roots: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    residual: float = 0.0
    poly: Polynomial | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.roots) != len(self.multiplicities):
            raise ValueError("roots and multiplicities differ in length")
        if any(m < 1 for m in self.multiplicities):
            raise ValueError("multiplicities must be positive")

    @property
    def degree(self) -> int:
        return sum(self.multiplicities)

    def __iter__(self):
        return iter(zip(self.roots, self.multiplicities))

    def __len__(self):
        return len(self.roots)

    def expanded(self) -> np.ndarray:
        """All roots repeated by multiplicity."""
        return np.array(
            [r for r, m in zip(self.roots, self.multiplicities) for _ in range(m)],
            dtype=complex,
        )

    def to_json(self) -> dict:
        return {
            "roots": [[r.real, r.imag] for r in self.roots],
            "multiplicities": list(self.multiplicities),
            "residual": self.residual,
        }


# -- error-free transformations --------------------------------------------


def _two_sum(a, b):
    s = a + b
    z = s - a
    return s, (a - (s - z)) + (b - z)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def horner_compensated(coeffs, z) -> np.ndarray:
    """Evaluate a real polynomial at complex points in ~twice working precision.

    Complex compensated Horner scheme: the running value is updated with
    error-free products and sums, the rounding errors are accumulated by a
    second (plain) Horner pass and added at the end.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    z = np.asarray(z, dtype=complex)
    u, v = z.real, z.imag
    x = np.full(z.shape, coeffs[0])
    y = np.zeros(z.shape)
    ex = np.zeros(z.shape)
    ey = np.zeros(z.shape)
    for a in coeffs[1:]:
        # (x + iy)(u + iv) + a
        p1, e1 = _two_prod(x, u)
        p2, e2 = _two_prod(y, v)
        p3, e3 = _two_prod(x, v)
        p4, e4 = _two_prod(y, u)
        r1, f1 = _two_sum(p1, -p2)
        r2, f2 = _two_sum(r1, a)
        i1, f3 = _two_sum(p3, p4)
        err_re = e1 - e2 + f1 + f2
        err_im = e3 + e4 + f3
        ex, ey = ex * u - ey * v + err_re, ex * v + ey * u + err_im
        x, y = r2, i1
    return (x + ex) + 1j * (y + ey)


def _abs_bound(coeffs, z) -> np.ndarray:
    """Sum |a_k| |z|^k, the scale of rounding noise in evaluating p(z)."""
    return np.polyval(np.abs(coeffs), np.abs(z))


# -- Aberth iteration ------------------------------------------------------


def _initial_guesses(coeffs: np.ndarray, offset: float = 0.4, stretch: float = 1.0) -> np.ndarray:
    """Points on circles read off the Newton polygon of p.

    Each edge of the upper convex hull of (k, log|a_k|) between k = i and
    k = j gets j - i points on a circle of radius (|a_i| / |a_j|)^(1/(j-i)),
    which is the typical modulus of that many roots.  Roots of very different
    sizes then each get starting points at their own scale.
    """
    n = len(coeffs) - 1
    a = np.abs(coeffs[::-1])  # a[k] multiplies z^k
    ks = np.nonzero(a)[0]
    ys = np.log(a[ks])
    hull: list[int] = []
    for i in range(len(ks)):
        while len(hull) >= 2:
            k0, k1 = ks[hull[-2]], ks[hull[-1]]
            y0, y1 = ys[hull[-2]], ys[hull[-1]]
            # drop the middle point unless it lies strictly above the chord
            if (y1 - y0) * (ks[i] - k0) <= (ys[i] - y0) * (k1 - k0):
                hull.pop()
            else:
                break
        hull.append(i)
    out = []
    for h0, h1 in zip(hull[:-1], hull[1:]):
        cnt = int(ks[h1] - ks[h0])
        radius = np.exp((ys[h0] - ys[h1]) / cnt) * stretch
        angles = 2 * np.pi * np.arange(cnt) / cnt + offset + 2 * np.pi * len(out) / n
        out.extend(radius * np.exp(1j * angles))
    return np.asarray(out, dtype=complex)


# start circles and freezing for successive attempts.  Freezing a point once
# |p| is at the rounding floor is fast, but near a multiple root that floor
# covers a whole disc and a surplus approximation can stall there.
_ATTEMPTS = ((0.4, 1.0, True), (0.4, 1.0, False), (1.3, 1.7, False))


def _aberth(
    coeffs: np.ndarray, maxiter: int, offset: float = 0.4, stretch: float = 1.0, freeze: bool = True
) -> tuple[np.ndarray, bool]:
    n = len(coeffs) - 1
    dcoeffs = np.polyder(coeffs)
    z = _initial_guesses(coeffs, offset, stretch)
    active = np.ones(n, dtype=bool)
    for _ in range(maxiter):
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            return z, True
        za = z[idx]
        # compensated evaluation resolves p well inside a multiple-root
        # cluster, where plain Horner is all rounding noise
        p = horner_compensated(coeffs, za)
        dp = horner_compensated(dcoeffs, za)
        if freeze:
            # evaluation noise, plus |p'| times the spacing of floats near z
            floor = 4 * n * _EPS * _EPS * _abs_bound(coeffs, za) + 2 * _EPS * np.abs(dp * za)
            done = np.abs(p) <= floor
        else:
            done = p == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = za[:, None] - z[None, :]
            diff[np.arange(len(idx)), idx] = np.inf
            s = np.sum(1.0 / diff, axis=1)
            w = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(w)
        w[bad] = 0.0
        step_small = np.abs(w) <= 4 * _EPS * np.maximum(np.abs(za), 1e-300)
        z[idx] = za - np.where(done, 0.0, w)
        active[idx[done | step_small]] = False
    return z, not active.any()


# -- clustering ------------------------------------------------------------


def _inclusion_radii(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Weierstrass inclusion radii n |p(z_i)| / |a_n prod_{j != i} (z_i - z_j)|.

    A connected union of k of these discs holds exactly k roots, so
    components are safe to merge.  |p| is padded by the effect of rounding
    the coefficients, so roots that differ only at that level merge into one
    multiple root.
    """
    n = len(coeffs) - 1
    p = np.abs(horner_compensated(coeffs, z)) + 2 * n * _EPS * _abs_bound(coeffs, z)
    diff = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(diff, 1.0)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        # sum of logs keeps the product clear of overflow for high degree
        log_prod = np.sum(np.log(diff), axis=1)
        r = n * np.exp(np.log(p / abs(coeffs[0])) - log_prod)
    return np.where(np.isnan(r), np.inf, r)


def _is_multiple_root(coeffs: np.ndarray, points: np.ndarray) -> bool:
    """Whether ``points`` are one k-fold root smeared by rounding.

    Relative coefficient errors tau move a k-fold root at c by about
    (k! tau sum|a_i||c|^i / |p^(k)(c)|)^(1/k); the group qualifies when its
    spread around the centroid is within twice that.
    """
    k = len(points)
    c = np.array([np.mean(points)])
    spread = float(np.max(np.abs(points - c[0])))
    d = coeffs
    for _ in range(k):
        d = np.polyder(d)
    pk = abs(np.polyval(d, c)[0]) if len(d) else 0.0
    if pk == 0.0:
        return True
    tau = 100 * len(coeffs) * _EPS
    log_r = (math.lgamma(k + 1) + math.log(tau * _abs_bound(coeffs, c)[0]) - math.log(pk)) / k
    return spread <= 2.0 * math.exp(log_r)


def _same_cluster(a: np.ndarray, b: np.ndarray) -> bool:
    """Rounding smears a multiple root into a roughly regular polygon, so
    two parts of one cluster are about as wide as they are apart.  Two tight
    groups far from each other are separate roots."""
    if len(a) == 1 and len(b) == 1:
        return True
    width = max(np.max(np.abs(a - a.mean())), np.max(np.abs(b - b.mean())))
    return width >= 0.1 * abs(a.mean() - b.mean())


def _components(coeffs: np.ndarray, z: np.ndarray, tol: float) -> list[list[int]]:
    """Group approximations that represent one multiple root.

    Groups must be closed under conjugation (the polynomial is real).  A
    point whose partner ends up elsewhere is kept on its own and the
    grouping is redone.
    """
    radii = _inclusion_radii(coeffs, z)
    partner = np.argmin(np.abs(z[:, None] - np.conj(z)[None, :]), axis=1)
    solo: set[int] = set()
    while True:
        groups = _merge(coeffs, z, tol, radii, solo)
        where = {i: k for k, g in enumerate(groups) for i in g}
        bad = {i for g in groups if len(g) > 1 for i in g if where[partner[i]] != where[i]}
        if not bad - solo:
            return groups
        solo |= bad


def _merge(coeffs, z, tol, radii, solo) -> list[list[int]]:
    """Overlapping inclusion discs give candidate groups.  Inside each, points
    merge closest pair first, and only while the merged centroid passes the
    multiplicity test; points within ``tol * max(1, |z|)`` always merge.
    """
    n = len(z)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            d = abs(z[i] - z[j])
            if d <= radii[i] + radii[j] or d <= tol * max(1.0, abs(z[i]), abs(z[j])):
                pairs.append((d, i, j))
    members = {i: [i] for i in range(n)}
    for d, i, j in sorted(pairs):
        a, b = find(i), find(j)
        if a == b:
            continue
        group = members[a] + members[b]
        near = d <= tol * max(1.0, abs(z[i]), abs(z[j]))
        if near or (i not in solo and j not in solo and _same_cluster(z[members[a]], z[members[b]]) and _is_multiple_root(coeffs, z[group])):
            parent[a] = b
            members[b] = group
            del members[a]
    return list(members.values())


def _polish(coeffs: np.ndarray, z: np.ndarray, mult: int, steps: int = 4) -> np.ndarray:
    """Newton on the (mult-1)-th derivative, using compensated evaluation.

    Vectorized over ``z``; each point keeps its best iterate by residual.
    """
    c = coeffs
    for _ in range(mult - 1):
        c = np.polyder(c)
    dc = np.polyder(c)
    z = np.asarray(z, dtype=complex).copy()
    if len(dc) == 0 or z.size == 0:
        return z
    best = z.copy()
    val = horner_compensated(c, z)
    best_res = np.abs(val)
    live = np.ones(z.shape, dtype=bool)
    for _ in range(steps):
        d = np.polyval(dc, z)
        live &= d != 0
        if not live.any():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(live, z - val / d, z)
        val = horner_compensated(c, z)
        res = np.abs(val)
        better = live & (res < best_res)
        best = np.where(better, z, best)
        best_res = np.where(better, res, best_res)
        live &= better
    return best


def _symmetrize(roots: list[complex], mults: list[int], tol: float):
    """Enforce conjugate symmetry expected of a real polynomial."""
    out_r: list[complex] = []
    out_m: list[int] = []
    used = [False] * len(roots)
    for i, (r, m) in enumerate(zip(roots, mults)):
        if used[i]:
            continue
        used[i] = True
        if abs(r.imag) <= tol * max(1.0, abs(r)):
            out_r.append(complex(r.real, 0.0))
            out_m.append(m)
            continue
        # nearest unused conjugate partner with same multiplicity
        best, bd = None, np.inf
        for j in range(len(roots)):
            if not used[j] and mults[j] == m:
                d = abs(roots[j] - r.conjugate())
                if d < bd:
                    best, bd = j, d
        if best is None:
            out_r.append(r)
            out_m.append(m)
            continue
        used[best] = True
        avg = 0.5 * (r + roots[best].conjugate())
        out_r.extend([avg, avg.conjugate()])
        out_m.extend([m, m])
    return out_r, out_m


def _solve(coeffs, tol, maxiter, offset, stretch, freeze):
    """One Aberth run, clustered and polished: (roots, mults, residual, excess, ok).

    ``excess`` is the worst ratio of |p(root)| to the rounding noise of
    evaluating p at that root.
    """
    if len(coeffs) == 2:
        raw, ok = np.array([-coeffs[1] + 0j]), True
    else:
        raw, ok = _aberth(coeffs, maxiter, offset, stretch, freeze)
    groups = _components(coeffs, raw, tol)
    roots, mults = _polish_groups(coeffs, raw, groups)
    excess = _excess(coeffs, np.array(roots), mults, tol)
    # a merge whose root misses by far more than rounding was a crowd of
    # distinct roots, not one multiple root: keep its members apart
    split = [g for g, m, e in zip(_group_order(groups), mults, excess) if m > 1 and e > 1e4]
    if split:
        groups = [g for g in groups if g not in split] + [[i] for g in split for i in g]
        roots, mults = _polish_groups(coeffs, raw, groups)
    roots, mults = _symmetrize(roots, mults, tol)
    z = np.array(roots)
    res = np.abs(horner_compensated(coeffs, z))
    excess = _excess(coeffs, z, mults, tol)
    return roots, mults, float(np.max(res)), float(np.max(excess)), ok


def _group_order(groups: list[list[int]]) -> list[list[int]]:
    """Groups in the order :func:`_polish_groups` emits their roots."""
    return sorted(groups, key=len)


def _polish_groups(coeffs, raw, groups):
    roots: list[complex] = []
    mults: list[int] = []
    by_mult: dict[int, list[complex]] = {}
    for group in _group_order(groups):
        by_mult.setdefault(len(group), []).append(complex(np.mean(raw[group])))
    for m, centres in sorted(by_mult.items()):
        roots.extend(complex(r) for r in _polish(coeffs, np.array(centres), m))
        mults.extend([m] * len(centres))
    return roots, mults


def _excess(coeffs, z, mults, tol) -> np.ndarray:
    """|p(z_i)| over the rounding noise of evaluating p at z_i."""
    res = np.abs(horner_compensated(coeffs, z))
    noise = 16 * len(coeffs) * _EPS * _abs_bound(coeffs, z) + np.finfo(float).tiny
    # a root only known to tol, as after a tol merge, leaves this much residual
    for i, m in enumerate(mults):
        d = coeffs
        for _ in range(m):
            d = np.polyder(d)
        h = tol * max(1.0, abs(z[i]))
        noise[i] += abs(np.polyval(d, z[i])) * h**m / math.factorial(m)
    return res / noise


def find_roots(p: Polynomial, tol: float = 1e-8, maxiter: int = 2000) -> RootSet:
    """All roots of ``p`` with multiplicities.

    Roots whose inclusion discs overlap, or that lie within
    ``tol * max(1, |root|)`` of each other, are merged; the merged value is the
    cluster mean polished on the matching derivative.
    """
    if p.degree < 1:
        raise RootFindingError("degree-0 polynomial has no roots", residual=np.nan)
    coeffs = p.normalize().array()
    # exact zero roots factor out
    nzeros = 0
    while coeffs[-1] == 0.0 and len(coeffs) > 1:
        coeffs = coeffs[:-1]
        nzeros += 1
    roots: list[complex] = []
    mults: list[int] = []
    if len(coeffs) > 1:
        best = None
        for offset, stretch, freeze in _ATTEMPTS:
            attempt = _solve(coeffs, tol, maxiter, offset, stretch, freeze)
            if best is None or attempt[3] < best[3]:
                best = attempt
            # a misplaced cluster shows as a residual far above rounding noise
            if attempt[4] and attempt[3] <= 1e4:
                break
        roots, mults, residual, excess, ok = best
        if not ok and excess > 1.0:
            raise RootFindingError(
                f"Aberth iteration did not converge in {maxiter} steps",
                residual=residual,
            )
    else:
        residual = 0.0
    if nzeros:
        roots.append(0j)
        mults.append(nzeros)
    order = sorted(range(len(roots)), key=lambda i: (-abs(roots[i]), -roots[i].imag))
    return RootSet(
        roots=tuple(roots[i] for i in order),
        multiplicities=tuple(mults[i] for i in order),
        residual=residual,
        poly=p,
    )


# -- constructions from roots ----------------------------------------------


def poly_from_roots(roots, multiplicities) -> Polynomial:
    """Monic real polynomial with the given (conjugate-closed) roots."""
    expanded = [r for r, m in zip(roots, multiplicities) for _ in range(m)]
    if not expanded:
        return Polynomial((1.0,))
    c = np.poly(np.array(expanded, dtype=complex))
    return Polynomial(tuple(np.real(c)))


def _shared_roots(ra: RootSet, rb: RootSet, tol: float):
    shared, used = [], set()
    for r, m in ra:
        for j, (s, n) in enumerate(rb):
            if j in used:
                continue
            if abs(r - s) <= tol * max(1.0, abs(r)):
                used.add(j)
                shared.append((0.5 * (r + s), min(m, n)))
                break
    return shared


def poly_lcm(a: Polynomial, b: Polynomial, tol: float = 1e-8) -> Polynomial:
    """Least common multiple of two real polynomials, monic.

    Equal to the polynomial on the union of root multisets with the larger
    multiplicity.  Computed as ``a * (b / gcd)`` where the gcd is assembled
    from the shared roots, so coefficients of ``a`` survive unrounded.
    """
    a, b = a.normalize(), b.normalize()
    if a.degree == 0:
        return b
    if b.degree == 0:
        return a
    shared = _shared_roots(find_roots(a, tol), find_roots(b, tol), tol)
    if not shared:
        return a * b
    # snap shared roots to conjugate-symmetric values
    rs, ms = _symmetrize([r for r, _ in shared], [m for _, m in shared], tol)
    g = poly_from_roots(rs, ms)
    q, _ = np.polydiv(b.array(), g.array())
    return (a * Polynomial(tuple(np.real(q)))).normalize()
