"""Real linear recurrences with constant coefficients and their algebra.

A recurrence of order ``h`` is

    a[n+h] = eta[0] a[n+h-1] + ... + eta[h-1] a[n],    n >= 0,

together with the initial values ``a[0], ..., a[h-1]``.  Sums, scalar
multiples, termwise products, interlacements and sections of such sequences
are again recurrences; the functions here build them explicitly.

Example:

    >>> fib = LinearRecurrence(2, (1.0, 1.0), (0.0, 1.0))
    >>> float(evaluate(fib, 10, 10)[0])
    55.0
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import lfilter, lfiltic

from .errors import FitError, RecurrenceOverflowError
from .polynomial import Polynomial, find_roots, poly_from_roots, poly_lcm

__all__ = [
    "LinearRecurrence",
    "add",
    "char_poly",
    "constant",
    "cos_n",
    "evaluate",
    "fibonacci",
    "fit_minimal",
    "geometric",
    "hankel_rank",
    "interlace",
    "jump_state",
    "multiply",
    "periodic_from_values",
    "reduce",
    "scale",
    "sample",
    "section",
    "verify_satisfies",
]

# single evaluate call never materializes more terms than this
MAX_TERMS = 100_000_000
# below this starting index we iterate from the start instead of jumping
_JUMP_THRESHOLD = 1 << 16

ROOT_TOL = 1e-8


@dataclass(frozen=True)
class LinearRecurrence:
    order: int
    coefficients: tuple[float, ...]
    initial: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        init = tuple(float(v) for v in self.initial)
        if not isinstance(self.order, (int, np.integer)) or self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order!r}")
        if len(coeffs) != self.order or len(init) != self.order:
            raise ValueError(
                f"order {self.order} needs {self.order} coefficients and initial "
                f"values, got {len(coeffs)} and {len(init)}"
            )
        if not all(math.isfinite(x) for x in coeffs + init):
            raise ValueError("coefficients and initial values must be finite")
        object.__setattr__(self, "order", int(self.order))
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "initial", init)

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[float], initial: Sequence[float]):
        return cls(len(coefficients), tuple(coefficients), tuple(initial))

    def terms(self, count: int) -> np.ndarray:
        """The first ``count`` terms."""
        if count <= 0:
            return np.empty(0)
        return evaluate(self, 0, count - 1)

    def __getitem__(self, n: int) -> float:
        return float(evaluate(self, n, n)[0])

    # -- JSON ---------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "coefficients": list(self.coefficients),
            "initial": list(self.initial),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "LinearRecurrence":
        if not isinstance(data, dict):
            raise ValueError("recurrence JSON must be an object")
        for key in ("order", "coefficients", "initial"):
            if key not in data:
                raise ValueError(f"missing field {key!r}")
        order = data["order"]
        if isinstance(order, bool) or not isinstance(order, int):
            raise ValueError("field 'order' must be an integer")
        for key in ("coefficients", "initial"):
            vals = data[key]
            if not isinstance(vals, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals
            ):
                raise ValueError(f"field {key!r} must be a list of numbers")
        try:
            return cls(order, tuple(data["coefficients"]), tuple(data["initial"]))
        except ValueError as exc:
            raise ValueError(f"field 'order': {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "LinearRecurrence":
        return cls.from_dict(json.loads(text))


# -- constructors --------------------------------------------------------------


def constant(c: float) -> LinearRecurrence:
    return LinearRecurrence(1, (1.0,), (c,))


def geometric(ratio: float, start: float = 1.0) -> LinearRecurrence:
    return LinearRecurrence(1, (ratio,), (start,))


def fibonacci() -> LinearRecurrence:
    return LinearRecurrence(2, (1.0, 1.0), (0.0, 1.0))


def cos_n(omega: float = 1.0) -> LinearRecurrence:
    """cos(omega * n) via a[n+2] = 2 cos(omega) a[n+1] - a[n]."""
    c = math.cos(omega)
    return LinearRecurrence(2, (2.0 * c, -1.0), (1.0, c))


def periodic_from_values(values: Sequence[float]) -> LinearRecurrence:
    """Periodic extension of ``values``; characteristic polynomial z^P - 1."""
    values = tuple(float(v) for v in values)
    if not values:
        raise ValueError("need at least one value")
    p = len(values)
    return LinearRecurrence(p, (0.0,) * (p - 1) + (1.0,), values)


# -- evaluation -----------------------------------------------------------------


def _filter_coeffs(rec: LinearRecurrence) -> np.ndarray:
    return np.concatenate(([1.0], -np.asarray(rec.coefficients)))


def companion(rec: LinearRecurrence) -> np.ndarray:
    """Matrix mapping (a[n], ..., a[n+h-1]) to (a[n+1], ..., a[n+h])."""
    h = rec.order
    m = np.zeros((h, h))
    m[:-1, 1:] = np.eye(h - 1)
    m[-1, :] = rec.coefficients[::-1]
    return m


def jump_state(rec: LinearRecurrence, n: int) -> np.ndarray:
    """State vector (a[n], ..., a[n+h-1]) by companion-matrix powering."""
    if n < 0:
        raise ValueError("index must be non-negative")
    if n >= 1 << 62:
        raise OverflowError(f"index {n} too large")
    state = np.asarray(rec.initial, dtype=float)
    if n == 0:
        return state
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.linalg.matrix_power(companion(rec), n) @ state
    if not np.all(np.isfinite(out)):
        raise RecurrenceOverflowError(n, f"non-finite state when jumping to index {n}")
    return out


def _run(rec: LinearRecurrence, state: np.ndarray, count: int) -> np.ndarray:
    """``count`` terms starting from the state (a[s], ..., a[s+h-1])."""
    h = rec.order
    if count <= h:
        return state[:count].copy()
    a = _filter_coeffs(rec)
    zi = lfiltic([1.0], a, state[::-1])
    with np.errstate(over="ignore", invalid="ignore"):
        tail = lfilter([1.0], a, np.zeros(count - h), zi=zi)[0]
    return np.concatenate((state, tail))


def evaluate(rec: LinearRecurrence, n_lo: int, n_hi: int) -> np.ndarray:
    """Terms a[n_lo], ..., a[n_hi] by iterating the recurrence.

    Raises :class:`RecurrenceOverflowError` carrying the first index whose
    value is not finite.
    """
    if not 0 <= n_lo <= n_hi:
        raise ValueError(f"need 0 <= n_lo <= n_hi, got {n_lo}, {n_hi}")
    count = n_hi - n_lo + 1
    if count > MAX_TERMS or n_hi >= 1 << 62:
        raise OverflowError(f"index range [{n_lo}, {n_hi}] exceeds evaluation budget")
    if n_lo >= _JUMP_THRESHOLD:
        start, state = n_lo, jump_state(rec, n_lo)
    else:
        start, state = 0, np.asarray(rec.initial, dtype=float)
    vals = _run(rec, state, n_hi - start + 1)
    bad = ~np.isfinite(vals)
    if bad.any():
        raise RecurrenceOverflowError(start + int(np.argmax(bad)))
    return vals[n_lo - start:]


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("RECSHAPE_THREADS", "1")))
    except ValueError:
        return 1


def sample(rec: LinearRecurrence, n_lo: int, n_hi: int, threads: int | None = None) -> np.ndarray:
    """Like :func:`evaluate`, optionally split across threads.

    Each chunk starts from a jump-ahead state, so results agree with
    sequential iteration only up to rounding.  ``RECSHAPE_THREADS`` sets the
    default worker count (1).
    """
    threads = threads or _thread_count()
    count = n_hi - n_lo + 1
    if threads <= 1 or count < 4 * _JUMP_THRESHOLD:
        return evaluate(rec, n_lo, n_hi)
    edges = np.linspace(n_lo, n_hi + 1, threads + 1).astype(int)
    with ThreadPoolExecutor(threads) as pool:
        chunks = list(pool.map(lambda ab: evaluate(rec, ab[0], ab[1] - 1), zip(edges[:-1], edges[1:])))
    return np.concatenate(chunks)


def char_poly(rec: LinearRecurrence) -> Polynomial:
    """z^h - eta_1 z^(h-1) - ... - eta_h."""
    return Polynomial(tuple(_filter_coeffs(rec)))


def _from_poly(poly: Polynomial, values: np.ndarray) -> LinearRecurrence:
    """Recurrence annihilated by ``poly`` whose sequence starts with ``values``."""
    c = poly.normalize().array()
    h = len(c) - 1
    if h == 0:
        return constant(0.0)
    # + 0.0 turns -0.0 into 0.0
    return LinearRecurrence(h, tuple(-c[1:] + 0.0), tuple(values[:h]))


# -- algebra --------------------------------------------------------------------


def verify_satisfies(rec: LinearRecurrence, samples: Sequence[float], tol: float | None = None) -> float:
    """Largest scaled residual of the recurrence relation over ``samples``.

    The residual at n is |s[n+h] - sum_i eta_i s[n+h-i]| and the result is
    divided by 1 + max|s|.  ``tol`` is accepted for symmetry with the other
    checks; comparison is left to the caller.
    """
    s = np.asarray(samples, dtype=float)
    h = rec.order
    if len(s) <= h:
        raise ValueError(f"need more than {h} samples")
    # columns s[n+h-1], ..., s[n]
    windows = np.lib.stride_tricks.sliding_window_view(s[:-1], h)[:, ::-1]
    resid = s[h:] - windows @ np.asarray(rec.coefficients)
    return float(np.max(np.abs(resid)) / (1.0 + np.max(np.abs(s))))


def add(a: LinearRecurrence, b: LinearRecurrence, *, reduce_order: bool = False) -> LinearRecurrence:
    """Termwise sum; characteristic polynomial is the lcm of both."""
    poly = poly_lcm(char_poly(a), char_poly(b), ROOT_TOL)
    h = poly.degree
    values = evaluate(a, 0, h - 1) + evaluate(b, 0, h - 1)
    out = _from_poly(poly, values)
    return reduce(out) if reduce_order else out


def scale(rec: LinearRecurrence, c: float) -> LinearRecurrence:
    if not math.isfinite(c):
        raise ValueError("scale factor must be finite")
    return LinearRecurrence(rec.order, rec.coefficients, tuple(c * v for v in rec.initial))


def multiply(
    a: LinearRecurrence, b: LinearRecurrence, *, tol: float = 1e-9
) -> LinearRecurrence:
    """Termwise product, recovered from samples by :func:`fit_minimal`."""
    max_order = a.order * b.order
    n = 2 * max_order + 8
    samples = evaluate(a, 0, n - 1) * evaluate(b, 0, n - 1)
    try:
        return fit_minimal(samples, max_order, tol)
    except FitError as exc:
        raise FitError(
            f"product not recovered from {n} samples at tol {tol:g}; "
            "try a larger sample or looser tolerance"
        ) from exc


def interlace(parts: Sequence[LinearRecurrence], *, reduce_order: bool = False) -> LinearRecurrence:
    """Sequence c[g n + k] = parts[k][n].

    The characteristic polynomial is the lcm of p_k(z^g) over the parts, a
    divisor of their product.
    """
    parts = list(parts)
    g = len(parts)
    if g == 0:
        raise ValueError("need at least one part")
    if g == 1:
        return parts[0]
    poly = char_poly(parts[0]).substitute_power(g)
    for p in parts[1:]:
        poly = poly_lcm(poly, char_poly(p).substitute_power(g), ROOT_TOL)
    h = poly.degree
    per = -(-h // g)
    cols = [evaluate(p, 0, per - 1) for p in parts]
    values = np.stack(cols, axis=1).reshape(-1)[:h]
    out = _from_poly(poly, values)
    return reduce(out) if reduce_order else out


def section(rec: LinearRecurrence, g: int, k: int) -> LinearRecurrence:
    """Subsequence a[g n + k]; characteristic roots are the g-th powers."""
    if g < 1 or not 0 <= k < g:
        raise ValueError(f"need g >= 1 and 0 <= k < g, got g={g}, k={k}")
    if g == 1:
        return rec
    rs = find_roots(char_poly(rec), ROOT_TOL)
    # distinct roots may share a g-th power; keep the larger multiplicity
    images: list[complex] = []
    mults: list[int] = []
    for r, m in rs:
        w = r**g
        for i, v in enumerate(images):
            if abs(v - w) <= ROOT_TOL * max(1.0, abs(w)):
                mults[i] = max(mults[i], m)
                break
        else:
            images.append(w)
            mults.append(m)
    poly = poly_from_roots(images, mults)
    h = poly.degree
    vals = evaluate(rec, 0, k + g * (h - 1))[k::g]
    return _from_poly(poly, vals)


# -- fitting --------------------------------------------------------------------


def _ls_fit(s: np.ndarray, r: int) -> tuple[np.ndarray, float]:
    """Least-squares coefficients of order r and scaled one-step residual."""
    windows = np.lib.stride_tricks.sliding_window_view(s[:-1], r)[:, ::-1]
    rhs = s[r:]
    norms = np.maximum(np.max(np.abs(windows), axis=1), np.abs(rhs))
    norms[norms == 0] = 1.0
    eta, *_ = np.linalg.lstsq(windows / norms[:, None], rhs / norms, rcond=None)
    resid = np.max(np.abs(rhs - windows @ eta)) if len(rhs) else 0.0
    return eta, float(resid)


def fit_minimal(
    samples: Sequence[float], max_order: int, tol: float = 1e-9, *, min_order: int = 1
) -> LinearRecurrence:
    """Lowest-order recurrence reproducing ``samples`` within ``tol``.

    Orders are tried in increasing order with a Hankel least-squares solve.
    Order r is accepted once the residual (scaled by the sample magnitude) is
    below ``tol`` at both r and r + 1, and iterating the fitted recurrence from
    the first r samples reproduces all of them to ``tol * len(samples)``
    (relative).
    """
    s = np.asarray(samples, dtype=float)
    if max_order < 1:
        raise ValueError("max_order must be positive")
    if len(s) < 2 * max_order + 2:
        raise ValueError(f"need at least {2 * max_order + 2} samples, got {len(s)}")
    mag = float(np.max(np.abs(s)))
    if mag == 0.0:
        return LinearRecurrence(1, (1.0,), (0.0,))
    cache: dict[int, tuple[np.ndarray, float]] = {}

    def fit(r):
        if r not in cache:
            cache[r] = _ls_fit(s, r)
        return cache[r]

    for r in range(min_order, max_order + 1):
        eta, res = fit(r)
        if res > tol * mag or fit(r + 1)[1] > tol * mag:
            continue
        cand = LinearRecurrence(r, tuple(eta), tuple(s[:r]))
        try:
            rep = evaluate(cand, 0, len(s) - 1)
        except RecurrenceOverflowError:
            continue
        # one-step errors accumulate along the iteration, so allow linear growth
        if np.max(np.abs(rep - s)) <= tol * mag * len(s):
            return cand
    raise FitError(f"not C-finite at order <= {max_order} within tolerance {tol:g}")


def hankel_rank(samples: Sequence[float], size: int, rtol: float = 1e-10) -> int:
    """Numerical rank of the size x size Hankel matrix of the samples."""
    s = np.asarray(samples, dtype=float)
    hk = np.lib.stride_tricks.sliding_window_view(s[: 2 * size - 1], size)
    sv = np.linalg.svd(hk, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def reduce(rec: LinearRecurrence, tol: float = 1e-9) -> LinearRecurrence:
    """Minimal-order recurrence for the same sequence, found by fitting.

    A Hankel rank estimate skips the fit when no reduction is possible and
    otherwise tells the fit where to start looking.
    """
    n = 2 * rec.order + 2
    samples = evaluate(rec, 0, 4 * n - 1)
    rank = hankel_rank(samples, rec.order + 1)
    if rank > rec.order:
        return rec
    try:
        out = fit_minimal(samples, rec.order, tol, min_order=max(1, rank - 2))
    except FitError:
        return rec
    return out if out.order < rec.order else rec
