import math

import numpy as np
import pytest

from recshape import (
    Classification,
    ClosureConfig,
    IntervalSet,
    LinearRecurrence,
    TrigPolySpec,
    TrigRangeError,
    add,
    closure_of,
    constant,
    cos_n,
    empirical_closure,
    fibonacci,
    geometric,
    hausdorff,
    merge_intervals,
    periodic_from_values,
    scale,
    trig_range,
)
from recshape.closure import TrigRangeConfig


def grid_range(spec, per_axis):
    axes = np.meshgrid(*[np.arange(per_axis) / per_axis] * spec.m, indexing="ij")
    vals = spec(np.stack(axes, axis=-1))
    return float(vals.min()), float(vals.max())


class TestMerge:
    def test_overlap(self):
        assert merge_intervals([(0, 1), (0.5, 2)]).to_list() == [[0, 2]]

    def test_touching(self):
        assert merge_intervals([(0, 1), (1, 2)]).to_list() == [[0, 2]]

    def test_disjoint_sorted(self):
        assert merge_intervals([(3, 4), (0, 1)]).to_list() == [[0, 1], [3, 4]]

    def test_gap_tol(self):
        assert len(merge_intervals([(0, 1), (1 + 1e-12, 2)], gap_tol=1e-9)) == 1
        assert len(merge_intervals([(0, 1), (1 + 1e-12, 2)])) == 2

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            merge_intervals([(2, 1)])

    def test_distance(self):
        s = IntervalSet(((0.0, 1.0), (3.0, 4.0)))
        np.testing.assert_allclose(s.distance([-1, 0.5, 2.0, 2.5, 5]), [1, 0, 1, 0.5, 1])


class TestHausdorff:
    def test_identical(self):
        assert hausdorff([(0, 1)], [(0, 1)]) == 0.0

    def test_shifted(self):
        assert hausdorff([(0, 1)], [(0.1, 1.1)]) == pytest.approx(0.1)

    def test_extra_point(self):
        assert hausdorff([(0, 1)], [(0, 1), (3, 3)]) == pytest.approx(2.0)

    def test_asymmetric_cover(self):
        # [0, 1] is far from the centre of [0, 3]
        assert hausdorff([(0, 3)], [(0, 1)]) == pytest.approx(2.0)
        assert hausdorff([(0, 1)], [(0, 3)]) == pytest.approx(2.0)

    def test_empty(self):
        assert hausdorff([], []) == 0.0
        assert hausdorff([(0, 1)], []) == math.inf


class TestTrigRange:
    def test_cos(self):
        spec = TrigPolySpec(1, (1.0,), ((1,),), (0.0,))
        lo, hi = trig_range(spec)
        assert lo == pytest.approx(-1.0, abs=1e-6)
        assert hi == pytest.approx(1.0, abs=1e-6)

    def test_cos_plus_cos_double(self):
        # cos x + cos 2x = 2c^2 + c - 1 with c = cos x, minimum at c = -1/4
        spec = TrigPolySpec(1, (1.0, 1.0), ((1,), (2,)), (0.0, 0.0))
        lo, hi = trig_range(spec)
        assert lo == pytest.approx(-1.125, abs=1e-6)
        assert hi == pytest.approx(2.0, abs=1e-6)
        g_lo, g_hi = grid_range(spec, 1 << 16)
        assert abs(lo - g_lo) < 1e-6 and abs(hi - g_hi) < 1e-6

    def test_two_dimensional(self):
        spec = TrigPolySpec(2, (1.0, 0.5, 0.3), ((1, 0), (0, 1), (1, 1)), (0.1, 0.7, 2.0))
        lo, hi = trig_range(spec)
        g_lo, g_hi = grid_range(spec, 2048)
        assert lo <= g_lo + 1e-9 and hi >= g_hi - 1e-9
        assert abs(lo - g_lo) < 1e-4 and abs(hi - g_hi) < 1e-4

    def test_empty(self):
        assert trig_range(TrigPolySpec(0)) == (0.0, 0.0)

    def test_too_many_dims(self):
        m = 8
        rows = tuple(tuple(int(i == j) for j in range(m)) for i in range(m))
        spec = TrigPolySpec(m, (1.0,) * m, rows, (0.0,) * m)
        with pytest.raises(TrigRangeError):
            trig_range(spec, TrigRangeConfig(max_dim=6))

    def test_independent_terms_sum(self):
        # independent coordinates: range is [-sum, sum]
        spec = TrigPolySpec(3, (1.0, 2.0, 0.5), ((1, 0, 0), (0, 1, 0), (0, 0, 1)), (0.3, 1.0, 2.0))
        lo, hi = trig_range(spec)
        assert lo == pytest.approx(-3.5, abs=1e-6)
        assert hi == pytest.approx(3.5, abs=1e-6)


class TestEmpirical:
    def test_cos_interval(self):
        emp = empirical_closure(cos_n(), 200_000)
        ((lo, hi),) = list(emp.intervals)
        assert lo == pytest.approx(-1.0, abs=1e-3)
        assert hi == pytest.approx(1.0, abs=1e-3)
        assert emp.points == ()

    def test_periodic_points(self):
        emp = empirical_closure(periodic_from_values([0, 2, 3]), 10_000)
        assert not emp.intervals
        assert emp.points == (0.0, 2.0, 3.0)

    def test_divergent(self):
        assert empirical_closure(geometric(2.0), 10_000).divergent

    def test_bad_args(self):
        with pytest.raises(ValueError):
            empirical_closure(cos_n(), 10, burn_in=10)


class TestClosureOf:
    def test_cos_exact(self):
        rep = closure_of(cos_n())
        assert rep.classification is Classification.INTERVALS
        assert rep.method == "EXACT"
        ((lo, hi),) = list(rep.intervals)
        assert lo == pytest.approx(-1.0, abs=1e-6)
        assert hi == pytest.approx(1.0, abs=1e-6)
        assert rep.countable_extras == ()

    def test_cos_empirical(self):
        rep = closure_of(cos_n(), ClosureConfig(empirical_only=True, n_samples=200_000))
        assert rep.method == "EMPIRICAL"
        ((lo, hi),) = list(rep.intervals)
        assert abs(lo + 1) < 1e-3 and abs(hi - 1) < 1e-3

    def test_fibonacci(self):
        rep = closure_of(fibonacci())
        assert rep.classification is Classification.DIVERGENT_COUNTABLE
        assert rep.countable_extras[:5] == (0.0, 1.0, 2.0, 3.0, 5.0)

    def test_geometric_half(self):
        rep = closure_of(geometric(0.5))
        assert rep.classification is Classification.CONVERGENT_COUNTABLE
        assert 0.0 in rep.countable_extras
        assert 1.0 in rep.countable_extras and 0.5 in rep.countable_extras

    def test_alternating(self):
        rep = closure_of(geometric(-1.0))
        assert rep.classification is Classification.FINITE_SET
        assert rep.countable_extras == (-1.0, 1.0)

    def test_constant(self):
        rep = closure_of(constant(3.0))
        assert rep.classification is Classification.FINITE_SET
        assert rep.countable_extras == (3.0,)

    def test_alternating_plus_cos(self):
        rep = closure_of(add(geometric(-1.0), cos_n()))
        assert rep.classification is Classification.INTERVALS
        ((lo, hi),) = list(rep.intervals)
        assert lo == pytest.approx(-2.0, abs=1e-6)
        assert hi == pytest.approx(2.0, abs=1e-6)

    def test_separated_sections(self):
        # 4 (-1)^n + cos n has closure [-5, -3] U [3, 5]
        rep = closure_of(add(scale(geometric(-1.0), 4.0), cos_n()))
        got = np.ravel(rep.intervals.to_list())
        np.testing.assert_allclose(got, [-5, -3, 3, 5], atol=1e-6)

    def test_transient_reported(self):
        # 2 * 0.1^n + cos n starts at 3, outside [-1, 1]
        rec = add(geometric(0.1, 2.0), cos_n())
        rep = closure_of(rec)
        assert rep.classification is Classification.INTERVALS
        assert any(abs(v - 3.0) < 1e-12 for v in rep.countable_extras)

    def test_unverified_falls_back(self):
        rec = add(cos_n(1.0), cos_n(1.0 + math.pi))
        rep = closure_of(rec, ClosureConfig(n_samples=200_000))
        assert rep.method == "EMPIRICAL"

    def test_polynomial_growth(self):
        rec = LinearRecurrence(2, (2.0, -1.0), (0.0, 1.0))
        assert closure_of(rec).classification is Classification.DIVERGENT_COUNTABLE

    def test_to_dict_keys(self):
        d = closure_of(cos_n()).to_dict()
        assert set(d) == {"classification", "intervals", "points", "method"}


@pytest.mark.parametrize("seed", range(6))
def test_exact_contains_samples(seed):
    """Every sampled value lies in the exact closure, and the two agree."""
    rng = np.random.default_rng(seed)
    rec = constant(float(rng.normal()))
    for _ in range(int(rng.integers(1, 3))):
        rec = add(rec, scale(cos_n(float(rng.uniform(0.3, 3.0))), float(rng.uniform(0.2, 2.0))))
    rep = closure_of(rec)
    assert rep.method == "EXACT"
    vals = rec.terms(100_000)
    assert float(np.max(rep.intervals.distance(vals))) < 1e-6
    emp = empirical_closure(rec, 100_000, gap_eps=0.05)
    assert hausdorff(list(rep.intervals), emp.as_intervals()) < 0.05
