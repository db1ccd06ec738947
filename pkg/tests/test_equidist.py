import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from slidesum.equidist import (
    BETA_GRID, beta_lengths, kloosterman_equidist, ks_statistic, residue_count, sato_tate_cdf,
    sato_tate_density, weyl_uniform,
)
from slidesum.families import build_kloosterman, chebyshev_U
from slidesum.regions import IntervalZm
from slidesum.ring import RationalFunction, field_context

R = RationalFunction.parse


class TestSatoTate:
    def test_values(self):
        assert sato_tate_cdf(0.0) == 0 and sato_tate_cdf(math.pi) == pytest.approx(1)
        assert sato_tate_cdf(math.pi / 2) == pytest.approx(0.5)

    def test_domain(self):
        for bad in (-0.1, 3.2, float("nan")):
            with pytest.raises(ValueError):
                sato_tate_cdf(bad)

    def test_derivative(self):
        th = np.linspace(0.001, math.pi - 0.001, 1000)
        h = 1e-6
        fd = (sato_tate_cdf(th + h) - sato_tate_cdf(th - h)) / (2 * h)
        assert np.abs(fd - sato_tate_density(th)).max() < 1e-6

    def test_against_quadrature(self):
        from scipy.integrate import quad
        for t in (0.3, 1.0, 2.5):
            assert sato_tate_cdf(t) == pytest.approx(quad(sato_tate_density, 0, t)[0], abs=1e-12)


class TestKS:
    @given(st.lists(st.floats(0, 1), min_size=1, max_size=50))
    def test_range_and_oracle(self, xs):
        ks = ks_statistic(xs, stats.uniform.cdf)
        x = np.sort(xs)
        n = len(x)
        d = max(np.max(np.arange(1, n + 1) / n - x), np.max(x - np.arange(n) / n))
        assert 0 <= ks <= 1 and ks == pytest.approx(d, abs=1e-12)


class TestWeyl:
    def test_linear_full_range(self):
        ctx = field_context(101)
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            st_ = weyl_uniform(R("X"), IntervalZm(101, 0, 101), ctx, H=5)
        assert any("degree" in str(x.message) for x in w)
        assert st_.weyl[0] == pytest.approx(1)
        assert st_.max_weyl() < 1e-12

    def test_square_short_interval_recorded(self):
        p = 10007
        s = weyl_uniform(R("X^2"), IntervalZm(p, 0, math.isqrt(p)), field_context(p))
        assert 0 <= s.ks <= 1 and s.n == 100

    def test_cube_decay(self):
        p = 10007
        ctx = field_context(p)
        r = math.ceil(math.sqrt(p))
        short = weyl_uniform(R("X^3"), IntervalZm(p, 1, 2 * r), ctx).max_weyl()
        long = weyl_uniform(R("X^3"), IntervalZm(p, 1, 32 * r), ctx).max_weyl()
        assert long < 0.25 and long < short

    def test_poles_dropped(self):
        ctx = field_context(11)
        s = weyl_uniform(R("1/X+X^2"), IntervalZm(11, 0, 11), ctx)
        assert s.n == 10

    def test_modulus_mismatch(self):
        with pytest.raises(ValueError):
            weyl_uniform(R("X^2"), IntervalZm(12, 0, 3), field_context(11))


class TestKloosterman:
    def test_complete_sums(self):
        p = 1009
        ctx = field_context(p)
        kl = build_kloosterman(ctx)
        s = kloosterman_equidist(ctx, IntervalZm(p, 0, p), d_max=4, kloosterman=kl)
        assert s.n == p - 1
        x = kl.values.real[1:]
        for d in range(1, 5):
            expected = chebyshev_U(d, x).mean()
            assert s.weyl[d] == pytest.approx(expected, abs=1e-12)
            assert abs(s.weyl[d]) <= (d + 1) * 5 / math.sqrt(p)

    def test_full_range_ks(self):
        p = 10007
        s = kloosterman_equidist(field_context(p), IntervalZm(p, 0, p))
        assert s.ks <= 0.05 and s.target == "sato_tate"

    def test_ks_decreases(self):
        p = 10007
        ctx = field_context(p)
        kl = build_kloosterman(ctx)
        a, b = (kloosterman_equidist(ctx, IntervalZm(p, 1, L), kloosterman=kl).ks
                for L in (2 * 101, 32 * 101))
        assert b < a


class TestResidues:
    def test_identity(self):
        p = 101
        r = residue_count(R("X"), IntervalZm(p, 5, 30), field_context(p))
        assert r.count == 30 and r.delta_f == 1 and r.relative_deviation == 0

    def test_cubes_bijection(self):
        p = 101
        assert p % 3 == 2
        r = residue_count(R("X^3"), IntervalZm(p, 5, 30), field_context(p))
        assert r.count == 30

    def test_full_group(self):
        p = 1009
        r = residue_count(R("X^2"), IntervalZm(p, 0, p), field_context(p))
        assert r.count == (p + 1) // 2 and r.delta_f == Fraction(p + 1, 2 * p)

    def test_squares_short_interval(self):
        p = 10007
        r = residue_count(R("X^2"), IntervalZm(p, 1, 404), field_context(p))
        assert r.relative_deviation <= 0.2 and r.count <= 404


def test_beta_lengths():
    assert BETA_GRID == (2, 4, 8, 16, 32)
    assert beta_lengths(10007) == [202, 404, 808, 1616, 3232]
    assert beta_lengths(101)[-1] == 101
