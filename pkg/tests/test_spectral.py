import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from slidesum.families import build_kloosterman, build_korobov, build_quadratic_phase, legendre_family
from slidesum.regions import IntervalZm
from slidesum.ring import field_context
from slidesum.spectral import (
    ConsistencyError, completion_bound, completion_l1, correlations, correlations_direct,
    correlations_plancherel, dft, dft_bluestein, dft_direct, dft_values, interval_l1_closed_form,
    parseval_defect, plancherel_raw,
)
from slidesum.regions import sum_region
from slidesum.tabulated import TabulatedFunction, constant, delta


def naive_dft(x):
    m = len(x)
    return [sum(x[n] * cmath.exp(2j * math.pi * n * t / m) for n in range(m)) / math.sqrt(m)
            for t in range(m)]


def naive_corr(x):
    m = len(x)
    return [sum(x[i] * x[(i + a) % m].conjugate() for i in range(m)) for a in range(m)]


def rand_phi(m, seed):
    rng = np.random.default_rng(seed)
    return TabulatedFunction(rng.normal(size=m) + 1j * rng.normal(size=m))


class TestDFT:
    def test_delta_and_constant(self):
        m = 37
        assert np.allclose(dft(delta(m)).values, 1 / math.sqrt(m))
        spec = dft(constant(m)).values
        assert spec[0] == pytest.approx(math.sqrt(m)) and np.abs(spec[1:]).max() < 1e-12

    def test_against_scalar_oracle(self):
        phi = rand_phi(23, 1)
        assert np.abs(dft_values(phi.values) - np.array(naive_dft(list(phi.values)))).max() < 1e-12

    def test_legendre_flat_spectrum(self):
        s = np.abs(dft(legendre_family(field_context(11))).values)
        assert s[0] < 1e-12 and np.allclose(s[1:], 1)

    @pytest.mark.parametrize("m", [1, 2, 3, 17, 100, 511, 512, 1009, 2003])
    def test_bluestein_matches_direct_and_numpy(self, m):
        x = rand_phi(m, m).values
        ref = np.conj(np.fft.fft(np.conj(x))) / math.sqrt(m)
        assert np.abs(dft_bluestein(x) - ref).max() < 1e-9 * max(1, np.abs(ref).max())
        if m <= 2003:
            assert np.abs(dft_direct(x) - ref).max() < 1e-9 * max(1, np.abs(ref).max())

    @pytest.mark.parametrize("p", [101, 1009, 10007])
    def test_parseval_on_families(self, p):
        ctx = field_context(p)
        for phi in (legendre_family(ctx), build_kloosterman(ctx), build_quadratic_phase(1, ctx),
                    build_korobov(2, ctx)):
            assert parseval_defect(phi) < 1e-9

    @given(st.integers(1, 700), st.integers(0, 2**32 - 1))
    def test_parseval_random(self, m, seed):
        assert parseval_defect(rand_phi(m, seed)) < 1e-9


class TestCorrelations:
    def test_constant(self):
        assert np.allclose(correlations_direct(constant(13)).values, 13)
        assert np.allclose(correlations_plancherel(constant(13)).values, 13)

    def test_legendre(self):
        c = correlations_direct(legendre_family(field_context(11))).values
        assert c[0] == pytest.approx(10) and np.allclose(c[1:], -1)

    @pytest.mark.parametrize("p", [101, 1009])
    def test_korobov(self, p):
        c = correlations_direct(build_korobov(1, field_context(p))).values
        assert c[0] == pytest.approx(p - 1) and np.abs(c[1:] + 1).max() < 1e-8

    def test_against_scalar_oracle(self):
        phi = rand_phi(19, 4)
        ref = np.array(naive_corr(list(phi.values)))
        assert np.abs(correlations_direct(phi).values - ref).max() < 1e-10

    def test_plancherel_literal_is_conjugate(self):
        phi = rand_phi(61, 9)
        direct = correlations_direct(phi).values
        raw = plancherel_raw(phi)
        assert np.abs(raw - np.conj(direct)).max() < 1e-9
        assert np.abs(raw - direct[(-np.arange(61)) % 61]).max() < 1e-9
        assert np.abs(raw - direct).max() > 1e-3

    def test_plancherel_reoriented(self):
        for m, seed in [(61, 1), (600, 2), (1009, 3)]:
            phi = rand_phi(m, seed)
            d, f = correlations_direct(phi).values, correlations_plancherel(phi, verify=True).values
            assert np.abs(d - f).max() < 1e-6 * np.abs(d).max()

    def test_kloosterman_moduli_agree(self):
        kl = build_kloosterman(field_context(101))
        d = correlations_direct(kl)
        f = correlations_plancherel(kl)
        assert np.abs(d.moduli - f.moduli).max() < 1e-6 * d.moduli.max()

    def test_real_even_needs_no_reorientation(self):
        kl = build_kloosterman(field_context(101))
        q = build_quadratic_phase(1, field_context(101))
        for phi in (kl, q):
            assert np.abs(plancherel_raw(phi) - correlations_direct(phi).values).max() < 1e-8

    @given(st.integers(1, 300), st.integers(0, 2**32 - 1))
    def test_profile_invariants(self, m, seed):
        phi = rand_phi(m, seed)
        c = correlations_direct(phi).values
        l2 = phi.l2_norm ** 2
        assert abs(c[0] - l2) <= 1e-9 * l2
        assert np.abs(c[(-np.arange(m)) % m] - np.conj(c)).max() <= 1e-9 * l2
        assert np.abs(c).max() <= l2 * (1 + 1e-12)

    def test_quadratic_phase_off_zero_vanishes(self):
        for p in (101, 1009):
            c = correlations(build_quadratic_phase(2, field_context(p)))
            assert c.max_off([0]) < 1e-8

    def test_auto_and_unknown(self):
        assert correlations(constant(5)).method == "direct"
        assert correlations(constant(5000)).method == "plancherel"
        with pytest.raises(ValueError):
            correlations(constant(5), "magic")

    def test_verify_detects_mismatch(self, monkeypatch):
        import slidesum.spectral as sp
        phi = rand_phi(40, 0)
        monkeypatch.setattr(sp, "plancherel_raw", lambda _: np.zeros(40))
        with pytest.raises(ConsistencyError):
            sp.correlations_plancherel(phi, verify=True)


class TestCompletion:
    def test_length_one_flat(self):
        assert completion_l1(IntervalZm(101, 7, 1)) == pytest.approx(math.sqrt(101))

    def test_full_length_rejected(self):
        with pytest.raises(ValueError):
            completion_l1(IntervalZm(11, 0, 11))

    @pytest.mark.parametrize("m", [7, 101, 1009])
    def test_closed_form_vs_transform(self, m):
        for length in (1, 2, m // 3, m - 1):
            ind = np.zeros(m)
            ind[IntervalZm(m, 3, length).elements()] = 1
            assert np.allclose(np.abs(dft_values(ind)), interval_l1_closed_form(m, length))

    def test_growth_over_sqrt_m_log_m(self):
        ratios = []
        for m in (101, 1009, 10007):
            worst = max(completion_l1(IntervalZm(m, 0, L)) for L in range(1, m, max(1, m // 50)))
            ratios.append(worst / (math.sqrt(m) * math.log(m)))
        assert max(ratios) < 1.0

    @pytest.mark.parametrize("p", [101, 1009])
    def test_bound_valid(self, p):
        ctx = field_context(p)
        rng = np.random.default_rng(p)
        for phi in (legendre_family(ctx), build_kloosterman(ctx), build_quadratic_phase(1, ctx),
                    constant(p)):
            spec = dft(phi)
            for _ in range(20):
                I = IntervalZm(p, int(rng.integers(p)), int(rng.integers(1, p)))
                assert abs(sum_region(phi, I)) <= completion_bound(phi, I, spec) * (1 + 1e-12)

    def test_legendre_bound_is_l1(self):
        ctx = field_context(1009)
        I = IntervalZm(1009, 5, 200)
        assert completion_bound(legendre_family(ctx), I) == pytest.approx(completion_l1(I))

    def test_modulus_mismatch(self):
        with pytest.raises(ValueError):
            completion_bound(constant(11), IntervalZm(13, 0, 3))
