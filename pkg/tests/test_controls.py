import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import simpson

from minpulse import controls as ctl


def random_spline(rng, num_basis=None, duration=None):
    nb = num_basis or int(rng.integers(3, 30))
    T = duration or float(rng.uniform(2.0, 40.0))
    return ctl.ControlSpline(rng.normal(size=nb) * 0.2,
                             rng.normal(size=nb) * 0.2, T)


class TestWavelet:
    def test_known_values(self):
        assert ctl.eval_wavelet(0.0) == pytest.approx(0.75, abs=1e-15)
        assert ctl.eval_wavelet(1.0 / 6.0) == pytest.approx(0.5, abs=1e-14)
        assert ctl.eval_wavelet(-1.0 / 6.0) == pytest.approx(0.5, abs=1e-14)
        assert ctl.eval_wavelet(-0.5) == pytest.approx(0.0, abs=1e-14)

    def test_compact_support(self):
        tau = np.array([-0.75, -0.5001, 0.5, 0.6, 3.0])
        np.testing.assert_array_equal(ctl.eval_wavelet(tau), 0.0)

    def test_even_symmetry(self):
        tau = np.linspace(-0.49, 0.49, 101)
        np.testing.assert_allclose(ctl.eval_wavelet(tau),
                                   ctl.eval_wavelet(-tau)[::-1], atol=1e-14)

    def test_continuously_differentiable(self):
        eps = 1e-7
        for bp in (-0.5, -1.0 / 6.0, 1.0 / 6.0, 0.5):
            v_minus = ctl.eval_wavelet(bp - eps)
            v_plus = ctl.eval_wavelet(bp + eps)
            assert abs(v_plus - v_minus) < 1e-5
            d_minus = (ctl.eval_wavelet(bp - eps) - ctl.eval_wavelet(bp - 2 * eps)) / eps
            d_plus = (ctl.eval_wavelet(bp + 2 * eps) - ctl.eval_wavelet(bp + eps)) / eps
            assert abs(d_plus - d_minus) < 1e-4

    def test_unit_mass_third(self):
        # integral of the normalized wavelet over its support is 1/3
        tau = np.linspace(-0.5, 0.5, 20001)
        val = np.trapezoid(ctl.eval_wavelet(tau), tau)
        assert val == pytest.approx(1.0 / 3.0, abs=1e-8)

    def test_squared_mass(self):
        tau = np.linspace(-0.5, 0.5, 20001)
        val = np.trapezoid(ctl.eval_wavelet(tau) ** 2, tau)
        assert val == pytest.approx(11.0 / 60.0, abs=1e-8)


class TestControlSpline:
    def test_knot_spacing(self):
        sp = ctl.ControlSpline(np.zeros(8), np.zeros(8), 10.0)
        assert sp.knot_spacing == pytest.approx(1.0)
        np.testing.assert_allclose(sp.centers(), (np.arange(8) + 1.5) * 1.0)

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError):
            ctl.ControlSpline(np.zeros(3), np.zeros(4), 1.0)

    def test_rejects_nonpositive_duration(self):
        with pytest.raises(ValueError):
            ctl.ControlSpline(np.zeros(3), np.zeros(3), 0.0)

    def test_vanishes_at_endpoints(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            sp = random_spline(rng)
            assert abs(ctl.eval_control(sp, 0.0)) < 1e-14
            assert abs(ctl.eval_control(sp, sp.duration)) < 1e-14

    def test_eval_rejects_outside_domain(self):
        sp = random_spline(np.random.default_rng(1))
        with pytest.raises(ValueError):
            ctl.eval_control(sp, -0.1)
        with pytest.raises(ValueError):
            ctl.eval_control(sp, sp.duration + 0.1)

    def test_locality(self):
        # each basis function is supported on 3 knot intervals around its center
        sp = ctl.ControlSpline(np.eye(10)[4], np.zeros(10), 12.0)
        d = sp.knot_spacing
        c = sp.centers()[4]
        t = np.linspace(0, 12.0, 2401)
        vals = np.abs(np.atleast_1d(ctl.eval_control(sp, t)))
        outside = (t < c - 1.5 * d - 1e-12) | (t > c + 1.5 * d + 1e-12)
        assert np.all(vals[outside] == 0.0)
        assert np.max(vals) > 0.5

    def test_linearity_in_coefficients(self):
        rng = np.random.default_rng(2)
        a = random_spline(rng, num_basis=9, duration=7.0)
        b = random_spline(rng, num_basis=9, duration=7.0)
        both = ctl.ControlSpline(a.alpha_real + b.alpha_real,
                                 a.alpha_imag + b.alpha_imag, 7.0)
        t = np.linspace(0, 7.0, 200)
        np.testing.assert_allclose(
            ctl.eval_control(both, t),
            np.asarray(ctl.eval_control(a, t)) + ctl.eval_control(b, t),
            atol=1e-13)


class TestScaleControl:
    @given(st.floats(min_value=0.2, max_value=5.0),
           st.integers(min_value=0, max_value=2 ** 31 - 1))
    @settings(max_examples=30, deadline=None)
    def test_pointwise_scaling_law(self, s, seed):
        rng = np.random.default_rng(seed)
        sp = random_spline(rng, num_basis=8, duration=6.0)
        scaled = ctl.scale_control(sp, s)
        assert scaled.duration == pytest.approx(s * sp.duration)
        t = np.linspace(0, sp.duration, 64)
        np.testing.assert_allclose(
            np.asarray(ctl.eval_control(scaled, s * t)),
            np.asarray(ctl.eval_control(sp, t)) / s,
            atol=1e-12, rtol=1e-10)

    def test_integral_preserved(self):
        rng = np.random.default_rng(3)
        sp = random_spline(rng)
        for s in (0.5, 1.3, 2.0):
            scaled = ctl.scale_control(sp, s)
            assert ctl.control_integral(scaled) == pytest.approx(
                ctl.control_integral(sp), abs=1e-13)

    def test_energy_scales_inverse_square(self):
        rng = np.random.default_rng(4)
        sp = random_spline(rng)
        for s in (0.5, 2.0):
            scaled = ctl.scale_control(sp, s)
            assert ctl.energy_norm(scaled) == pytest.approx(
                ctl.energy_norm(sp) / s ** 2, rel=1e-12)

    def test_max_amplitude_scales_inverse(self):
        rng = np.random.default_rng(5)
        sp = random_spline(rng)
        scaled = ctl.scale_control(sp, 2.0)
        assert ctl.max_amplitude(scaled) == pytest.approx(
            ctl.max_amplitude(sp) / 2.0, rel=1e-12)

    def test_rejects_nonpositive(self):
        sp = random_spline(np.random.default_rng(6))
        with pytest.raises(ValueError):
            ctl.scale_control(sp, -1.0)


class TestControlIntegral:
    def test_matches_quadrature(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            sp = random_spline(rng)
            t = np.linspace(0, sp.duration, 40001)
            quad = np.trapezoid(np.asarray(ctl.eval_control(sp, t)), t)
            assert ctl.control_integral(sp) == pytest.approx(quad, abs=1e-8)


class TestEnergy:
    def test_matrix_structure(self):
        w = ctl.energy_matrix(6)
        np.testing.assert_allclose(w, w.T)
        assert w[0, 0] == pytest.approx(11.0 / 60.0)
        assert w[0, 1] == pytest.approx(11.0 / 60.0 * 26.0 / 66.0)
        assert w[0, 2] == pytest.approx(11.0 / 60.0 / 66.0)
        assert w[0, 3] == 0.0

    def test_matrix_positive_definite(self):
        for nb in range(1, 65):
            evals = np.linalg.eigvalsh(ctl.energy_matrix(nb))
            assert evals[0] > 0.0

    def test_energy_matches_simpson(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            nb = int(rng.integers(4, 49))
            sp = random_spline(rng, num_basis=nb)
            # |c(t)|^2 is piecewise quartic with breakpoints at half-integer
            # multiples of the knot spacing; 1024 intervals per knot put every
            # breakpoint on an even grid index so Simpson converges cleanly
            t = np.linspace(0, sp.duration, (sp.num_basis + 2) * 1024 + 1)
            vals = np.abs(np.asarray(ctl.eval_control(sp, t))) ** 2
            quad = simpson(vals, x=t) / sp.duration
            assert ctl.energy_norm(sp) == pytest.approx(quad, rel=1e-10)

    def test_energy_gradient_finite_difference(self):
        rng = np.random.default_rng(9)
        sp = random_spline(rng, num_basis=7)
        g = ctl.energy_gradient(sp)
        x0 = np.concatenate([sp.alpha_real, sp.alpha_imag])
        h = 1e-6
        for i in range(x0.size):
            e = np.zeros_like(x0)
            e[i] = h
            up = ctl.ControlSpline((x0 + e)[:7], (x0 + e)[7:], sp.duration)
            dn = ctl.ControlSpline((x0 - e)[:7], (x0 - e)[7:], sp.duration)
            fd = (ctl.energy_norm(up) - ctl.energy_norm(dn)) / (2 * h)
            assert g[i] == pytest.approx(fd, abs=1e-8)


class TestVectorLayout:
    def test_round_trip(self):
        rng = np.random.default_rng(10)
        splines = [random_spline(rng, num_basis=5, duration=9.0),
                   random_spline(rng, num_basis=8, duration=9.0)]
        x = ctl.coeff_vector(splines)
        assert x.size == 2 * (5 + 8)
        back = ctl.splines_from_vector(x, 9.0, [5, 8])
        for orig, rec in zip(splines, back):
            np.testing.assert_array_equal(orig.alpha_real, rec.alpha_real)
            np.testing.assert_array_equal(orig.alpha_imag, rec.alpha_imag)

    def test_layout_order(self):
        sp = ctl.ControlSpline([1.0, 2.0], [3.0, 4.0], 5.0)
        np.testing.assert_array_equal(ctl.coeff_vector([sp]), [1, 2, 3, 4])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ctl.splines_from_vector(np.zeros(5), 1.0, [2])

    def test_num_basis_for(self):
        assert ctl.num_basis_for(10.0, 0.3) == 31
        assert ctl.num_basis_for(20.0, 0.3) == 65
        assert ctl.num_basis_for(0.5, 0.3) == 1  # clamped

    def test_max_amplitude_upper_bounds_grid(self):
        rng = np.random.default_rng(11)
        sp = random_spline(rng)
        coarse = ctl.max_amplitude(sp, oversample=1)
        fine = ctl.max_amplitude(sp, oversample=32)
        very_fine = ctl.max_amplitude(sp, oversample=256)
        assert fine >= coarse - 1e-12
        assert very_fine >= fine - 1e-12
        # oversample=32 resolves the smooth maximum to well under 0.1%
        assert very_fine <= fine * 1.001
