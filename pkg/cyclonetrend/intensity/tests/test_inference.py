import numpy as np
from django.test import SimpleTestCase

from core.exceptions import DomainError
from core.tests.support import smooth_series
from intensity.basis import StudyPeriod, basis_matrix, make_basis
from intensity.inference import (
    Z_95, curve_gradient, curve_values, default_grid, delta_method_variance, intensity,
    sign_share, window_average,
)
from intensity.model import CountSeries, build_design, fit_mle


class CurveValueTests(SimpleTestCase):

    def setUp(self):
        self.period = StudyPeriod(1891, 2016, 125)
        self.basis = make_basis(self.period, 9)
        self.beta = np.log(4.0) + 0.4 * np.cos(np.linspace(0, 3, self.basis.L))
        knots = np.asarray(self.basis.interior_knots)
        t = np.linspace(1892.3, 2014.7, 97)
        self.t = t[np.min(np.abs(t[:, None] - knots[None, :]), axis=1) > 1e-2]

    def test_first_derivative_matches_finite_difference(self):
        h = 1e-4
        numeric = (curve_values(self.beta, self.basis, self.t + h, 0)
                   - curve_values(self.beta, self.basis, self.t - h, 0)) / (2 * h)
        np.testing.assert_allclose(curve_values(self.beta, self.basis, self.t, 1), numeric, atol=1e-7)

    def test_second_derivative_matches_finite_difference(self):
        h = 1e-4
        numeric = (curve_values(self.beta, self.basis, self.t + h, 1)
                   - curve_values(self.beta, self.basis, self.t - h, 1)) / (2 * h)
        np.testing.assert_allclose(curve_values(self.beta, self.basis, self.t, 2), numeric, atol=1e-7)

    def test_gradient_matches_finite_difference_in_beta(self):
        h = 1e-6
        for order in (0, 1, 2):
            numeric = np.column_stack([
                (curve_values(self.beta + h * e, self.basis, self.t, order)
                 - curve_values(self.beta - h * e, self.basis, self.t, order)) / (2 * h)
                for e in np.eye(self.basis.L)
            ])
            analytic = curve_gradient(self.beta, self.basis, self.t, order)
            scale = max(1.0, np.abs(analytic).max())
            self.assertLess(np.abs(analytic - numeric).max() / scale, 1e-6, msg=f"order {order}")

    def test_unknown_order_is_rejected(self):
        with self.assertRaises(DomainError):
            curve_values(self.beta, self.basis, self.t, 3)


class DeltaMethodTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.series = smooth_series()
        cls.basis = make_basis(cls.series.period, 9)
        cls.fit = fit_mle(build_design(cls.basis, cls.series.period), cls.series)
        cls.grid = default_grid(cls.series.period, 251)

    def test_scalar_variance_is_quadratic_form(self):
        t = 1950.5
        b = basis_matrix(self.basis, [t], 0)[0]
        lam = float(np.exp(b @ self.fit.beta_hat))
        expected = lam ** 2 * b @ self.fit.covariance @ b
        self.assertAlmostEqual(delta_method_variance(self.fit, self.basis, t, 0), expected, places=12)

    def test_bands_are_symmetric_normal_intervals(self):
        for order in (0, 1, 2):
            curve = intensity(self.fit, self.basis, self.grid, order)
            np.testing.assert_allclose(curve.ci_high - curve.value, Z_95 * curve.std_error, rtol=1e-9, atol=1e-12)
            np.testing.assert_allclose(curve.value - curve.ci_low, Z_95 * curve.std_error, rtol=1e-9, atol=1e-12)
            self.assertTrue(np.all(curve.std_error > 0))

    def test_std_error_matches_pointwise_variance(self):
        curve = intensity(self.fit, self.basis, self.grid, 1)
        for index in (10, 125, 240):
            variance = delta_method_variance(self.fit, self.basis, self.grid[index], 1)
            self.assertAlmostEqual(curve.std_error[index], np.sqrt(variance), places=10)

    def test_log_scale_band_is_positive_and_contains_estimate(self):
        curve = intensity(self.fit, self.basis, self.grid, 0, log_scale=True)
        self.assertEqual(curve.scale, 'log')
        self.assertTrue(np.all(curve.ci_low > 0))
        self.assertTrue(np.all((curve.ci_low < curve.value) & (curve.value < curve.ci_high)))
        with self.assertRaises(DomainError):
            intensity(self.fit, self.basis, self.grid, 1, log_scale=True)

    def test_records_carry_every_column(self):
        record = next(intensity(self.fit, self.basis, self.grid, 0).records())
        self.assertEqual(list(record), ['t', 'estimate', 'std_error', 'ci_low', 'ci_high'])
        self.assertEqual(record['t'], 1891.0)

    def test_grid_outside_period_is_rejected(self):
        with self.assertRaises(DomainError):
            intensity(self.fit, self.basis, [1800.0], 0)


class KnotMidpointErrorTests(SimpleTestCase):
    """Standard errors of a constant fit at interior knots against the midpoints between them."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        period = StudyPeriod(1891, 2016, 125)
        cls.basis = make_basis(period, 9)
        cls.fit = fit_mle(build_design(cls.basis, period), CountSeries(period, np.full(125, 5)))
        # Stay three knot spacings away from the clamped ends.
        cls.knots = np.asarray(cls.basis.interior_knots)[2:7]
        cls.midpoints = 0.5 * (cls.knots[:-1] + cls.knots[1:])

    def errors(self, order):
        at_knots = intensity(self.fit, self.basis, self.knots, order).std_error
        at_midpoints = intensity(self.fit, self.basis, self.midpoints, order).std_error
        return at_knots, at_midpoints

    def test_level_is_least_certain_at_knots(self):
        at_knots, at_midpoints = self.errors(0)
        self.assertTrue(np.all(at_midpoints < np.minimum(at_knots[:-1], at_knots[1:])))

    def test_slope_is_least_certain_between_knots(self):
        at_knots, at_midpoints = self.errors(1)
        self.assertTrue(np.all(at_midpoints > np.maximum(at_knots[:-1], at_knots[1:])))

    def test_curvature_is_least_certain_at_knots(self):
        at_knots, at_midpoints = self.errors(2)
        self.assertTrue(np.all(at_midpoints < np.minimum(at_knots[:-1], at_knots[1:])))


class CurveSummaryTests(SimpleTestCase):

    def test_default_grid_spans_period(self):
        period = StudyPeriod(1891, 2016, 125)
        grid = default_grid(period)
        self.assertEqual(grid.size, 1001)
        self.assertEqual((grid[0], grid[-1]), (1891.0, 2016.0))

    def test_window_average_of_constant_fit(self):
        period = StudyPeriod(1891, 2016, 125)
        basis = make_basis(period, 9)
        fit = fit_mle(build_design(basis, period), CountSeries(period, np.full(125, 5)))
        curve = intensity(fit, basis, default_grid(period), 0)
        self.assertAlmostEqual(window_average(curve, 1891.0, 2005.0), 5.0, places=7)
        self.assertAlmostEqual(window_average(curve, 2005.0, 2016.0), 5.0, places=7)

    def test_sign_share_of_rising_intensity(self):
        period = StudyPeriod(0, 50, 50)
        basis = make_basis(period, 4)
        fit = fit_mle(build_design(basis, period), CountSeries(period, np.arange(1, 51)))
        curve = intensity(fit, basis, default_grid(period, 201), 1)
        self.assertGreater(sign_share(curve, 5.0, 45.0), 0.9)
        level = curve_values(fit.beta_hat, basis, [10.0, 25.0, 40.0], 0)
        self.assertTrue(np.all(np.diff(level) > 0))

    def test_window_needs_two_grid_points(self):
        period = StudyPeriod(0, 10, 10)
        basis = make_basis(period, 2)
        fit = fit_mle(build_design(basis, period), CountSeries(period, np.full(10, 3)))
        curve = intensity(fit, basis, default_grid(period, 11), 0)
        with self.assertRaises(DomainError):
            window_average(curve, 4.2, 4.8)
        with self.assertRaises(DomainError):
            sign_share(curve, 6.0, 6.0)
