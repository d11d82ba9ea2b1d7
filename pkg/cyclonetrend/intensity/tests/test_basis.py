import numpy as np
from django.test import SimpleTestCase
from scipy.interpolate import BSpline

from core.exceptions import DomainError, IdentifiabilityError
from intensity.basis import (
    SplineBasis, StudyPeriod, basis_matrix, eval_basis, integrate_basis, make_basis,
)


class StudyPeriodTests(SimpleTestCase):

    def test_annual_period_has_unit_bins(self):
        period = StudyPeriod(1891, 2016, 125)
        self.assertEqual(period.delta, 1.0)
        edges = period.bin_edges()
        self.assertEqual(edges[0], 1891.0)
        self.assertEqual(edges[-1], 2016.0)
        self.assertEqual(period.bin_bounds(114), (2004.0, 2005.0))

    def test_rejects_empty_window_and_single_bin(self):
        with self.assertRaises(DomainError):
            StudyPeriod(5, 5, 10)
        with self.assertRaises(DomainError):
            StudyPeriod(0, 1, 1)


class SplineBasisTests(SimpleTestCase):

    def setUp(self):
        self.period = StudyPeriod(1891, 2016, 125)
        self.basis = make_basis(self.period, 9)
        self.rng = np.random.default_rng(11)

    def test_basis_size_and_knots(self):
        self.assertEqual(self.basis.L, 13)
        self.assertEqual(len(self.basis.knot_vector), 9 + 8)
        self.assertAlmostEqual(self.basis.interior_knots[0], 1891 + 12.5)

    def test_partition_of_unity(self):
        t = np.concatenate([self.rng.uniform(self.period.a, self.period.b, 1000),
                            [self.period.a, self.period.b]])
        sums = basis_matrix(self.basis, t, 0).sum(axis=1)
        self.assertLess(np.max(np.abs(sums - 1.0)), 1e-12)

    def test_values_are_nonnegative(self):
        t = self.rng.uniform(self.period.a, self.period.b, 500)
        self.assertGreaterEqual(basis_matrix(self.basis, t, 0).min(), -1e-15)

    def test_local_support(self):
        t = np.linspace(self.period.a, self.period.b, 2001)
        values = basis_matrix(self.basis, t, 0)
        for index in range(self.basis.L):
            lo, hi = self.basis.support(index)
            outside = (t < lo) | (t > hi)
            self.assertTrue(np.all(values[outside, index] == 0.0), msg=f"B{index} leaks outside support")

    def test_derivatives_match_finite_differences(self):
        knots = np.asarray(self.basis.interior_knots)
        t = self.rng.uniform(self.period.a + 1, self.period.b - 1, 200)
        t = t[np.min(np.abs(t[:, None] - knots[None, :]), axis=1) > 1e-2]
        h = 1e-4

        fd1 = (basis_matrix(self.basis, t + h, 0) - basis_matrix(self.basis, t - h, 0)) / (2 * h)
        np.testing.assert_allclose(basis_matrix(self.basis, t, 1), fd1, atol=1e-8)

        fd2 = (basis_matrix(self.basis, t + h, 1) - basis_matrix(self.basis, t - h, 1)) / (2 * h)
        np.testing.assert_allclose(basis_matrix(self.basis, t, 2), fd2, atol=1e-7)

    def test_eval_basis_matches_matrix_row(self):
        t = 1950.3
        np.testing.assert_array_equal(eval_basis(self.basis, t, 1), basis_matrix(self.basis, [t], 1)[0])

    def test_evaluation_outside_period_is_rejected(self):
        with self.assertRaises(DomainError):
            basis_matrix(self.basis, [1890.0], 0)
        with self.assertRaises(DomainError):
            basis_matrix(self.basis, [1950.0], 3)

    def test_more_functions_than_bins(self):
        with self.assertRaises(IdentifiabilityError):
            make_basis(StudyPeriod(0, 5, 5), 2)
        self.assertEqual(make_basis(StudyPeriod(0, 6, 6), 2).L, 6)

    def test_knots_must_be_interior_and_increasing(self):
        with self.assertRaises(DomainError):
            SplineBasis(self.period, (1891.0, 1950.0))
        with self.assertRaises(DomainError):
            SplineBasis(self.period, (1960.0, 1950.0))


class IntegrateBasisTests(SimpleTestCase):

    def setUp(self):
        self.period = StudyPeriod(1891, 2016, 125)
        self.basis = make_basis(self.period, 9)

    def test_additive_over_adjacent_windows(self):
        a, b = self.period.a, self.period.b
        for m in (1900.25, 1903.5, 1950.0, 2015.9):
            whole = integrate_basis(self.basis, a, b)
            parts = integrate_basis(self.basis, a, m) + integrate_basis(self.basis, m, b)
            np.testing.assert_allclose(parts, whole, atol=1e-12)

    def test_integrals_sum_to_window_length(self):
        for lo, hi in ((1891.0, 1892.0), (1900.3, 1917.8), (2015.0, 2016.0)):
            self.assertAlmostEqual(integrate_basis(self.basis, lo, hi).sum(), hi - lo, places=12)

    def test_matches_antiderivative(self):
        antiderivative = BSpline(self.basis.knot_vector, np.eye(self.basis.L), 3).antiderivative()
        for lo, hi in ((1891.0, 2016.0), (1903.0, 1904.0), (1949.2, 1977.7)):
            expected = antiderivative(hi) - antiderivative(lo)
            np.testing.assert_allclose(integrate_basis(self.basis, lo, hi), expected, atol=1e-10)

    def test_empty_or_outside_window_is_rejected(self):
        with self.assertRaises(DomainError):
            integrate_basis(self.basis, 1950.0, 1950.0)
        with self.assertRaises(DomainError):
            integrate_basis(self.basis, 1880.0, 1950.0)
