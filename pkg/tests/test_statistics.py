import math
import unittest
from typing import Sequence

import numpy as np
from scipy.stats import norm

from fsde.estimation.variances import asym_variances
from fsde.experiment.report import CellRecord, ExperimentReport
from fsde.experiment.statistics import summarize_estimates, boxplot_summary, fit_variance_law, \
    fit_variance_model, normality_diagnostic, iqr_shrinkage, standardized_errors, true_parameter
from fsde.result import EstimatorType


def _record(estimator: EstimatorType, H: float, c: float, n: int, estimates: Sequence[float]) -> CellRecord:
    estimates = np.asarray(estimates, dtype=float)
    truth = true_parameter(estimator, H, c)
    summary = summarize_estimates(estimates, estimates - 1., estimates + 1., truth)
    return CellRecord(model='verhulst', H=H, c=c, n=n, estimator=estimator, summary=summary,
                      flag_counts={}, replicates_used=len(estimates), errors=estimates - truth,
                      standardized_errors=estimates - truth)


class TestSummarizeEstimates(unittest.TestCase):

    def test_summary(self) -> None:
        summary = summarize_estimates([1., 2., 3., 4.], [0., 0., 0., 3.], [5., 5., 5., 5.], truth=2.)
        self.assertAlmostEqual(2.5, summary['mean'], places=12)
        self.assertAlmostEqual(0.5, summary['bias'], places=12)
        self.assertAlmostEqual(5. / 3., summary['variance'], places=12)
        self.assertAlmostEqual(math.sqrt(5. / 3.), summary['sd'], places=12)
        self.assertAlmostEqual(1.75, summary['q1'], places=12)
        self.assertAlmostEqual(2.5, summary['median'], places=12)
        self.assertAlmostEqual(3.25, summary['q3'], places=12)
        self.assertAlmostEqual(1.5, summary['iqr'], places=12)
        self.assertAlmostEqual(1., summary['mae'], places=12)
        self.assertAlmostEqual(0.75, summary['coverage'], places=12)

    def test_single_replicate(self) -> None:
        summary = summarize_estimates([0.7], [0.6], [0.8], truth=0.75)
        self.assertEqual(0., summary['variance'])
        self.assertEqual(0., summary['iqr'])
        self.assertEqual(1., summary['coverage'])

    def test_no_replicates(self) -> None:
        summary = summarize_estimates([], [], [], truth=0.7)
        self.assertTrue(all(math.isnan(v) for v in summary.values()))


class TestBoxplotSummary(unittest.TestCase):

    def test_outliers(self) -> None:
        box = boxplot_summary([1., 2., 3., 4., 100.])
        self.assertEqual((1., 2., 3., 4., 4.), tuple(box[:5]))
        self.assertEqual([100.], box.outliers)

    def test_no_outliers(self) -> None:
        box = boxplot_summary(np.arange(10.))
        self.assertEqual(0., box.whisker_low)
        self.assertEqual(9., box.whisker_high)
        self.assertEqual([], box.outliers)


class TestVarianceLaw(unittest.TestCase):

    def test_exact_fit(self) -> None:
        c_values = [0.5, 1., 2., 3.]
        fit = fit_variance_law(c_values, [2. * c ** 4 for c in c_values])
        self.assertAlmostEqual(2., fit.k, places=10)
        self.assertAlmostEqual(0., fit.intercept, places=10)
        self.assertAlmostEqual(1., fit.adj_r2, places=10)

    def test_reference_variances(self) -> None:
        fit = fit_variance_law([0.2, 0.5, 1., 2., 5.], [0.001, 0.019, 0.306, 5.159, 193.4])
        self.assertGreaterEqual(fit.adj_r2, 0.95)
        self.assertAlmostEqual(0.31, fit.k, delta=0.01)

    def test_too_few_points(self) -> None:
        with self.assertRaises(ValueError):
            fit_variance_law([1., 2.], [1., 16.])
        with self.assertRaises(ValueError):
            fit_variance_law([1., -1., 2.], [1., 1., 16.])
        with self.assertRaises(ValueError):
            fit_variance_law([1., 2., 3.], [1., 16.])

    def test_fit_from_report(self) -> None:
        rng = np.random.default_rng(0)
        records = [_record(EstimatorType.C2, 0.7, c, 1024, c ** 2 + c ** 2 * rng.standard_normal(50))
                   for c in (0.5, 1., 2.)]
        fit = fit_variance_model(ExperimentReport(records), H=0.7, n=1024)
        self.assertGreater(fit.k, 0.)
        with self.assertRaises(ValueError):
            fit_variance_model(ExperimentReport(records), n=2048)


class TestNormalityDiagnostic(unittest.TestCase):

    def test_normal_sample(self) -> None:
        sample = np.random.default_rng(1).standard_normal(500)
        self.assertGreater(normality_diagnostic(sample).p_value, 1e-3)

    def test_quantile_grid(self) -> None:
        grid = norm.ppf((np.arange(200) + 0.5) / 200)
        result = normality_diagnostic(3. * grid, scale=3.)
        self.assertAlmostEqual(0.0025, result.statistic, places=10)
        self.assertGreater(result.p_value, 0.99)

    def test_uniform_sample(self) -> None:
        sample = np.random.default_rng(2).uniform(size=500)
        self.assertLess(normality_diagnostic(sample).p_value, 1e-3)

    def test_invalid_input(self) -> None:
        with self.assertRaises(ValueError):
            normality_diagnostic(np.ones(200))
        with self.assertRaises(ValueError):
            normality_diagnostic(np.arange(99.))
        with self.assertRaises(ValueError):
            normality_diagnostic(np.arange(200.), scale=0.)


class TestStandardizedErrors(unittest.TestCase):

    def test_zero_at_truth(self) -> None:
        for estimator in EstimatorType:
            truth = true_parameter(estimator, 0.7, 2.)
            errors = standardized_errors(estimator, [truth], H=0.7, c=2., n=1024, T=1.)
            self.assertAlmostEqual(0., float(errors[0]), places=12)

    def test_scaling(self) -> None:
        low = standardized_errors(EstimatorType.H2, [0.71], H=0.7, c=1., n=256, T=1.)
        high = standardized_errors(EstimatorType.H2, [0.71], H=0.7, c=1., n=1024, T=1.)
        self.assertAlmostEqual(2., float(high[0] / low[0]), places=12)

    def test_known_volatility_slope(self) -> None:
        errors = standardized_errors(EstimatorType.H1, [0.71], H=0.7, c=1., n=8192, T=1.)
        slope = 2. * math.log(8192) + 2. ** 2.4 * math.log(2.) / (4. - 2. ** 1.4)
        expected = math.sqrt(8192) * slope * (0.71 - 0.7) / math.sqrt(asym_variances(0.7).sigma2)
        self.assertAlmostEqual(expected, float(errors[0]), places=10)


class TestIqrShrinkage(unittest.TestCase):

    def test_ratios(self) -> None:
        base = np.linspace(-1., 1., 41)
        records = [_record(EstimatorType.H2, 0.7, 1., n, 0.7 + base * math.sqrt(256 / n))
                   for n in (256, 512, 1024)]
        ratios = iqr_shrinkage(ExperimentReport(records), EstimatorType.H2)
        np.testing.assert_allclose([2. ** -0.5, 2. ** -0.5], ratios, rtol=1e-12)

    def test_identical_iqrs(self) -> None:
        base = np.linspace(-1., 1., 41)
        records = [_record(EstimatorType.H1, 0.7, 1., n, 0.7 + base) for n in (256, 512)]
        self.assertEqual([1.], iqr_shrinkage(ExperimentReport(records), EstimatorType.H1))

    def test_missing_doubling(self) -> None:
        records = [_record(EstimatorType.H2, 0.7, 1., n, [0.6, 0.7, 0.8]) for n in (256, 1024)]
        with self.assertRaises(ValueError):
            iqr_shrinkage(ExperimentReport(records), EstimatorType.H2)
        with self.assertRaises(ValueError):
            iqr_shrinkage(ExperimentReport(records), EstimatorType.C2)
