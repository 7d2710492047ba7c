import math
from collections import defaultdict
from typing import NamedTuple, Sequence, Dict, List, Optional, TYPE_CHECKING

import numpy as np
from scipy import stats

from fsde.estimation.estimators import phi_log_slope
from fsde.estimation.variances import asym_variances
from fsde.result import EstimatorType

if TYPE_CHECKING:
    from fsde.experiment.report import ExperimentReport

MIN_NORMALITY_SAMPLES = 100
WHISKER_FACTOR = 1.5


class VarianceFit(NamedTuple):
    k: float
    intercept: float
    adj_r2: float


class NormalityResult(NamedTuple):
    statistic: float
    p_value: float


class BoxplotSummary(NamedTuple):
    whisker_low: float
    q1: float
    median: float
    q3: float
    whisker_high: float
    outliers: List[float]


def true_parameter(estimator: EstimatorType, H: float, c: float) -> float:
    return H if estimator.is_hurst() else c ** 2


def summarize_estimates(estimates: Sequence[float],
                        ci_low: Sequence[float],
                        ci_high: Sequence[float],
                        truth: float) -> Dict[str, float]:
    """
    Moments, type-7 quartiles, mean absolute error and interval coverage of the
    replicate estimates of one cell.

    Args:
      estimates (Sequence[float]): Estimates of the used replicates.
      ci_low (Sequence[float]): Lower interval bounds, aligned with estimates.
      ci_high (Sequence[float]): Upper interval bounds, aligned with estimates.
      truth (float): True parameter of the cell.

    Returns:
      Dict[str, float]: mean, bias, variance, sd, q1, median, q3, iqr, mae and coverage,
      NaN throughout if no replicate was used.
    """

    estimates = np.asarray(estimates, dtype=float)
    keys = ['mean', 'bias', 'variance', 'sd', 'q1', 'median', 'q3', 'iqr', 'mae', 'coverage']
    if len(estimates) == 0:
        return {key: math.nan for key in keys}
    mean = float(np.mean(estimates))
    variance = float(np.var(estimates, ddof=1)) if len(estimates) > 1 else 0.
    q1, median, q3 = (float(q) for q in np.quantile(estimates, [0.25, 0.5, 0.75], method='linear'))
    covered = (np.asarray(ci_low) <= truth) & (truth <= np.asarray(ci_high))
    return {
        'mean': mean,
        'bias': mean - truth,
        'variance': variance,
        'sd': math.sqrt(variance),
        'q1': q1,
        'median': median,
        'q3': q3,
        'iqr': q3 - q1,
        'mae': float(np.mean(np.abs(estimates - truth))),
        'coverage': float(np.mean(covered)),
    }


def standardized_errors(estimator: EstimatorType,
                        estimates: Sequence[float],
                        H: float,
                        c: float,
                        n: int,
                        T: float) -> np.ndarray:
    """
    Estimator errors scaled by their limiting law, so that they are approximately
    standard normal: sqrt(n) phi_log_slope(n, T, H)(H1 - H) / sigma(H),
    2 ln2 sqrt(n)(H2 - H) / sigma*(H) and sqrt(n)(c2 - c^2) / (c^2 sigma(H)). The h1 slope is
    2 ln(n/T) plus an H dependent term that the limit law drops.
    """

    estimates = np.asarray(estimates, dtype=float)
    variances = asym_variances(H)
    if estimator == EstimatorType.H1:
        return math.sqrt(n) * phi_log_slope(n, T, H) * (estimates - H) / math.sqrt(variances.sigma2)
    if estimator == EstimatorType.H2:
        return 2. * math.log(2.) * math.sqrt(n) * (estimates - H) / math.sqrt(variances.sigma_star2)
    c2 = c ** 2
    return math.sqrt(n) * (estimates - c2) / (c2 * math.sqrt(variances.sigma2))


def boxplot_summary(values: Sequence[float]) -> BoxplotSummary:
    """
    Box of the type-7 quartiles with whiskers at the most extreme values within
    1.5 IQR of the box, values beyond the whiskers are outliers.
    """

    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return BoxplotSummary(math.nan, math.nan, math.nan, math.nan, math.nan, [])
    q1, median, q3 = np.quantile(values, [0.25, 0.5, 0.75], method='linear')
    reach = WHISKER_FACTOR * (q3 - q1)
    inside = values[(values >= q1 - reach) & (values <= q3 + reach)]
    outliers = np.sort(values[(values < q1 - reach) | (values > q3 + reach)])
    return BoxplotSummary(whisker_low=float(inside.min()), q1=float(q1), median=float(median),
                          q3=float(q3), whisker_high=float(inside.max()),
                          outliers=[float(v) for v in outliers])


def fit_variance_law(c_values: Sequence[float], variances: Sequence[float]) -> VarianceFit:
    """
    Ordinary least squares of Var(c2) = k c^4 + intercept with adjusted R^2
    1 - (1 - R^2)(N - 1)/(N - 2).

    Args:
      c_values (Sequence[float]): Volatilities of the cells.
      variances (Sequence[float]): Sample variances of the volatility estimator per cell.

    Returns:
      VarianceFit: Slope, intercept and adjusted R^2.
    """

    c4 = np.asarray(c_values, dtype=float) ** 4
    variances = np.asarray(variances, dtype=float)
    if len(c4) != len(variances):
        raise ValueError(f'Got {len(c4)} volatilities but {len(variances)} variances.')
    if len(np.unique(c4)) < 3:
        raise ValueError(f'The variance law needs at least 3 distinct c^4 values, got {len(np.unique(c4))}')
    fit = stats.linregress(c4, variances)
    n_points = len(c4)
    adj_r2 = 1. - (1. - fit.rvalue ** 2) * (n_points - 1) / (n_points - 2)
    return VarianceFit(k=float(fit.slope), intercept=float(fit.intercept), adj_r2=float(adj_r2))


def fit_variance_model(report: 'ExperimentReport',
                       H: Optional[float] = None,
                       n: Optional[int] = None) -> VarianceFit:
    """
    Fits the variance law to the volatility estimator cells of a report.

    Args:
      report (ExperimentReport): Report with c2 cells for at least 3 distinct c values.
      H (Optional[float]): Restricts the fit to cells with this Hurst index.
      n (Optional[int]): Restricts the fit to cells with this sample size.

    Returns:
      VarianceFit: Slope, intercept and adjusted R^2.
    """

    records = [r for r in report.records_for(EstimatorType.C2)
               if (H is None or r.H == H) and (n is None or r.n == n) and not math.isnan(r.variance)]
    return fit_variance_law([r.c for r in records], [r.variance for r in records])


def normality_diagnostic(errors: Sequence[float], scale: float = 1.) -> NormalityResult:
    """
    One-sample Kolmogorov-Smirnov test of errors / scale against the standard normal law.

    Args:
      errors (Sequence[float]): At least 100 errors.
      scale (float): Positive scale. (Default value = 1.)

    Returns:
      NormalityResult: KS statistic and asymptotic p-value.
    """

    errors = np.asarray(errors, dtype=float)
    if len(errors) < MIN_NORMALITY_SAMPLES:
        raise ValueError(f'Normality diagnostic needs at least {MIN_NORMALITY_SAMPLES} values, got {len(errors)}')
    if not scale > 0:
        raise ValueError(f'Scale must be positive, got scale={scale}')
    if np.all(errors == errors[0]):
        raise ValueError('Normality diagnostic got constant input.')
    result = stats.kstest(errors / scale, 'norm', method='asymp')
    return NormalityResult(statistic=float(result.statistic), p_value=float(result.pvalue))


def iqr_shrinkage(report: 'ExperimentReport', estimator: EstimatorType) -> List[float]:
    """
    Ratios iqr(2n) / iqr(n) over consecutive doublings of n, per (model, H, c) cell group
    in report order. Under the sqrt(n) rate the ratios are close to 2^{-1/2}.

    Args:
      report (ExperimentReport): Report with every group observed at a doubling sequence of n.
      estimator (EstimatorType): Estimator whose IQRs are compared.

    Returns:
      List[float]: The ratios.
    """

    groups = defaultdict(dict)
    for record in report.records_for(estimator):
        groups[(record.model, record.H, record.c)][record.n] = record.iqr
    if not groups:
        raise ValueError(f'Report has no cells for estimator {estimator.value}')
    ratios = []
    for (model, H, c), iqrs in groups.items():
        sizes = sorted(iqrs)
        if len(sizes) < 2:
            raise ValueError(f'Cell group model={model}, H={H}, c={c} has a single sample size n={sizes[0]}')
        for small, large in zip(sizes[:-1], sizes[1:]):
            if large != 2 * small:
                raise ValueError(f'Cell group model={model}, H={H}, c={c} misses n={2 * small}')
            ratios.append(iqrs[large] / iqrs[small])
    return ratios
