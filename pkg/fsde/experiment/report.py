import math
from pathlib import Path
from typing import Dict, List, Optional, Any, Union

import numpy as np
import pandas as pd

from fsde.experiment.statistics import boxplot_summary
from fsde.result import EstimatorType
from fsde.utils.io import write_csv, FLOAT_FORMAT

REPORT_COLUMNS = ['model', 'H', 'c', 'n', 'estimator', 'mean', 'bias', 'variance', 'sd',
                  'q1', 'median', 'q3', 'iqr', 'mae', 'coverage', 'flags', 'replicates']
DIAGNOSTICS_COLUMNS = ['block', 'model', 'H', 'c', 'n', 'estimator', 'statistic', 'p_value',
                       'k', 'intercept', 'adj_r2']
BOXPLOT_COLUMNS = ['model', 'H', 'c', 'n', 'estimator', 'whisker_low', 'q1', 'median', 'q3',
                   'whisker_high', 'outliers']


class CellRecord:
    """
    Aggregated results of one estimator in one (model, H, c, n) cell.
    """

    def __init__(self,
                 model: str,
                 H: float,
                 c: float,
                 n: int,
                 estimator: EstimatorType,
                 summary: Dict[str, float],
                 flag_counts: Dict[str, int],
                 replicates_used: int,
                 errors: np.ndarray,
                 standardized_errors: np.ndarray) -> None:
        """
        Initializes a CellRecord object.

        Args:
          model (str): Model name.
          H (float): Hurst index of the cell.
          c (float): Volatility of the cell.
          n (int): Sample size of the cell.
          estimator (EstimatorType): Estimator the record aggregates.
          summary (Dict[str, float]): Output of summarize_estimates.
          flag_counts (Dict[str, int]): Number of replicates per flag, flagged replicates are
                                        excluded from the summary.
          replicates_used (int): Number of unflagged replicates.
          errors (np.ndarray): Estimate minus true parameter per used replicate.
          standardized_errors (np.ndarray): Errors scaled by their limiting law.
        """

        self.model = model
        self.H = H
        self.c = c
        self.n = n
        self.estimator = estimator
        self.mean = summary['mean']
        self.bias = summary['bias']
        self.variance = summary['variance']
        self.sd = summary['sd']
        self.q1 = summary['q1']
        self.median = summary['median']
        self.q3 = summary['q3']
        self.iqr = summary['iqr']
        self.mae = summary['mae']
        self.coverage = summary['coverage']
        self.flag_counts = flag_counts
        self.replicates_used = replicates_used
        self.errors = errors
        self.standardized_errors = standardized_errors

    @property
    def flagged(self) -> int:
        return sum(self.flag_counts.values())

    def flags_string(self) -> str:
        return ';'.join(f'{name}={count}' for name, count in sorted(self.flag_counts.items()))

    def to_row(self) -> Dict[str, Any]:
        return {'model': self.model, 'H': self.H, 'c': self.c, 'n': self.n,
                'estimator': self.estimator.value, 'mean': self.mean, 'bias': self.bias,
                'variance': self.variance, 'sd': self.sd, 'q1': self.q1, 'median': self.median,
                'q3': self.q3, 'iqr': self.iqr, 'mae': self.mae, 'coverage': self.coverage,
                'flags': self.flags_string(), 'replicates': self.replicates_used}


class ExperimentReport:
    """
    Cell records of a Monte Carlo study together with its variance law fits and
    normality diagnostics.
    """

    def __init__(self,
                 records: List[CellRecord],
                 regressions: Optional[List[Dict[str, Any]]] = None,
                 normality: Optional[List[Dict[str, Any]]] = None) -> None:
        """
        Initializes an ExperimentReport object.

        Args:
          records (List[CellRecord]): Records in cell order.
          regressions (Optional[List[Dict[str, Any]]]): Variance law fits, one per (H, n) group,
                                                       with keys model, H, n, k, intercept, adj_r2.
          normality (Optional[List[Dict[str, Any]]]): KS diagnostics with keys model, H, c, n,
                                                     estimator, statistic, p_value.
        """

        self.records = records
        self.regressions = regressions or []
        self.normality = normality or []

    def records_for(self, estimator: EstimatorType) -> List[CellRecord]:
        return [r for r in self.records if r.estimator == estimator]

    def estimators(self) -> List[EstimatorType]:
        return list(dict.fromkeys(r.estimator for r in self.records))

    def find(self, estimator: EstimatorType, H: float, c: float, n: int) -> CellRecord:
        for record in self.records:
            if record.estimator == estimator and (record.H, record.c, record.n) == (H, c, n):
                return record
        raise KeyError(f'No {estimator.value} cell for H={H}, c={c}, n={n}')

    def to_frame(self, estimator: EstimatorType) -> pd.DataFrame:
        rows = [r.to_row() for r in self.records_for(estimator)]
        return pd.DataFrame(rows, columns=REPORT_COLUMNS)

    def diagnostics_frame(self) -> pd.DataFrame:
        rows = []
        for fit in self.regressions:
            rows.append({'block': 'regression', 'model': fit['model'], 'H': fit['H'], 'c': math.nan,
                         'n': fit['n'], 'estimator': EstimatorType.C2.value, 'statistic': math.nan,
                         'p_value': math.nan, 'k': fit['k'], 'intercept': fit['intercept'],
                         'adj_r2': fit['adj_r2']})
        for test in self.normality:
            rows.append({'block': 'normality', 'model': test['model'], 'H': test['H'], 'c': test['c'],
                         'n': test['n'], 'estimator': test['estimator'], 'statistic': test['statistic'],
                         'p_value': test['p_value'], 'k': math.nan, 'intercept': math.nan,
                         'adj_r2': math.nan})
        return pd.DataFrame(rows, columns=DIAGNOSTICS_COLUMNS)

    def boxplot_frame(self, estimator: EstimatorType) -> pd.DataFrame:
        rows = []
        for record in self.records_for(estimator):
            box = boxplot_summary(record.errors)
            rows.append({'model': record.model, 'H': record.H, 'c': record.c, 'n': record.n,
                         'estimator': estimator.value, 'whisker_low': box.whisker_low, 'q1': box.q1,
                         'median': box.median, 'q3': box.q3, 'whisker_high': box.whisker_high,
                         'outliers': ';'.join(FLOAT_FORMAT % v for v in box.outliers)})
        return pd.DataFrame(rows, columns=BOXPLOT_COLUMNS)

    def save(self, out_dir: Union[str, Path]) -> List[Path]:
        """
        Writes report_<estimator>.csv, boxplot_<estimator>.csv and diagnostics.csv.

        Args:
          out_dir (Union[str, Path]): Output directory, created if missing.

        Returns:
          List[Path]: The written files.
        """

        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for estimator in self.estimators():
            for name, frame in ((f'report_{estimator.value}.csv', self.to_frame(estimator)),
                                (f'boxplot_{estimator.value}.csv', self.boxplot_frame(estimator))):
                write_csv(frame, out_dir / name)
                written.append(out_dir / name)
        write_csv(self.diagnostics_frame(), out_dir / 'diagnostics.csv')
        written.append(out_dir / 'diagnostics.csv')
        return written
