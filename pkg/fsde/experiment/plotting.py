from collections import defaultdict
from pathlib import Path
from typing import List, Union, Callable

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np

from fsde.experiment.report import ExperimentReport, CellRecord
from fsde.experiment.statistics import WHISKER_FACTOR
from fsde.result import EstimatorType
from fsde.utils.logging import get_logger

logger = get_logger(__name__)

plt.rcParams['svg.hashsalt'] = 'fsde'


def _pooled_errors(records: List[CellRecord], key: Callable[[CellRecord], float]):
    groups = defaultdict(list)
    for record in records:
        groups[key(record)].append(record.errors)
    labels = sorted(groups)
    return labels, [np.concatenate(groups[label]) for label in labels]


def _boxplot(records: List[CellRecord], key: Callable[[CellRecord], float],
             xlabel: str, title: str, path: Path) -> None:
    labels, data = _pooled_errors(records, key)
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.boxplot(data, whis=WHISKER_FACTOR)
    ax.set_xticks(range(1, len(labels) + 1))
    ax.set_xticklabels([f'{label:g}' for label in labels])
    ax.axhline(0., color='grey', linewidth=0.8, linestyle='--')
    ax.set_xlabel(xlabel)
    ax.set_ylabel('estimate - true value')
    ax.set_title(title)
    fig.savefig(path, format='svg', bbox_inches='tight', metadata={'Date': None})
    plt.close(fig)


def _variance_law(report: ExperimentReport, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(8, 5))
    records = report.records_for(EstimatorType.C2)
    c4 = np.array([r.c ** 4 for r in records])
    ax.scatter(c4, [r.variance for r in records], color='black', label='cells')
    grid = np.linspace(0., c4.max(), 200)
    for fit in report.regressions:
        ax.plot(grid, fit['k'] * grid + fit['intercept'],
                label=f'H={fit["H"]:g}, n={fit["n"]}: adj. R^2={fit["adj_r2"]:.4f}')
    ax.set_xlabel('c^4')
    ax.set_ylabel('variance of the c^2 estimate')
    ax.set_title('Variance law of the volatility estimator')
    ax.legend()
    fig.savefig(path, format='svg', bbox_inches='tight', metadata={'Date': None})
    plt.close(fig)


def plot_report(report: ExperimentReport, out_dir: Union[str, Path]) -> List[Path]:
    """
    Writes boxplots of the estimator errors grouped by H and by n for every estimator,
    grouped by c for the volatility estimator, and the variance law scatter when fits exist.

    Args:
      report (ExperimentReport): Report with per-replicate errors.
      out_dir (Union[str, Path]): Output directory.

    Returns:
      List[Path]: The written files.
    """

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for estimator in report.estimators():
        records = [r for r in report.records_for(estimator) if len(r.errors) > 0]
        if not records:
            logger.warning(f'No usable replicates for {estimator.value}, skipping its figures.')
            continue
        name = estimator.value
        by_h = out_dir / f'errors_by_H_{name}.svg'
        _boxplot(records, lambda r: r.H, 'H', f'Errors of {name} by Hurst index', by_h)
        by_n = out_dir / f'errors_by_n_{name}.svg'
        _boxplot(records, lambda r: r.n, 'n', f'Errors of {name} by sample size', by_n)
        written += [by_h, by_n]
        if estimator == EstimatorType.C2:
            by_c = out_dir / 'errors_by_c_c2.svg'
            _boxplot(records, lambda r: r.c, 'c', 'Errors of c2 by volatility', by_c)
            written.append(by_c)
    if report.regressions:
        law = out_dir / 'variance_law.svg'
        _variance_law(report, law)
        written.append(law)
    logger.info(f'Wrote {len(written)} figure(s) to {out_dir}')
    return written
