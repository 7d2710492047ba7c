from collections import Counter
from typing import Dict, List, Optional, Union

import numpy as np
import tqdm
from joblib import Parallel, delayed

from fsde.estimation.estimators import estimate_h1, estimate_h2, estimate_c2
from fsde.experiment.config import ExperimentConfig, Cell
from fsde.experiment.decorators import capture_failure
from fsde.experiment.report import ExperimentReport, CellRecord
from fsde.experiment.statistics import summarize_estimates, standardized_errors, true_parameter, \
    fit_variance_model, normality_diagnostic, MIN_NORMALITY_SAMPLES
from fsde.process.fbm import GridSpec
from fsde.process.sde import SamplePath, preset, simulate_sample_path
from fsde.process.utils import mix_seed
from fsde.result import EstimatorType, HurstEstimate, VolatilityEstimate, FLAG_FAILED
from fsde.utils.logging import get_logger

logger = get_logger(__name__)

Estimate = Union[HurstEstimate, VolatilityEstimate]

# share of flagged replicates per cell above which a warning is logged
FLAG_WARNING_SHARE = 0.01


class Runner:
    """ Runs a Monte Carlo study cell by cell and replicate by replicate. """

    def __init__(self, config: ExperimentConfig, threads: Optional[int] = None, progress: bool = True) -> None:
        """
        Initializes a Runner object.

        Args:
          config (ExperimentConfig): The study to run.
          threads (Optional[int]): Worker threads, overrides config.threads.
          progress (bool): Whether to show a progress bar.
        """

        self.config = config
        self.threads = threads if threads is not None else config.threads
        self.progress = progress

    def run(self) -> ExperimentReport:
        """
        Simulates every replicate of every cell, applies the configured estimators and
        aggregates the results by cell. Replicate r of cell i draws its driver from the
        stream mix_seed(base_seed, i, r), so the report does not depend on execution order.

        Returns:
          ExperimentReport: Cell records, variance law fits and normality diagnostics.
        """

        config = self.config
        cells = config.cells()
        tasks = [(i, r) for i in range(len(cells)) for r in range(config.replicates)]
        logger.info(f'Running {len(cells)} cells x {config.replicates} replicates of model '
                    f'{config.model.value} with {self.threads} thread(s).')

        # ordered generator, the bar advances as replicates finish
        finished = Parallel(n_jobs=self.threads, prefer='threads', return_as='generator')(
            delayed(self._run_replicate)(cells[i], i, r) for i, r in tasks)
        outcomes = list(tqdm.tqdm(finished, total=len(tasks), disable=not self.progress))

        records = []
        for i, cell in enumerate(cells):
            cell_outcomes = outcomes[i * config.replicates:(i + 1) * config.replicates]
            for estimator in config.estimators:
                estimates = [outcome[estimator] for outcome in cell_outcomes]
                records.append(self._aggregate(cell, estimator, estimates))

        report = ExperimentReport(records=records)
        report.regressions = self._fit_variance_laws(report)
        report.normality = self._normality_diagnostics(report)
        return report

    def _run_replicate(self, cell: Cell, cell_index: int, replicate: int) -> Dict[EstimatorType, Optional[Estimate]]:
        config = self.config
        seed = mix_seed(config.base_seed, cell_index, replicate)
        with np.errstate(over='raise', divide='raise', invalid='raise'):
            path = _simulate(config, cell, seed)
            if path is None:
                return {estimator: None for estimator in config.estimators}
            return _apply_estimators(config, cell, path)

    def _aggregate(self, cell: Cell, estimator: EstimatorType, estimates: List[Optional[Estimate]]) -> CellRecord:
        config = self.config
        flag_counts = Counter()
        used = []
        for estimate in estimates:
            if estimate is None:
                flag_counts[FLAG_FAILED] += 1
            elif estimate.flags:
                flag_counts.update(estimate.flags)
            else:
                used.append(estimate)
        flagged = len(estimates) - len(used)
        if flagged > FLAG_WARNING_SHARE * len(estimates):
            logger.warning(f'{flagged} of {len(estimates)} replicates flagged for {estimator.value} '
                           f'in cell H={cell.H}, c={cell.c}, n={cell.n}: {dict(flag_counts)}')

        truth = true_parameter(estimator, cell.H, cell.c)
        values = np.array([e.value for e in used], dtype=float)
        summary = summarize_estimates(values, [e.ci_low for e in used], [e.ci_high for e in used], truth)
        logger.debug(f'Cell H={cell.H}, c={cell.c}, n={cell.n}, {estimator.value}: '
                     f'mean={summary["mean"]:.6g}, variance={summary["variance"]:.6g}')
        return CellRecord(model=config.model.value, H=cell.H, c=cell.c, n=cell.n, estimator=estimator,
                          summary=summary, flag_counts=dict(flag_counts), replicates_used=len(used),
                          errors=values - truth,
                          standardized_errors=standardized_errors(estimator, values, cell.H, cell.c,
                                                                  cell.n, config.T))

    def _fit_variance_laws(self, report: ExperimentReport) -> List[Dict]:
        if EstimatorType.C2 not in self.config.estimators or len(set(self.config.c_values)) < 3:
            return []
        fits = []
        for H in self.config.H_values:
            for n in self.config.n_values:
                try:
                    fit = fit_variance_model(report, H=H, n=n)
                except ValueError as e:
                    logger.warning(f'Variance law not fitted for H={H}, n={n}: {e}')
                    continue
                fits.append({'model': self.config.model.value, 'H': H, 'n': n, **fit._asdict()})
        return fits

    def _normality_diagnostics(self, report: ExperimentReport) -> List[Dict]:
        tests = []
        for record in report.records:
            if record.replicates_used < MIN_NORMALITY_SAMPLES:
                continue
            try:
                result = normality_diagnostic(record.standardized_errors)
            except ValueError as e:
                logger.warning(f'No normality diagnostic for {record.estimator.value} in cell '
                               f'H={record.H}, c={record.c}, n={record.n}: {e}')
                continue
            tests.append({'model': record.model, 'H': record.H, 'c': record.c, 'n': record.n,
                          'estimator': record.estimator.value, **result._asdict()})
        return tests


@capture_failure
def _simulate(config: ExperimentConfig, cell: Cell, seed: int) -> SamplePath:
    """ Path on the 2n grid, so the two-scale estimator sees n coarse intervals. """
    params = preset(config.model, config.lambda_, cell.c, config.x0, cell.H)
    path, _ = simulate_sample_path(params, GridSpec(n=2 * cell.n, T=config.T), seed,
                                   refine=config.refine, method=config.method)
    return path


@capture_failure
def _estimate_h1(path: SamplePath, c: float, level: float) -> HurstEstimate:
    return estimate_h1(path, c, level)


@capture_failure
def _estimate_h2(path: SamplePath, level: float) -> HurstEstimate:
    return estimate_h2(path, level)


@capture_failure
def _estimate_c2(path: SamplePath, h3: float, level: float) -> VolatilityEstimate:
    return estimate_c2(path, h3, level=level)


def _apply_estimators(config: ExperimentConfig, cell: Cell, path: SamplePath) \
        -> Dict[EstimatorType, Optional[Estimate]]:
    estimators = set(config.estimators)
    needed = set(estimators)
    if EstimatorType.C2 in estimators:
        needed.add(config.h3_source)
    coarse = path.subsample(2)
    results = {}
    if EstimatorType.H2 in needed:
        results[EstimatorType.H2] = _estimate_h2(path, config.ci_level)
    if EstimatorType.H1 in needed:
        results[EstimatorType.H1] = _estimate_h1(coarse, cell.c, config.ci_level)
    if EstimatorType.C2 in estimators:
        plugin = results[config.h3_source]
        results[EstimatorType.C2] = None if plugin is None else _estimate_c2(coarse, plugin.value, config.ci_level)
    return {estimator: results[estimator] for estimator in config.estimators}


def run_experiment(config: ExperimentConfig, threads: Optional[int] = None, progress: bool = True) -> ExperimentReport:
    """
    Runs a Monte Carlo study.

    Args:
      config (ExperimentConfig): The study to run.
      threads (Optional[int]): Worker threads, overrides config.threads.
      progress (bool): Whether to show a progress bar. (Default value = True)

    Returns:
      ExperimentReport: The aggregated report.
    """

    return Runner(config, threads=threads, progress=progress).run()
