import argparse
import math
from pathlib import Path
from typing import List, Optional, Dict, Any

import pandas as pd

from fsde.estimation.estimators import estimate_h1, estimate_h2, estimate_c2
from fsde.estimation.variances import asym_variances
from fsde.experiment.config import ExperimentConfig, validate_config
from fsde.experiment.plotting import plot_report
from fsde.experiment.runner import run_experiment
from fsde.process.fbm import GridSpec, SamplingMethod
from fsde.process.sde import SamplePath, preset, simulate_sample_path
from fsde.process.utils import mix_seed
from fsde.result import EstimatorType, FLAG_FAILED
from fsde.utils.errors import ConfigError, NumericError, EstimationError
from fsde.utils.io import read_config, save_config, read_path_csv, write_csv
from fsde.utils.logging import get_logger, configure_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

ESTIMATE_COLUMNS = ['estimator', 'value', 'std_error', 'ci_low', 'ci_high', 'flags']
VARIANCE_COLUMNS = ['H', 'sigma2', 'sigma1_sq', 'sigma2_sq', 'sigma12', 'sigma_star2', 'truncation_terms']


def _load(args: argparse.Namespace, command: str) -> Dict[str, Any]:
    config = read_config(args.config)
    if args.seed is not None:
        if command == 'simulate':
            config['seed'] = args.seed
        elif command == 'experiment':
            config['base_seed'] = args.seed
    return config


def cmd_simulate(args: argparse.Namespace) -> int:
    """ Writes path_<i>.csv (k,t,X) for each requested path, with --driver also driver_<i>.csv (k,t,value). """

    config = validate_config(_load(args, 'simulate'), 'simulate')
    try:
        params = preset(config['model'], config['lambda'], config['c'], config['x0'], config['H'])
    except ValueError as e:
        raise ConfigError(str(e))
    grid = GridSpec(n=config['n'], T=config['T'])
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(config['paths']):
        seed = mix_seed(config['seed'], i)
        path, driver = simulate_sample_path(params, grid, seed, refine=config['refine'],
                                            method=SamplingMethod(config['method']))
        path.to_csv(out_dir / f'path_{i}.csv')
        if args.driver:
            driver.to_csv(out_dir / f'driver_{i}.csv')
    logger.info(f'Wrote {config["paths"]} {config["model"]} path(s) with n={grid.n} to {out_dir}')
    return EXIT_OK


def _odd_prefix(path: SamplePath) -> SamplePath:
    n = path.grid.n - path.grid.n % 2
    T = path.grid.T * n / path.grid.n
    return SamplePath(grid=GridSpec(n=n, T=T), values=path.values[:n + 1])


def _estimate_row(estimator: EstimatorType, estimate) -> Dict[str, Any]:
    if estimate is None:
        return {'estimator': estimator.value, 'value': math.nan, 'std_error': math.nan,
                'ci_low': math.nan, 'ci_high': math.nan, 'flags': FLAG_FAILED}
    return {'estimator': estimator.value, 'value': estimate.value, 'std_error': estimate.std_error,
            'ci_low': estimate.ci_low, 'ci_high': estimate.ci_high, 'flags': ';'.join(sorted(estimate.flags))}


def _try(estimator: EstimatorType, f, *args):
    try:
        return f(*args)
    except EstimationError as e:
        logger.warning(f'Estimator {estimator.value} failed: {e}')
        return None


def cmd_estimate(args: argparse.Namespace) -> int:
    """ Applies the requested estimators to a path csv and writes estimates.csv. """

    config = validate_config(_load(args, 'estimate'), 'estimate')
    estimators = [EstimatorType(e) for e in dict.fromkeys(config['estimators'])]
    h3_source = EstimatorType(config['h3_source'])
    needs_c = EstimatorType.H1 in estimators or (EstimatorType.C2 in estimators and h3_source == EstimatorType.H1)
    if needs_c and 'c' not in config:
        raise ConfigError('c: required field is missing, the estimator h1 needs the known volatility')

    csv_path = Path(config['csv_path'])
    if not csv_path.is_absolute():
        csv_path = Path(args.config).parent / csv_path
    times, values = read_path_csv(csv_path)
    if len(values) < 4 or times[0] != 0 or not times[-1] > 0:
        raise ConfigError(f'Path csv {csv_path} needs at least 4 rows on a grid starting at t=0')
    n, T = len(values) - 1, float(times[-1])
    if not n > T:
        raise ConfigError(f'Path csv {csv_path}: sample size n={n} must exceed the horizon T={T}')
    path = SamplePath(grid=GridSpec(n=n, T=T), values=values)
    level = config['ci_level']

    results = {}
    if EstimatorType.H2 in estimators:
        results[EstimatorType.H2] = _try(EstimatorType.H2, estimate_h2, path, level)
    if EstimatorType.H1 in estimators or h3_source == EstimatorType.H1:
        if 'c' in config:
            results[EstimatorType.H1] = _try(EstimatorType.H1, estimate_h1, path, config['c'], level)
    if EstimatorType.C2 in estimators:
        if h3_source == EstimatorType.H1:
            plugin = results[EstimatorType.H1]
        else:
            plugin = _try(EstimatorType.H2, estimate_h2, _odd_prefix(path), level)
        results[EstimatorType.C2] = None if plugin is None else \
            _try(EstimatorType.C2, estimate_c2, path, plugin.value, T, level)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([_estimate_row(e, results[e]) for e in estimators], columns=ESTIMATE_COLUMNS)
    write_csv(frame, out_dir / 'estimates.csv')
    logger.info(f'Wrote {len(estimators)} estimate(s) for {csv_path} to {out_dir}')
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    """ Runs a Monte Carlo study and writes its report csv files (and svg figures). """

    config = ExperimentConfig.from_config(_load(args, 'experiment'))
    out_dir = Path(args.out)
    report = run_experiment(config, threads=args.threads, progress=not args.no_progress)
    written = report.save(out_dir)
    save_config(config.to_config(), out_dir / 'config.yaml')
    if args.format == 'csv+svg':
        written += plot_report(report, out_dir)
    logger.info(f'Wrote {len(written)} report file(s) to {out_dir}')
    return EXIT_OK


def cmd_variances(args: argparse.Namespace) -> int:
    """ Tabulates the limiting variances for a list of Hurst indices. """

    config = validate_config(_load(args, 'variances'), 'variances')
    rows = []
    for H in config['h_values']:
        variances = asym_variances(H, config['rel_tol'])
        rows.append({column: getattr(variances, column) for column in VARIANCE_COLUMNS})
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(pd.DataFrame(rows, columns=VARIANCE_COLUMNS), out_dir / 'variances.csv')
    logger.info(f'Wrote variances for {len(rows)} Hurst index(es) to {out_dir}')
    return EXIT_OK


COMMANDS = {
    'simulate': cmd_simulate,
    'estimate': cmd_estimate,
    'experiment': cmd_experiment,
    'variances': cmd_variances,
}


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1 and number != -1:
        raise argparse.ArgumentTypeError(f'expected a positive number of threads or -1, got {value}')
    return number


def _seed(value: str) -> int:
    number = int(value)
    if not 0 <= number < 2 ** 64:
        raise argparse.ArgumentTypeError(f'seed must be an unsigned 64-bit integer, got {value}')
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fsde', description='Simulation and parameter estimation '
                                                              'for SDEs driven by fractional Brownian motion.')
    subparsers = parser.add_subparsers(dest='command', required=True)
    for name, command in COMMANDS.items():
        sub = subparsers.add_parser(name, help=command.__doc__.strip())
        sub.add_argument('--config', required=True, help='Config document (yaml or json).')
        sub.add_argument('--out', default='output', help='Output directory.')
        sub.add_argument('--format', default='csv', choices=['csv', 'csv+svg'], help='Output format.')
        sub.add_argument('--threads', type=_positive_int, default=None,
                         help='Worker threads, defaults to the config value (-1: all cores).')
        sub.add_argument('--seed', type=_seed, default=None, help='Overrides the seed of the config.')
        sub.add_argument('--logging', default=None, help='Logging config (yaml).')
        sub.add_argument('--no-progress', action='store_true', help='Hide the progress bar.')
        if name == 'simulate':
            sub.add_argument('--driver', action='store_true',
                             help='Also write the fine driving fBm of each path to driver_<i>.csv.')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.logging)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG
    except (NumericError, FloatingPointError) as e:
        logger.error(f'Numeric failure: {e}')
        return EXIT_NUMERIC


if __name__ == '__main__':
    raise SystemExit(main())
