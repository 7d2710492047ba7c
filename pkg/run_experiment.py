import logging.config
from pathlib import Path

from fsde.experiment.config import ExperimentConfig
from fsde.experiment.plotting import plot_report
from fsde.experiment.runner import run_experiment
from fsde.experiment.statistics import fit_variance_model
from fsde.utils.io import read_config

config_file_path = Path('logging.yaml')
config = read_config(config_file_path)
logging.config.dictConfig(config)

if __name__ == '__main__':

    config_file = 'fsde/configs/table1_config.yaml'
    out_dir = Path('output/table1')

    experiment_config = ExperimentConfig.from_config(read_config(config_file))
    report = run_experiment(experiment_config)
    report.save(out_dir)
    plot_report(report, out_dir)

    print(report.to_frame(experiment_config.estimators[0])[['c', 'bias', 'variance', 'coverage', 'flags']])
    fit = fit_variance_model(report)
    print(f'Var(c2) = {fit.k:.4g} c^4 + {fit.intercept:.4g}, adjusted R^2 = {fit.adj_r2:.4f}')
