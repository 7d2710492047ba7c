from fsde.experiment.config import ExperimentConfig, validate_config
from fsde.experiment.report import ExperimentReport, CellRecord
from fsde.experiment.runner import Runner, run_experiment
from fsde.experiment.statistics import fit_variance_model, fit_variance_law, normality_diagnostic, iqr_shrinkage
