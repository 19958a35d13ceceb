from .config import ExperimentConfig, load_config, make_config
from .emit import emit
from .runner import ResultTable, run_experiment

__all__ = ["ExperimentConfig", "ResultTable", "emit", "load_config", "make_config", "run_experiment"]
