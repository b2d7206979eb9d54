from .toys import ToyProblem, make_toy, TOY_NAMES
from .poisoning import (
    SyntheticDataset,
    PoisoningProblem,
    generate_dataset,
    logistic_loss,
    attack_objective,
    test_accuracy,
    train_theta,
)
from .runner import ExperimentConfig, run_experiment, run_toy

__all__ = [
    "ToyProblem", "make_toy", "TOY_NAMES",
    "SyntheticDataset", "PoisoningProblem", "generate_dataset",
    "logistic_loss", "attack_objective", "test_accuracy", "train_theta",
    "ExperimentConfig", "run_experiment", "run_toy",
]
