"""Deep-learning kernel: tensors, layers, losses, SGD training and model selection.

Built on NumPy only.
"""

from .builders import NetworkSpec, build_lenet, build_mlp, incremental_neurons, lenet_stage_sizes
from .dataset import DataSet, Split
from .ensemble import CombineMode, EnsembleModel
from .layers import Bounding, Conv2d, Dense, Layer, Pooling, Probabilistic, Scaling, Unscaling
from .losses import LossIndex, loss, loss_gradient
from .network import Gradients, NeuralNetwork
from .optimizers import SgdOptimizer, sgd_step
from .selection import Candidate, SelectionResult, input_subsets, select_model
from .serialization import deserialize_network, parameters_digest, serialize_network
from .tensor import Tensor, as_tensor
from .testing import TestingReport, evaluate
from .training import StopReason, TrainingReport, TrainingStrategy, train

__all__ = [
    "Bounding",
    "Candidate",
    "CombineMode",
    "Conv2d",
    "DataSet",
    "Dense",
    "EnsembleModel",
    "Gradients",
    "Layer",
    "LossIndex",
    "NetworkSpec",
    "NeuralNetwork",
    "Pooling",
    "Probabilistic",
    "Scaling",
    "SelectionResult",
    "SgdOptimizer",
    "Split",
    "StopReason",
    "Tensor",
    "TestingReport",
    "TrainingReport",
    "TrainingStrategy",
    "Unscaling",
    "as_tensor",
    "build_lenet",
    "build_mlp",
    "deserialize_network",
    "evaluate",
    "incremental_neurons",
    "input_subsets",
    "lenet_stage_sizes",
    "loss",
    "loss_gradient",
    "parameters_digest",
    "select_model",
    "serialize_network",
    "sgd_step",
    "train",
]
