from .nets import FeedForwardNet, Layer, constant_net, local_basis_net, random_net
from .pwl import (
    ComplexityCapError,
    PwlFunction,
    decision_intervals,
    exact_pwl,
    falsify_parity,
)
from .rnn import ParityTrace, rnn_parity, rnn_parity_sweep, rnn_parity_trace
from .complexity import complexity_bits, delta_code_length_bits
from .training import (
    TrainConfig,
    TrainLedger,
    TrainingDivergedError,
    accuracy,
    bce_loss_nats,
    train_sgd,
)

__all__ = [
    "FeedForwardNet",
    "Layer",
    "constant_net",
    "local_basis_net",
    "random_net",
    "ComplexityCapError",
    "PwlFunction",
    "decision_intervals",
    "exact_pwl",
    "falsify_parity",
    "ParityTrace",
    "rnn_parity",
    "rnn_parity_sweep",
    "rnn_parity_trace",
    "complexity_bits",
    "delta_code_length_bits",
    "TrainConfig",
    "TrainLedger",
    "TrainingDivergedError",
    "accuracy",
    "bce_loss_nats",
    "train_sgd",
]
