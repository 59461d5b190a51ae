"""ADMM trainer for deep sigmoid networks.

The heavy lifting lives in the compiled extension; this package re-exports
its surface. Matrices are numpy arrays with one sample per column.
"""

from sigadmm._core import (
    SigmoidExpr,
    accuracy,
    empirical_loss,
    h_linear,
    init_weights,
    make_dataset,
    mse,
    predict,
    relu_approx,
    step_approx,
    train_admm,
    train_sgd,
    validate_params,
)

__all__ = [
    "SigmoidExpr",
    "accuracy",
    "empirical_loss",
    "h_linear",
    "init_weights",
    "make_dataset",
    "mse",
    "predict",
    "relu_approx",
    "step_approx",
    "train_admm",
    "train_sgd",
    "validate_params",
]
