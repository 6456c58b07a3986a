"""Scalar-input epsilon-support-vector regression with an SMO dual solver."""

from ._backend import BACKEND, available_backends, get_solver
from .cv import cv_predictions, cv_rmse, kfold_indices, rmse
from .kernels import epsilon_loss, gram_matrix, kernel_eval
from .model import SvrModel, SvrParams, predict, train_svr
from .search import default_grid, grid_search

__all__ = [
    "BACKEND",
    "SvrModel",
    "SvrParams",
    "available_backends",
    "cv_predictions",
    "cv_rmse",
    "default_grid",
    "epsilon_loss",
    "get_solver",
    "gram_matrix",
    "grid_search",
    "kernel_eval",
    "kfold_indices",
    "predict",
    "rmse",
    "train_svr",
]
