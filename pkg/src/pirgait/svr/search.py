"""Hyperparameter grid search by cross-validated RMSE."""

from itertools import product

from .cv import cv_rmse
from .model import SvrParams

DEFAULT_C = (0.1, 1.0, 10.0, 100.0)
DEFAULT_GAMMA = (0.01, 0.1, 1.0, 10.0)
DEFAULT_EPSILON = (0.5, 1.0, 2.0)


def default_grid(kernel="rbf"):
    """C x gamma x epsilon grid; gamma applies to standardized inputs."""
    return [
        SvrParams(C=c, gamma=g, epsilon=e, kernel=kernel)
        for c, g, e in product(DEFAULT_C, DEFAULT_GAMMA, DEFAULT_EPSILON)
    ]


def grid_search(x, y, grid, folds=5, seed=0, return_scores=False):
    """Return the grid point with the lowest CV-RMSE.

    Every cell uses the same fold split. Ties go to smaller C, then smaller
    gamma, then smaller epsilon, then earlier grid position, so the choice
    does not depend on evaluation order.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty hyperparameter grid")
    if len(x) < folds:
        raise ValueError(f"dataset of {len(x)} rows is smaller than {folds} folds")
    scores = [cv_rmse(x, y, p, folds, seed) for p in grid]
    best = min(
        range(len(grid)),
        key=lambda i: (scores[i], grid[i].C, grid[i].gamma, grid[i].epsilon, i),
    )
    if return_scores:
        return grid[best], scores
    return grid[best]
