"""Fold splitting and cross-validated RMSE shared by grid search and evaluation."""

import numpy as np

from .model import predict, train_svr


def kfold_indices(n, k, seed):
    """Shuffle ``range(n)`` with a seeded RNG and cut it into ``k`` near-equal test folds."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    if n < k:
        raise ValueError(f"dataset of {n} rows is smaller than {k} folds")
    order = np.random.default_rng(seed).permutation(n)
    return np.array_split(order, k)


def cv_predictions(x, y, params, k, seed, tol=1e-3):
    """Out-of-fold predictions for every row; each row is held out exactly once."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.shape[0]
    pred = np.empty(n)
    mask = np.ones(n, dtype=bool)
    for test in kfold_indices(n, k, seed):
        mask[:] = True
        mask[test] = False
        model = train_svr(x[mask], y[mask], params, tol=tol)
        pred[test] = predict(model, x[test])
    return pred


def rmse(y_true, y_pred):
    r = np.asarray(y_true, dtype=np.float64) - np.asarray(y_pred, dtype=np.float64)
    return float(np.sqrt(np.mean(r * r)))


def cv_rmse(x, y, params, k, seed, tol=1e-3):
    """RMSE pooled over all held-out predictions of one k-fold split."""
    return rmse(y, cv_predictions(x, y, params, k, seed, tol=tol))
