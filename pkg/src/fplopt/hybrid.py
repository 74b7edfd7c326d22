"""Ridge feature model, hybrid blending, and the surrogate objectives."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class RidgeModel:
    weights: np.ndarray  # one per kept column
    intercept: float
    col_mean: np.ndarray
    col_std: np.ndarray
    kept: np.ndarray  # indices of columns with nonzero training variance

    def predict(self, features: np.ndarray) -> np.ndarray:
        x = (features[:, self.kept] - self.col_mean) / self.col_std
        return x @ self.weights + self.intercept


def ridge_fit(features: np.ndarray, targets: np.ndarray, alpha: float) -> RidgeModel:
    """Closed-form ridge with an unpenalized intercept.

    Columns are standardized to zero mean / unit variance on the training
    rows; zero-variance columns are dropped (and logged).  alpha=0 reduces to
    OLS on a full-rank system.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    features = np.asarray(features, dtype=float)
    targets = np.asarray(targets, dtype=float)
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    kept = np.flatnonzero(std > 0)
    if len(kept) < features.shape[1]:
        log.info("ridge_fit: dropped %d zero-variance columns", features.shape[1] - len(kept))
    x = (features[:, kept] - mean[kept]) / std[kept]
    # centering the target keeps the intercept out of the penalty
    y_mean = float(targets.mean())
    y = targets - y_mean
    gram = x.T @ x + alpha * np.eye(len(kept))
    weights = np.linalg.solve(gram, x.T @ y) if len(kept) else np.empty(0)
    return RidgeModel(weights=weights, intercept=y_mean, col_mean=mean[kept], col_std=std[kept], kept=kept)


def hybrid_score(realized_norm: float, predicted_norm: float, blend: float) -> float:
    """Convex blend (1-blend)*realized + blend*predicted on a common scale."""
    if not 0.0 <= blend <= 1.0:
        raise ValueError("blend weight must lie in [0, 1]")
    return (1.0 - blend) * realized_norm + blend * predicted_norm


def min_max_normalize(values: np.ndarray) -> np.ndarray:
    """Scale onto [0, 1] over the pool; a constant vector maps to 0.5."""
    values = np.asarray(values, dtype=float)
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.full_like(values, 0.5)
    return (values - lo) / (hi - lo)
