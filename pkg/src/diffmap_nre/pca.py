"""Principal component analysis baseline.

Components are eigenvectors of the population covariance matrix
(``X_c^T X_c / n``).  With that convention the mean squared
reconstruction error truncated at ``k`` components equals the sum of the
discarded eigenvalues exactly, so normalized reconstruction error is the
residual-variance ratio.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .datasets import DataMatrix
from .errors import ParameterError
from .spectral import Embedding

__all__ = [
    "PcaModel",
    "pca_fit",
    "pca_transform",
    "pca_inverse",
    "pca_reconstruction_error",
]


@dataclass(frozen=True)
class PcaModel:
    """A fitted PCA basis.

    Attributes
    ----------
    mean : numpy.ndarray
        Column means, shape ``(p,)``.
    components : numpy.ndarray
        Orthonormal columns, shape ``(p, k)``, ordered by decreasing
        explained variance; each column's largest-magnitude loading is
        positive.
    explained_variance : numpy.ndarray
        Population variance along each component, decreasing.
    total_variance : float
        Trace of the population covariance (sum over all ``p`` axes).
    column_names : tuple of str
        Names of the original columns, used when inverting.
    """

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    total_variance: float
    column_names: tuple


def _as_values_names(data):
    if isinstance(data, DataMatrix):
        return data.values, data.column_names
    values = np.asarray(data, dtype=float)
    if values.ndim != 2:
        raise ParameterError(f"expected a 2-D array, got shape {values.shape}")
    return values, tuple(f"x{j}" for j in range(values.shape[1]))


def pca_fit(data, k):
    """Fit the top ``k`` principal components.

    Parameters
    ----------
    data : DataMatrix or ndarray
    k : int
        Number of components, in ``[1, p]``.
    """
    values, names = _as_values_names(data)
    n, p = values.shape
    k = int(k)
    if not 1 <= k <= p:
        raise ParameterError(f"k must be in [1, {p}], got {k}")
    mean = values.mean(axis=0)
    centered = values - mean
    cov = centered.T @ centered / n
    w, V = scipy.linalg.eigh(cov)
    order = np.argsort(w)[::-1][:k]
    w = w[order]
    V = V[:, order]
    flip = V[np.argmax(np.abs(V), axis=0), np.arange(k)] < 0
    V = V * np.where(flip, -1.0, 1.0)
    return PcaModel(
        mean=mean,
        components=V,
        explained_variance=w,
        total_variance=float(np.trace(cov)),
        column_names=names,
    )


def pca_transform(model, data):
    """Project data onto the fitted components.

    Returns
    -------
    Embedding
        ``source="pca"``, ``t=0``, component indices ``1..k``; the mean
        row maps to the zero vector.
    """
    values, _ = _as_values_names(data)
    if values.shape[1] != model.mean.shape[0]:
        raise ParameterError(
            f"data has {values.shape[1]} columns, model expects {model.mean.shape[0]}"
        )
    coords = (values - model.mean) @ model.components
    k = model.components.shape[1]
    return Embedding(coords=coords, component_indices=tuple(range(1, k + 1)),
                     t=0, source="pca")


def pca_inverse(model, embedding):
    """Map embedding coordinates back to the original space.

    Parameters
    ----------
    model : PcaModel
    embedding : Embedding or ndarray
        Coordinates with at most as many columns as the model holds
        components; missing trailing components are treated as zero.

    Returns
    -------
    DataMatrix
        Reconstruction with the original column names.
    """
    coords = embedding.coords if isinstance(embedding, Embedding) else np.asarray(embedding, dtype=float)
    if coords.ndim != 2:
        raise ParameterError(f"coords must be 2-D, got shape {coords.shape}")
    k = model.components.shape[1]
    if coords.shape[1] > k:
        raise ParameterError(
            f"coords have {coords.shape[1]} columns, model holds only {k} components"
        )
    values = coords @ model.components[:, : coords.shape[1]].T + model.mean
    return DataMatrix(values, model.column_names)


def pca_reconstruction_error(model, k):
    """Normalized mean squared reconstruction error with ``k`` components.

    Equals ``(total variance - variance explained by the first k
    components) / total variance``: 1 at ``k = 0``, decreasing to the
    unexplained remainder at the number of fitted components.
    """
    k = int(k)
    if not 0 <= k <= model.components.shape[1]:
        raise ParameterError(
            f"k must be in [0, {model.components.shape[1]}], got {k}"
        )
    if model.total_variance <= 0:
        raise ParameterError("model has zero total variance")
    explained = float(model.explained_variance[:k].sum())
    return (model.total_variance - explained) / model.total_variance
