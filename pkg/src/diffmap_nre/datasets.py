"""Synthetic manifold datasets and column-wise preprocessing.

Generators produce a :class:`DataMatrix`: an ``(n, p)`` float array of
ambient coordinates together with the latent (intrinsic) coordinates
that generated each sample.  Intrinsic columns ride along through every
transform untouched, so downstream embeddings can always be compared
against ground truth.

All randomness flows through explicit integer seeds via
``numpy.random.default_rng``; calling a generator twice with the same
arguments returns bit-identical output.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .csvio import read_table, write_table
from .errors import ParameterError

__all__ = [
    "DataMatrix",
    "SwissRollParams",
    "CURVE_KINDS",
    "make_swiss_roll",
    "swiss_roll_arc_length",
    "make_curve_1d",
    "standardize",
    "minmax_normalize",
    "scale_column",
    "duplicate_column",
    "discretize_column",
    "dataset_to_csv",
    "dataset_from_csv",
]

INTRINSIC_PREFIX = "intrinsic_"

CURVE_KINDS = ("line", "arc", "spiral", "circle")

_SWISS_ROLL_S_MIN = 3.0 * np.pi / 2.0
_SWISS_ROLL_S_MAX = 9.0 * np.pi / 2.0


@dataclass(frozen=True)
class DataMatrix:
    """An ``(n, p)`` data matrix with named columns and latent coordinates.

    Parameters
    ----------
    values : numpy.ndarray
        Shape ``(n, p)`` float array, ``n >= 2``, ``p >= 1``, all finite.
    column_names : tuple of str
        One unique name per column.
    intrinsic : numpy.ndarray or None
        Optional ``(n, q)`` array of latent coordinates (noise-free).
    intrinsic_names : tuple of str
        Names of the intrinsic columns, empty when ``intrinsic`` is None.
    """

    values: np.ndarray
    column_names: tuple
    intrinsic: np.ndarray = None
    intrinsic_names: tuple = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        if values.ndim != 2:
            raise ParameterError(f"values must be 2-D, got shape {values.shape}")
        n, p = values.shape
        if n < 2:
            raise ParameterError(f"need at least 2 samples, got {n}")
        if p < 1:
            raise ParameterError("need at least 1 column")
        if not np.all(np.isfinite(values)):
            raise ParameterError("values contain NaN or infinity")
        if len(self.column_names) != p:
            raise ParameterError(
                f"{len(self.column_names)} column names for {p} columns"
            )
        if len(set(self.column_names)) != p:
            raise ParameterError("column names must be unique")
        if self.intrinsic is not None:
            intrinsic = np.asarray(self.intrinsic, dtype=float)
            if intrinsic.ndim == 1:
                intrinsic = intrinsic[:, None]
            object.__setattr__(self, "intrinsic", intrinsic)
            if intrinsic.shape[0] != n:
                raise ParameterError(
                    f"intrinsic has {intrinsic.shape[0]} rows, values have {n}"
                )
            names = tuple(self.intrinsic_names)
            if len(names) != intrinsic.shape[1]:
                raise ParameterError(
                    f"{len(names)} intrinsic names for {intrinsic.shape[1]} columns"
                )
            object.__setattr__(self, "intrinsic_names", names)
        else:
            object.__setattr__(self, "intrinsic_names", ())

    @property
    def n_samples(self):
        return self.values.shape[0]

    @property
    def n_features(self):
        return self.values.shape[1]

    def column_index(self, column):
        """Resolve a column given by index or by name to an index."""
        if isinstance(column, str):
            try:
                return self.column_names.index(column)
            except ValueError:
                raise ParameterError(
                    f"no column named {column!r}; have {list(self.column_names)}"
                ) from None
        j = int(column)
        if not 0 <= j < self.n_features:
            raise ParameterError(
                f"column index {j} out of range for {self.n_features} columns"
            )
        return j


@dataclass(frozen=True)
class SwissRollParams:
    """Geometry and noise parameters for the swiss roll generator.

    Attributes
    ----------
    n : int
        Number of samples, at least 2.
    noise_sigma : float
        Standard deviation of isotropic Gaussian noise added to every
        ambient coordinate, ``>= 0``.
    width : float
        Extent of the flat (second) coordinate, ``> 0``.
    seed : int
        Seed for the generator.
    """

    n: int
    noise_sigma: float = 0.0
    width: float = 21.0
    seed: int = 0

    def __post_init__(self):
        if int(self.n) < 2:
            raise ParameterError(f"n must be >= 2, got {self.n}")
        if not np.isfinite(self.noise_sigma) or self.noise_sigma < 0:
            raise ParameterError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not np.isfinite(self.width) or self.width <= 0:
            raise ParameterError(f"width must be > 0, got {self.width}")


def make_swiss_roll(params):
    """Sample points from a noisy swiss roll surface in 3-D.

    The surface is the image of ``(s, h) -> (s cos s, h, s sin s)`` with
    the spiral parameter ``s`` uniform on ``[3 pi / 2, 9 pi / 2]`` and the
    width coordinate ``h`` uniform on ``[0, width]``.  Independent
    ``N(0, noise_sigma^2)`` noise is added to each of the three ambient
    coordinates.  The intrinsic columns hold the noise-free ``(s, h)``.

    Parameters
    ----------
    params : SwissRollParams

    Returns
    -------
    DataMatrix
        Columns ``("x", "y", "z")``; intrinsic columns ``("s", "h")``.
    """
    if not isinstance(params, SwissRollParams):
        raise ParameterError("params must be a SwissRollParams instance")
    n = int(params.n)
    rng = np.random.default_rng(params.seed)
    s = rng.uniform(_SWISS_ROLL_S_MIN, _SWISS_ROLL_S_MAX, size=n)
    h = rng.uniform(0.0, params.width, size=n)
    noise = rng.normal(0.0, params.noise_sigma, size=(n, 3)) if params.noise_sigma > 0 else np.zeros((n, 3))
    values = np.column_stack([
        s * np.cos(s) + noise[:, 0],
        h + noise[:, 1],
        s * np.sin(s) + noise[:, 2],
    ])
    intrinsic = np.column_stack([s, h])
    return DataMatrix(values, ("x", "y", "z"), intrinsic, ("s", "h"))


def swiss_roll_arc_length(s):
    """Arc length along the swiss roll spiral, measured from its inner edge.

    For the planar spiral ``u -> (u cos u, u sin u)`` the speed is
    ``sqrt(1 + u^2)``, so the arc length from the start of the roll at
    ``u = 3 pi / 2`` up to ``s`` is the integral of that speed, which has
    the closed form ``(u sqrt(1 + u^2) + asinh(u)) / 2`` evaluated between
    the endpoints.

    Parameters
    ----------
    s : array_like
        Spiral parameter values.

    Returns
    -------
    numpy.ndarray or float
        Arc length from the inner edge of the roll to each ``s``.
    """
    s = np.asarray(s, dtype=float)

    def antiderivative(u):
        return 0.5 * (u * np.sqrt(1.0 + u * u) + np.arcsinh(u))

    out = antiderivative(s) - antiderivative(_SWISS_ROLL_S_MIN)
    return out if out.ndim else float(out)


def _curve_polyline(kind, n):
    """Dense polyline for one named curve plus its open/closed flag.

    The vertex count is chosen so that, for constant-speed curves, the
    equispaced arc-length targets land exactly on polyline vertices.
    """
    closed = kind == "circle"
    m = 10 * n + 1 if closed else 10 * (n - 1) + 1
    if kind == "line":
        t = np.linspace(0.0, 1.0, m)
        pts = np.column_stack([3.0 * t, 4.0 * t])
    elif kind == "arc":
        theta = np.linspace(0.0, np.pi, m)
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
    elif kind == "spiral":
        theta = np.linspace(0.0, 4.0 * np.pi, m)
        r = 1.0 + 0.25 * theta
        pts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    elif kind == "circle":
        theta = np.linspace(0.0, 2.0 * np.pi, m)
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        raise ParameterError(f"unknown curve kind {kind!r}; choose from {CURVE_KINDS}")
    return pts, closed


def make_curve_1d(kind, n, noise_sigma=0.0, seed=0):
    """Sample ``n`` points equispaced in arc length along a planar curve.

    Positions are found by inverting the cumulative chord length of a
    densely oversampled polyline, so spacing is uniform in arc length
    regardless of how the curve is parametrized.  Open curves include
    both endpoints; the circle is sampled without a duplicate endpoint
    so consecutive gaps (including the closing one) all match.

    Parameters
    ----------
    kind : {"line", "arc", "spiral", "circle"}
        ``line`` is a straight segment of length 5, ``arc`` a half
        circle of radius 1, ``spiral`` an Archimedean spiral
        ``r = 1 + theta / 4`` over two turns, ``circle`` the unit circle.
    n : int
        Number of samples, at least 10.
    noise_sigma : float
        Standard deviation of Gaussian noise added to both coordinates.
    seed : int
        Seed for the noise generator.

    Returns
    -------
    DataMatrix
        Columns ``("x", "y")``; one intrinsic column ``arc_position``
        holding the normalized arc length in ``[0, 1]`` (for the circle,
        ``[0, 1)``).
    """
    if kind not in CURVE_KINDS:
        raise ParameterError(f"unknown curve kind {kind!r}; choose from {CURVE_KINDS}")
    n = int(n)
    if n < 10:
        raise ParameterError(f"n must be >= 10, got {n}")
    if not np.isfinite(noise_sigma) or noise_sigma < 0:
        raise ParameterError(f"noise_sigma must be >= 0, got {noise_sigma}")

    pts, closed = _curve_polyline(kind, n)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    u = np.arange(n) / n if closed else np.arange(n) / (n - 1)
    targets = u * total
    x = np.interp(targets, cum, pts[:, 0])
    y = np.interp(targets, cum, pts[:, 1])
    values = np.column_stack([x, y])
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        values = values + rng.normal(0.0, noise_sigma, size=(n, 2))
    return DataMatrix(values, ("x", "y"), u[:, None], ("arc_position",))


def standardize(data):
    """Center each column and scale it to unit population variance.

    Parameters
    ----------
    data : DataMatrix

    Returns
    -------
    DataMatrix
        Same shape, names and intrinsic columns; every ambient column has
        mean 0 and population standard deviation 1.

    Raises
    ------
    ParameterError
        If any column has zero variance (names the offending column).
    """
    values = data.values
    mean = values.mean(axis=0)
    sd = values.std(axis=0)
    zero = np.flatnonzero(sd == 0.0)
    if zero.size:
        names = [data.column_names[j] for j in zero]
        raise ParameterError(f"zero-variance columns cannot be standardized: {names}")
    return replace(data, values=(values - mean) / sd)


def minmax_normalize(data):
    """Rescale each column linearly onto ``[0, 1]``.

    Raises
    ------
    ParameterError
        If any column is constant (names the offending column).
    """
    values = data.values
    lo = values.min(axis=0)
    hi = values.max(axis=0)
    span = hi - lo
    zero = np.flatnonzero(span == 0.0)
    if zero.size:
        names = [data.column_names[j] for j in zero]
        raise ParameterError(f"constant columns cannot be min-max normalized: {names}")
    return replace(data, values=(values - lo) / span)


def scale_column(data, column, factor):
    """Multiply one column by a fixed nonzero factor.

    Parameters
    ----------
    data : DataMatrix
    column : int or str
        Column index or name.
    factor : float
        Finite and nonzero.
    """
    if not np.isfinite(factor) or factor == 0:
        raise ParameterError(f"factor must be finite and nonzero, got {factor}")
    j = data.column_index(column)
    values = data.values.copy()
    values[:, j] *= factor
    return replace(data, values=values)


def duplicate_column(data, column, copies, noise_sigma=0.0, seed=0):
    """Append noisy copies of one column.

    Each copy ``k`` (1-based) equals the source column plus independent
    ``N(0, noise_sigma^2)`` noise drawn from a generator seeded with
    ``seed + k``, so copies are mutually independent and the result does
    not depend on how many copies precede it.

    Parameters
    ----------
    data : DataMatrix
    column : int or str
    copies : int
        Number of copies to append, ``>= 1``.
    noise_sigma : float
        Noise level; 0 gives exact duplicates.
    seed : int

    Returns
    -------
    DataMatrix
        ``copies`` extra columns named ``<source>_copy<k>``.
    """
    copies = int(copies)
    if copies < 1:
        raise ParameterError(f"copies must be >= 1, got {copies}")
    if not np.isfinite(noise_sigma) or noise_sigma < 0:
        raise ParameterError(f"noise_sigma must be >= 0, got {noise_sigma}")
    j = data.column_index(column)
    source = data.values[:, j]
    base = data.column_names[j]
    new_cols = []
    new_names = []
    for k in range(1, copies + 1):
        col = source.copy()
        if noise_sigma > 0:
            rng = np.random.default_rng(seed + k)
            col = col + rng.normal(0.0, noise_sigma, size=source.shape)
        new_cols.append(col)
        new_names.append(f"{base}_copy{k}")
    values = np.column_stack([data.values] + new_cols)
    return replace(
        data,
        values=values,
        column_names=tuple(data.column_names) + tuple(new_names),
    )


def discretize_column(data, column, levels):
    """Snap one column to the nearest of a sorted set of levels.

    Values exactly halfway between two levels snap to the lower one.

    Parameters
    ----------
    data : DataMatrix
    column : int or str
    levels : sequence of float
        Nonempty, strictly increasing.
    """
    levels = np.asarray(levels, dtype=float)
    if levels.size == 0:
        raise ParameterError("levels must be nonempty")
    if levels.ndim != 1 or not np.all(np.isfinite(levels)):
        raise ParameterError("levels must be a 1-D sequence of finite values")
    if levels.size > 1 and not np.all(np.diff(levels) > 0):
        raise ParameterError("levels must be strictly increasing")
    j = data.column_index(column)
    col = data.values[:, j]
    midpoints = 0.5 * (levels[:-1] + levels[1:])
    idx = np.searchsorted(midpoints, col, side="left")
    values = data.values.copy()
    values[:, j] = levels[idx]
    return replace(data, values=values)


def dataset_to_csv(data, path):
    """Write a :class:`DataMatrix` to CSV.

    Ambient columns keep their names; intrinsic columns are prefixed with
    ``intrinsic_``.  Floats carry 17 significant digits.
    """
    header = list(data.column_names)
    columns = [data.values[:, j] for j in range(data.n_features)]
    if data.intrinsic is not None:
        for k, name in enumerate(data.intrinsic_names):
            header.append(INTRINSIC_PREFIX + name)
            columns.append(data.intrinsic[:, k])
    write_table(path, header, columns)


def dataset_from_csv(path):
    """Read a CSV produced by :func:`dataset_to_csv` back into a DataMatrix."""
    header, values = read_table(path)
    ambient_idx = [j for j, h in enumerate(header) if not h.startswith(INTRINSIC_PREFIX)]
    intrinsic_idx = [j for j, h in enumerate(header) if h.startswith(INTRINSIC_PREFIX)]
    if not ambient_idx:
        raise ParameterError(f"no ambient columns found in {path}")
    intrinsic = values[:, intrinsic_idx] if intrinsic_idx else None
    names = tuple(header[j][len(INTRINSIC_PREFIX):] for j in intrinsic_idx)
    return DataMatrix(
        values[:, ambient_idx],
        tuple(header[j] for j in ambient_idx),
        intrinsic,
        names,
    )
