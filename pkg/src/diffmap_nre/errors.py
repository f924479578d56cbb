"""Exception types shared across the package.

Each exception maps to one failure category so that callers (and the
command line interface) can react to graph pathologies, training
divergence and bad parameters separately.
"""

__all__ = [
    "ParameterError",
    "IsolatedPointError",
    "DisconnectedGraphError",
    "EigensolverError",
    "DivergenceError",
]


class ParameterError(ValueError):
    """An argument is outside the documented domain of an operation."""


class IsolatedPointError(RuntimeError):
    """A kernel row summed to zero, leaving a point with no neighbors.

    Attributes
    ----------
    indices : tuple of int
        Row indices whose kernel row sums vanished.
    """

    def __init__(self, indices):
        self.indices = tuple(int(i) for i in indices)
        super().__init__(
            "kernel rows with zero sum (isolated points) at indices "
            f"{list(self.indices)}; increase epsilon or n_neighbors"
        )


class DisconnectedGraphError(RuntimeError):
    """The kernel graph has more than one connected component.

    Attributes
    ----------
    n_components : int
        Number of connected components found.
    """

    def __init__(self, n_components):
        self.n_components = int(n_components)
        super().__init__(
            f"kernel graph is disconnected ({self.n_components} components); "
            "increase epsilon or n_neighbors, or pass allow_disconnected=True"
        )


class EigensolverError(RuntimeError):
    """The eigensolver failed to converge or returned invalid residuals."""


class DivergenceError(RuntimeError):
    """Decoder training produced a non-finite loss.

    Attributes
    ----------
    epoch : int
        Zero-based epoch index at which the loss became non-finite.
    """

    def __init__(self, epoch, message=None):
        self.epoch = int(epoch)
        super().__init__(
            message
            or f"training loss became non-finite at epoch {self.epoch}; "
            "lower initial_lr or increase batch_size"
        )
