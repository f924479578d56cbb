"""Diffusion map embeddings with neural reconstruction error analysis.

The package is organized as a pipeline:

- :mod:`diffmap_nre.datasets` — synthetic manifolds and column transforms
- :mod:`diffmap_nre.graph` — Gaussian kernel graph and Markov normalization
- :mod:`diffmap_nre.spectral` — eigenpairs, embeddings, diffusion distances
- :mod:`diffmap_nre.pca` — linear baseline
- :mod:`diffmap_nre.nre` — decoder training, reconstruction-error curves,
  greedy component selection
- :mod:`diffmap_nre.cli` — JSON-config command line driver
"""

from .datasets import (
    DataMatrix,
    SwissRollParams,
    dataset_from_csv,
    dataset_to_csv,
    discretize_column,
    duplicate_column,
    make_curve_1d,
    make_swiss_roll,
    minmax_normalize,
    scale_column,
    standardize,
    swiss_roll_arc_length,
)
from .errors import (
    DisconnectedGraphError,
    DivergenceError,
    EigensolverError,
    IsolatedPointError,
    ParameterError,
)
from .graph import (
    GraphMatrices,
    KernelParams,
    anisotropic_normalize,
    build_graph,
    connectivity_check,
    gaussian_kernel,
    knn_sparsify,
    markov_normalize,
    pairwise_sq_dists,
)
from .nre import (
    DecoderConfig,
    NRECurve,
    NREEntry,
    PlateauSchedule,
    StepSchedule,
    TrainReport,
    decoder_forward,
    decoder_init,
    decoder_loss_and_grads,
    decoder_train,
    derive_seed,
    greedy_search,
    nre,
    nre_curve_consecutive,
    nre_for_pca,
)
from .pca import (
    PcaModel,
    pca_fit,
    pca_inverse,
    pca_reconstruction_error,
    pca_transform,
)
from .spectral import (
    DiffusionModel,
    Embedding,
    decompose,
    diffusion_distance,
    embed,
    embedding_to_csv,
    export_spectrum,
    fit_diffusion_map,
    spectrum_threshold,
)

__version__ = "0.1.0"
