"""Neural reconstruction error (NRE) for embedding components.

A small fully connected ReLU decoder is trained to map selected
(standardized) embedding columns back to the ambient data.  The mean
squared test-set error of that decoder, divided by the error of the best
constant predictor (the mean per-column variance of the test targets),
scores how much of the dataset the chosen components explain:

    nre(S) = mse_test(decoder trained on columns S) / epsilon_0

A value near 1 means the components carry nothing; near 0 means they
parametrize the data.  ``nre_curve_consecutive`` scores the nested sets
(1), (1, 2), ...; ``greedy_search`` instead picks at each round the
component whose addition lowers the score most, which surfaces
informative components hiding behind redundant harmonics of earlier
ones.

Everything here is plain ``numpy``: explicit forward/backward passes, an
Adam update, and two learning-rate schedules (step decay and
reduce-on-plateau).  All randomness is seeded; training the same
configuration twice is bit-identical.
"""

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .datasets import DataMatrix
from .errors import DivergenceError, ParameterError
from .pca import pca_transform
from .spectral import DiffusionModel, Embedding

__all__ = [
    "PlateauSchedule",
    "StepSchedule",
    "DecoderConfig",
    "DecoderState",
    "TrainReport",
    "NREEntry",
    "NRECurve",
    "decoder_init",
    "decoder_loss_and_grads",
    "decoder_forward",
    "decoder_train",
    "derive_seed",
    "nre",
    "nre_curve_consecutive",
    "greedy_search",
    "nre_for_pca",
]

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8


@dataclass(frozen=True)
class PlateauSchedule:
    """Multiply the learning rate by ``factor`` after a plateau.

    The monitored quantity is the epoch test loss.  An epoch counts as
    an improvement when the loss drops below ``best * (1 - threshold)``
    (relative threshold); after ``patience`` consecutive non-improving
    epochs the rate is reduced and the counter resets.
    """

    threshold: float = 0.01
    factor: float = 0.1
    patience: int = 10

    def __post_init__(self):
        if not 0.0 <= self.threshold < 1.0:
            raise ParameterError(f"threshold must be in [0, 1), got {self.threshold}")
        if not 0.0 < self.factor < 1.0:
            raise ParameterError(f"factor must be in (0, 1), got {self.factor}")
        if int(self.patience) < 0:
            raise ParameterError(f"patience must be >= 0, got {self.patience}")


@dataclass(frozen=True)
class StepSchedule:
    """Multiply the learning rate by ``factor`` every ``step_size`` epochs."""

    step_size: int
    factor: float

    def __post_init__(self):
        if int(self.step_size) < 1:
            raise ParameterError(f"step_size must be >= 1, got {self.step_size}")
        if not 0.0 < self.factor <= 1.0:
            raise ParameterError(f"factor must be in (0, 1], got {self.factor}")


@dataclass(frozen=True)
class DecoderConfig:
    """Hyperparameters of one decoder training run.

    Defaults reproduce the reference setup used throughout the tests: a
    (50, 50, 50) ReLU network trained for 100 epochs with batch size 32,
    L2 coefficient 1e-6, Adam at initial rate 0.05 and a
    reduce-on-plateau schedule (threshold 0.01, factor 0.1), with 5/6 of
    the points used for training.
    """

    hidden_layers: tuple = (50, 50, 50)
    epochs: int = 100
    batch_size: int = 32
    l2_beta: float = 1e-6
    initial_lr: float = 0.05
    schedule: object = PlateauSchedule()
    train_fraction: float = 2500 / 3000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers",
                           tuple(int(h) for h in self.hidden_layers))
        if any(h < 1 for h in self.hidden_layers):
            raise ParameterError(f"hidden layer sizes must be >= 1, got {self.hidden_layers}")
        if int(self.epochs) < 1:
            raise ParameterError(f"epochs must be >= 1, got {self.epochs}")
        if int(self.batch_size) < 1:
            raise ParameterError(f"batch_size must be >= 1, got {self.batch_size}")
        if not np.isfinite(self.l2_beta) or self.l2_beta < 0:
            raise ParameterError(f"l2_beta must be >= 0, got {self.l2_beta}")
        if not np.isfinite(self.initial_lr) or self.initial_lr <= 0:
            raise ParameterError(f"initial_lr must be > 0, got {self.initial_lr}")
        if not isinstance(self.schedule, (PlateauSchedule, StepSchedule)):
            raise ParameterError(
                "schedule must be a PlateauSchedule or StepSchedule, got "
                f"{type(self.schedule).__name__}"
            )
        if not 0.0 < self.train_fraction < 1.0:
            raise ParameterError(
                f"train_fraction must be in (0, 1), got {self.train_fraction}"
            )
        if int(self.seed) < 0:
            raise ParameterError(f"seed must be >= 0, got {self.seed}")


@dataclass
class DecoderState:
    """Weights and biases of a feed-forward ReLU decoder.

    Layout: ``weights[l]`` has shape ``(dims[l], dims[l+1])`` over
    ``dims = (input_dim, *hidden_layers, output_dim)``.  Hidden layers
    use ReLU; the output layer is linear, so with ``input_dim == 0`` the
    network degenerates to a trainable constant (the output bias).
    """

    weights: list
    biases: list

    @property
    def input_dim(self):
        return self.weights[0].shape[0]

    @property
    def output_dim(self):
        return self.weights[-1].shape[1]


def decoder_init(input_dim, output_dim, config):
    """Create a decoder with uniform ``+-sqrt(6 / fan_in)`` weights, zero biases.

    ``input_dim`` may be 0, in which case the first weight matrix is
    empty and the first hidden activation is just its bias.  The same
    seed always produces bit-identical parameters.
    """
    input_dim = int(input_dim)
    output_dim = int(output_dim)
    if input_dim < 0:
        raise ParameterError(f"input_dim must be >= 0, got {input_dim}")
    if output_dim < 1:
        raise ParameterError(f"output_dim must be >= 1, got {output_dim}")
    dims = (input_dim,) + config.hidden_layers + (output_dim,)
    rng = np.random.default_rng(config.seed)
    weights = []
    biases = []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        if fan_in == 0:
            weights.append(np.zeros((0, fan_out)))
        else:
            bound = np.sqrt(6.0 / fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return DecoderState(weights=weights, biases=biases)


def decoder_forward(state, inputs):
    """Network output for a batch of inputs."""
    h = np.asarray(inputs, dtype=float)
    for W, b in zip(state.weights[:-1], state.biases[:-1]):
        h = np.maximum(h @ W + b, 0.0)
    return h @ state.weights[-1] + state.biases[-1]


def _mse(prediction, targets):
    diff = prediction - targets
    return float(np.mean(diff * diff))


def decoder_loss_and_grads(state, inputs, targets, l2_beta):
    """Training cost and its exact gradients for one batch.

    The cost is ``mean((out - y)^2) + (l2_beta / 2) * sum(theta^2)`` with
    the penalty running over all weights *and* biases.

    Returns
    -------
    cost : float
    grad_weights : list of numpy.ndarray
    grad_biases : list of numpy.ndarray
    """
    X = np.asarray(inputs, dtype=float)
    Y = np.asarray(targets, dtype=float)
    n_layers = len(state.weights)
    pre = []
    acts = [X]
    h = X
    for W, b in zip(state.weights[:-1], state.biases[:-1]):
        z = h @ W + b
        pre.append(z)
        h = np.maximum(z, 0.0)
        acts.append(h)
    out = h @ state.weights[-1] + state.biases[-1]

    diff = out - Y
    mse = float(np.mean(diff * diff))
    penalty = sum(float(np.sum(W * W)) for W in state.weights)
    penalty += sum(float(np.sum(b * b)) for b in state.biases)
    cost = mse + 0.5 * l2_beta * penalty

    grad_weights = [None] * n_layers
    grad_biases = [None] * n_layers
    delta = 2.0 * diff / diff.size
    for l in range(n_layers - 1, -1, -1):
        grad_weights[l] = acts[l].T @ delta + l2_beta * state.weights[l]
        grad_biases[l] = delta.sum(axis=0) + l2_beta * state.biases[l]
        if l > 0:
            delta = delta @ state.weights[l].T
            delta[pre[l - 1] <= 0.0] = 0.0
    return cost, grad_weights, grad_biases


class _Adam:
    """Adam with bias correction (beta1=0.9, beta2=0.999, eps=1e-8)."""

    def __init__(self, params):
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads, lr):
        self.t += 1
        c1 = 1.0 - _ADAM_BETA1 ** self.t
        c2 = 1.0 - _ADAM_BETA2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= _ADAM_BETA1
            m += (1.0 - _ADAM_BETA1) * g
            v *= _ADAM_BETA2
            v += (1.0 - _ADAM_BETA2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + _ADAM_EPS)


@dataclass(frozen=True)
class TrainReport:
    """Outcome of one decoder training run.

    ``loss_history`` holds per-epoch ``(train_mse, test_mse)`` pairs
    (reconstruction error only, without the L2 penalty); ``lr_history``
    the learning rate in effect during each epoch.
    ``epsilon_k_normalized`` is ``final_test_loss / epsilon_0`` where
    ``epsilon_0`` is the mean per-column variance of the test targets.
    """

    final_train_loss: float
    final_test_loss: float
    loss_history: tuple
    lr_history: tuple
    epsilon_k_normalized: float
    epsilon_0: float
    n_train: int
    n_test: int


def decoder_train(state, inputs, targets, config):
    """Train a decoder in place and report losses.

    The points are shuffled once into a train/test split of fraction
    ``config.train_fraction``, then trained with Adam on shuffled
    mini-batches.  After every epoch the full train and test mean squared
    errors are recorded and the schedule is advanced (the plateau
    schedule monitors the test loss).

    Raises
    ------
    DivergenceError
        If an epoch ends with a non-finite loss; the exception reports
        the epoch index.
    """
    X = np.asarray(inputs, dtype=float)
    Y = np.asarray(targets, dtype=float)
    if X.ndim != 2 or Y.ndim != 2:
        raise ParameterError("inputs and targets must be 2-D arrays")
    if X.shape[0] != Y.shape[0]:
        raise ParameterError(
            f"inputs have {X.shape[0]} rows, targets {Y.shape[0]}"
        )
    if X.shape[1] != state.input_dim:
        raise ParameterError(
            f"inputs have {X.shape[1]} columns, decoder expects {state.input_dim}"
        )
    if Y.shape[1] != state.output_dim:
        raise ParameterError(
            f"targets have {Y.shape[1]} columns, decoder expects {state.output_dim}"
        )
    n = X.shape[0]
    if n < 2:
        raise ParameterError(f"need at least 2 points to split, got {n}")

    rng = np.random.default_rng(config.seed)
    n_train = int(round(config.train_fraction * n))
    n_train = min(max(n_train, 1), n - 1)
    perm = rng.permutation(n)
    train_idx = perm[:n_train]
    test_idx = perm[n_train:]
    X_train, Y_train = X[train_idx], Y[train_idx]
    X_test, Y_test = X[test_idx], Y[test_idx]

    params = state.weights + state.biases

    def split_grads(gw, gb):
        return gw + gb

    adam = _Adam(params)
    lr = float(config.initial_lr)
    schedule = config.schedule
    best = np.inf
    bad_epochs = 0

    loss_history = []
    lr_history = []
    # Overflow during a diverging run is reported once via
    # DivergenceError; silence the intermediate elementwise warnings.
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(int(config.epochs)):
            order = rng.permutation(n_train)
            for start in range(0, n_train, int(config.batch_size)):
                batch = order[start:start + int(config.batch_size)]
                _, gw, gb = decoder_loss_and_grads(
                    state, X_train[batch], Y_train[batch], config.l2_beta
                )
                adam.step(params, split_grads(gw, gb), lr)
            train_loss = _mse(decoder_forward(state, X_train), Y_train)
            test_loss = _mse(decoder_forward(state, X_test), Y_test)
            loss_history.append((train_loss, test_loss))
            lr_history.append(lr)
            if not (np.isfinite(train_loss) and np.isfinite(test_loss)):
                raise DivergenceError(epoch)
            if isinstance(schedule, StepSchedule):
                if (epoch + 1) % int(schedule.step_size) == 0:
                    lr *= schedule.factor
            else:
                if test_loss < best * (1.0 - schedule.threshold):
                    best = test_loss
                    bad_epochs = 0
                else:
                    bad_epochs += 1
                    if bad_epochs > int(schedule.patience):
                        lr *= schedule.factor
                        bad_epochs = 0

    final_train, final_test = loss_history[-1]
    epsilon_0 = float(np.mean(np.var(Y_test, axis=0)))
    if epsilon_0 > 0:
        eps_norm = final_test / epsilon_0
    else:
        eps_norm = 0.0 if final_test == 0 else np.inf
    return TrainReport(
        final_train_loss=final_train,
        final_test_loss=final_test,
        loss_history=tuple(loss_history),
        lr_history=tuple(lr_history),
        epsilon_k_normalized=eps_norm,
        epsilon_0=epsilon_0,
        n_train=n_train,
        n_test=n - n_train,
    )


def derive_seed(base_seed, components):
    """Deterministic per-component-set seed.

    Hashes ``(base_seed, sorted(components))`` through a seed sequence so
    each candidate set trains with its own reproducible randomness,
    independent of the order in which sets are evaluated.
    """
    entropy = [int(base_seed)] + sorted(int(c) for c in components)
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def _select_columns(source, components):
    """Embedding columns for the requested component indices."""
    comps = [int(c) for c in components]
    if len(set(comps)) != len(comps):
        raise ParameterError(f"components contain duplicates: {comps}")
    if any(c < 1 for c in comps):
        raise ParameterError(
            f"component indices start at 1 (0 is the constant direction), got {comps}"
        )
    if isinstance(source, DiffusionModel):
        m = source.eigenvalues.shape[0]
        for c in comps:
            if c >= m:
                raise ParameterError(
                    f"component {c} out of range; model holds components 1..{m - 1}"
                )
        return source.psi[:, comps]
    if isinstance(source, Embedding):
        available = {idx: col for idx, col in
                     zip(source.component_indices, source.coords.T)}
        missing = [c for c in comps if c not in available]
        if missing:
            raise ParameterError(
                f"components {missing} not present in embedding "
                f"{list(source.component_indices)}"
            )
        if not comps:
            return np.empty((source.coords.shape[0], 0))
        return np.column_stack([available[c] for c in comps])
    raise ParameterError(
        f"source must be a DiffusionModel or Embedding, got {type(source).__name__}"
    )


def _standardize_columns(columns, components):
    if columns.shape[1] == 0:
        return columns
    mean = columns.mean(axis=0)
    sd = columns.std(axis=0)
    zero = np.flatnonzero(sd == 0.0)
    if zero.size:
        bad = [components[int(z)] for z in zero]
        raise ParameterError(f"embedding components {bad} are constant")
    return (columns - mean) / sd


def _target_values(data):
    return data.values if isinstance(data, DataMatrix) else np.asarray(data, dtype=float)


def nre(source, data, components, config):
    """Normalized reconstruction error of one component set.

    Trains a fresh decoder from the selected embedding columns (each
    standardized over the whole dataset) back to the raw ambient data
    and returns its report.  ``components`` may be empty: the decoder
    then has no inputs and learns the best constant, making the
    normalized error close to 1 by construction.

    Parameters
    ----------
    source : DiffusionModel or Embedding
    data : DataMatrix or ndarray
        Reconstruction targets, in original (unstandardized) units.
    components : sequence of int
        Component indices (1-based).
    config : DecoderConfig
        Used as given; no seed derivation happens here.

    Returns
    -------
    TrainReport
    """
    columns = _select_columns(source, components)
    targets = _target_values(data)
    if columns.shape[0] != targets.shape[0]:
        raise ParameterError(
            f"embedding has {columns.shape[0]} rows, data has {targets.shape[0]}"
        )
    inputs = _standardize_columns(columns, [int(c) for c in components])
    state = decoder_init(inputs.shape[1], targets.shape[1], config)
    return decoder_train(state, inputs, targets, config)


@dataclass(frozen=True)
class NREEntry:
    """Score of one component set within a curve."""

    components: tuple
    nre: float
    report: TrainReport


@dataclass(frozen=True)
class NRECurve:
    """Scores of a growing family of component sets.

    ``entries[i].components`` is a strict superset of
    ``entries[i-1].components`` with exactly one extra index.  For greedy
    searches ``rounds`` holds, per round, the ``(candidate, nre)`` table
    of every component tried (``nan`` marks a candidate whose training
    diverged).
    """

    entries: tuple
    rounds: tuple = None

    @property
    def component_sets(self):
        return [list(e.components) for e in self.entries]

    @property
    def values(self):
        return np.array([e.nre for e in self.entries])


def nre_curve_consecutive(source, data, k_max, config):
    """Score the nested sets ``(1), (1, 2), ..., (1..k_max)``.

    Each set trains independently with a seed derived from
    ``(config.seed, set)`` via :func:`derive_seed`.
    """
    k_max = int(k_max)
    if k_max < 1:
        raise ParameterError(f"k_max must be >= 1, got {k_max}")
    entries = []
    for k in range(1, k_max + 1):
        comps = tuple(range(1, k + 1))
        cfg = replace(config, seed=derive_seed(config.seed, comps))
        report = nre(source, data, comps, cfg)
        entries.append(NREEntry(comps, report.epsilon_k_normalized, report))
    return NRECurve(tuple(entries))


def greedy_search(source, data, k_max, t_max, config):
    """Greedily pick the components that reduce NRE fastest.

    At each of ``t_max`` rounds every unchosen component ``j`` in
    ``1..k_max`` is scored by training a decoder on the already chosen
    set plus ``j`` (seed derived from the candidate set), and the
    lowest-scoring candidate wins; exact ties go to the smaller index.
    Candidates whose training diverges are skipped with a warning and
    recorded as ``nan`` in the round table.

    Returns
    -------
    selected : list of int
        Chosen component indices in pick order.
    curve : NRECurve
        One entry per round (the winner's report) plus the per-round
        candidate tables.
    """
    k_max = int(k_max)
    t_max = int(t_max)
    if k_max < 1:
        raise ParameterError(f"k_max must be >= 1, got {k_max}")
    if isinstance(source, DiffusionModel) and k_max > source.n_components:
        raise ParameterError(
            f"k_max={k_max} exceeds the {source.n_components} components in the model"
        )
    if not 0 <= t_max <= k_max:
        raise ParameterError(f"t_max must be in [0, {k_max}], got {t_max}")

    chosen = []
    entries = []
    rounds = []
    for _ in range(t_max):
        candidates = [j for j in range(1, k_max + 1) if j not in chosen]
        if not candidates:
            break
        table = []
        best = None
        for j in candidates:
            comps = chosen + [j]
            cfg = replace(config, seed=derive_seed(config.seed, comps))
            try:
                report = nre(source, data, comps, cfg)
            except DivergenceError as exc:
                warnings.warn(
                    f"candidate {j} skipped (training diverged at epoch "
                    f"{exc.epoch})",
                    stacklevel=2,
                )
                table.append((j, float("nan")))
                continue
            table.append((j, report.epsilon_k_normalized))
            if best is None or report.epsilon_k_normalized < best[1].epsilon_k_normalized:
                best = (j, report)
        rounds.append(tuple(table))
        if best is None:
            raise DivergenceError(
                0, "every candidate diverged in a greedy round; "
                "lower initial_lr or increase batch_size"
            )
        chosen.append(best[0])
        entries.append(NREEntry(tuple(chosen), best[1].epsilon_k_normalized, best[1]))
    return chosen, NRECurve(tuple(entries), tuple(rounds))


def nre_for_pca(model, data, k, config):
    """Normalized reconstruction error using the first ``k`` principal components.

    Mirrors :func:`nre` but with PCA scores as the decoder inputs, giving
    a like-for-like baseline for diffusion components.  ``k = 0`` trains
    the constant decoder.
    """
    k = int(k)
    fitted = model.components.shape[1]
    if not 0 <= k <= fitted:
        raise ParameterError(f"k must be in [0, {fitted}], got {k}")
    targets = _target_values(data)
    coords = pca_transform(model, data).coords[:, :k]
    if k > 0:
        sd = coords.std(axis=0)
        zero = np.flatnonzero(sd == 0.0)
        if zero.size:
            raise ParameterError(
                f"principal components {[int(z) + 1 for z in zero]} are constant"
            )
        coords = (coords - coords.mean(axis=0)) / sd
    state = decoder_init(k, targets.shape[1], config)
    return decoder_train(state, coords, targets, config)
