"""Shared numerical helpers for the tests."""

import numpy as np

import diffmap_nre as dn


def flatten_params(state):
    return np.concatenate([a.ravel() for a in state.weights + state.biases])


def set_params(state, flat):
    pos = 0
    for arr in state.weights + state.biases:
        arr.flat[:] = flat[pos : pos + arr.size]
        pos += arr.size


def kink_free_batch(state, rng, n_points, margin=1e-4):
    """Random inputs whose hidden pre-activations stay away from zero.

    ReLU is not differentiable at 0; resampling until every
    pre-activation clears ``margin`` keeps the finite-difference stencil
    on one side of each kink.
    """
    d = state.input_dim
    for _ in range(200):
        X = rng.standard_normal((n_points, d))
        h = X
        ok = True
        for W, b in zip(state.weights[:-1], state.biases[:-1]):
            z = h @ W + b
            if np.min(np.abs(z)) < margin:
                ok = False
                break
            h = np.maximum(z, 0.0)
        if ok:
            return X
    raise AssertionError("could not sample a kink-free batch")


def gradient_errors(state, inputs, targets, l2_beta, step=1e-6):
    """Relative errors of analytic gradients vs central differences."""
    _, gw, gb = dn.decoder_loss_and_grads(state, inputs, targets, l2_beta)
    analytic = np.concatenate([g.ravel() for g in gw + gb])
    flat = flatten_params(state).copy()
    numeric = np.zeros_like(flat)
    for idx in range(flat.size):
        for sign in (+1.0, -1.0):
            bumped = flat.copy()
            bumped[idx] += sign * step
            set_params(state, bumped)
            cost, _, _ = dn.decoder_loss_and_grads(state, inputs, targets, l2_beta)
            numeric[idx] += sign * cost
        numeric[idx] /= 2.0 * step
    set_params(state, flat)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    scale[scale < 1e-8] = 1.0
    return np.abs(analytic - numeric) / scale
