"""Shared fixtures for the test suite.

The expensive objects (the 3000-point noisy roll, its diffusion model,
and the consecutive reconstruction-error curve over it) are built once
per session and shared between the module tests and the acceptance
tests.
"""

import subprocess
import sys

import pytest

import diffmap_nre as dn

# Reference narrow-roll setup used throughout: a noisy swiss roll with
# n = 3000 points, coordinate noise sigma = 0.2, width 21, and the
# kernel (epsilon = 5, alpha = 1/2) on the full dense graph.
ROLL_PARAMS = dict(n=3000, noise_sigma=0.2, width=21.0, seed=0)
ROLL_KERNEL = dict(epsilon=5.0, alpha=0.5)


def make_roll(seed=0):
    params = dict(ROLL_PARAMS)
    params["seed"] = seed
    return dn.make_swiss_roll(dn.SwissRollParams(**params))


@pytest.fixture(scope="session")
def narrow_roll():
    """Reference roll plus its diffusion model (k_max = 8)."""
    data = make_roll()
    model, _ = dn.fit_diffusion_map(data, dn.KernelParams(**ROLL_KERNEL), k_max=8)
    return data, model


@pytest.fixture(scope="session")
def narrow_roll_curve(narrow_roll):
    """Consecutive reconstruction-error curve (k = 1..5) on the roll."""
    data, model = narrow_roll
    return dn.nre_curve_consecutive(model, data, 5, dn.DecoderConfig())


@pytest.fixture(scope="session")
def roll_reports(narrow_roll):
    """Decoder reports for the empty and {1, 5} component sets."""
    data, model = narrow_roll
    cfg = dn.DecoderConfig()
    return {
        "empty": dn.nre(model, data, (), cfg),
        "pair": dn.nre(model, data, (1, 5), cfg),
    }


@pytest.fixture(scope="session")
def line_model():
    """Uniform open segment (n = 500) with geometry normalization."""
    data = dn.make_curve_1d("line", 500, noise_sigma=0.0, seed=0)
    model, _ = dn.fit_diffusion_map(
        data, dn.KernelParams(epsilon=0.02, alpha=1.0), k_max=4
    )
    return data, model


@pytest.fixture()
def run_cli():
    """Run the installed command line module in a subprocess."""

    def run(*args):
        return subprocess.run(
            [sys.executable, "-m", "diffmap_nre", *[str(a) for a in args]],
            capture_output=True,
            text=True,
        )

    return run
