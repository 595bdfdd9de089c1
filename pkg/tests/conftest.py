import numpy as np
import pytest

from shapejc import (
    JCParams,
    ShapeInvariantModel,
    build_frequencies,
    build_nu,
    build_operators,
    build_spectrum,
)


def random_remainders(n, seed=7):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.5, 1.5, size=n)


def make_models(N):
    return {
        "harmonic": ShapeInvariantModel.harmonic(1.0),
        "self_similar": ShapeInvariantModel.self_similar(1.0, 0.9),
        "explicit": ShapeInvariantModel.explicit(random_remainders(N)),
    }


class Setup:
    def __init__(self, model, N, alpha, delta, hbar=1.0):
        self.spectrum = build_spectrum(model, N)
        self.params = JCParams(alpha, delta, hbar)
        self.bundle = build_operators(self.spectrum, self.params)
        self.freqs = build_frequencies(self.bundle)
        self.nus = build_nu(self.bundle)
        self.N = N


def make_setup(kind="harmonic", N=8, alpha=0.2, delta=0.3, hbar=1.0):
    return Setup(make_models(N)[kind], N, alpha, delta, hbar)


@pytest.fixture
def ho8():
    return make_setup("harmonic", 8, 0.2, 0.3)


@pytest.fixture
def ho8_resonant():
    return make_setup("harmonic", 8, 0.2, 0.0)
