"""Random state generators for soundness audits and property tests.

Everything here is test infrastructure.  The Ginibre construction gives
Hilbert-Schmidt distributed density matrices; separable samples are convex
mixtures of random product states, which for two qubits is enough to probe
the worst case of every witness bound.
"""

from __future__ import annotations

import numpy as np

from .linalg import dagger, kron


def random_ket(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def ginibre_density(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ dagger(g)
    return m / np.trace(m).real


def random_product_density(rng: np.random.Generator) -> np.ndarray:
    return kron(ginibre_density(rng, 2), ginibre_density(rng, 2))


def random_separable_density(rng: np.random.Generator, n_terms: int = 4) -> np.ndarray:
    weights = rng.dirichlet(np.ones(n_terms))
    rho = np.zeros((4, 4), dtype=complex)
    for w in weights:
        rho += w * random_product_density(rng)
    return rho


def random_hermitian(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (g + dagger(g))
