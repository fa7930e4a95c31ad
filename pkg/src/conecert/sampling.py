"""Seeded random ensembles and the deterministic probe vectors.

All randomness in the package flows through `numpy.random.default_rng`
generators created from explicit integer seeds; helpers here never touch
global state.
"""

import numpy as np

from .linalg import SQRT2, normalized


def rng_from(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def derive_seed(seed: int, stream: int) -> int:
    """Deterministic child seed for an independent substream."""
    return int(np.random.SeedSequence([int(seed), int(stream)]).generate_state(1)[0])


def crandn(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """I.i.d. standard complex normal entries."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    return normalized(crandn(rng, dim))


def random_operator(
    rng: np.random.Generator, n: int, m: int, rank: int | None = None
) -> np.ndarray:
    """Complex Gaussian n x m operator, optionally truncated to a given rank.

    Truncation keeps the top `rank` singular values of the Gaussian draw, so
    the result is generic within its rank class.
    """
    a = crandn(rng, n, m)
    if rank is None or rank >= min(n, m):
        return a
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return (u[:, :rank] * s[:rank]) @ vh[:rank]


def random_psd(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    """Wishart-style PSD matrix G G* with G of shape (dim, rank)."""
    r = dim if rank is None else rank
    g = crandn(rng, dim, r)
    return g @ g.conj().T


def unit_probe_vectors(m: int) -> list[np.ndarray]:
    """Deterministic probe set: e_j, (e_j + e_k)/sqrt2, (e_j + i e_k)/sqrt2."""
    eye = np.eye(m, dtype=np.complex128)
    probes = [eye[j] for j in range(m)]
    for j in range(m):
        for k in range(j + 1, m):
            probes.append((eye[j] + eye[k]) / SQRT2)
            probes.append((eye[j] + 1j * eye[k]) / SQRT2)
    return probes


def combination_probes(vectors: list[np.ndarray]) -> list[np.ndarray]:
    """Pairwise (a + b)/sqrt2 and (a + i b)/sqrt2 combinations, normalized."""
    out = []
    for j in range(len(vectors)):
        for k in range(j + 1, len(vectors)):
            out.append(normalized(vectors[j] + vectors[k]))
            out.append(normalized(vectors[j] + 1j * vectors[k]))
    return out
