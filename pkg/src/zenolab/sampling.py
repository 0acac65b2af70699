"""Random quantum operations and generators for property tests and sweeps."""

from __future__ import annotations

import numpy as np
import scipy.linalg
import scipy.stats

from .superop import GklsGenerator, KrausSet, SuperOperator, gkls_to_superop, kraus_to_superop
from .zeno import KickCycle


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def ginibre(shape, rng) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(d: int, seed=None) -> np.ndarray:
    return scipy.stats.unitary_group.rvs(d, random_state=rng_from(seed))


def random_kraus(d: int, seed=None, rank: int | None = None, contraction: float = 1.0) -> KrausSet:
    """Kraus set with ``sum K^dag K = contraction * I``.

    ``contraction = 1`` gives a channel; values in ``(0, 1)`` give a strictly
    trace-decreasing operation.
    """
    if not 0 < contraction <= 1:
        raise ValueError("contraction must lie in (0, 1]")
    rng = rng_from(seed)
    rank = int(rng.integers(1, d * d + 1)) if rank is None else rank
    g = ginibre((rank * d, d), rng)
    h = scipy.linalg.sqrtm(g.conj().T @ g)
    stacked = g @ np.linalg.inv(h) * np.sqrt(contraction)
    return KrausSet(tuple(stacked[k * d:(k + 1) * d] for k in range(rank)))


def random_channel(d: int, seed=None, rank: int | None = None) -> SuperOperator:
    return kraus_to_superop(random_kraus(d, seed, rank))


def random_measurement_channel(d: int, seed=None) -> SuperOperator:
    """Nonselective measurement of a random block partition of a random basis."""
    rng = rng_from(seed)
    u = random_unitary(d, rng)
    cuts = np.sort(rng.choice(np.arange(1, d), size=int(rng.integers(1, d)), replace=False))
    blocks = np.split(np.arange(d), cuts)
    ops = tuple(u[:, b] @ u[:, b].conj().T for b in blocks)
    return kraus_to_superop(KrausSet(ops))


def random_hermitian(d: int, seed=None, scale: float = 1.0) -> np.ndarray:
    g = ginibre((d, d), rng_from(seed))
    return scale * (g + g.conj().T) / 2


def random_gkls(d: int, seed=None, n_jumps: int = 1, scale: float = 1.0) -> GklsGenerator:
    rng = rng_from(seed)
    h = random_hermitian(d, rng, scale)
    jumps = tuple(np.sqrt(scale) * ginibre((d, d), rng) / np.sqrt(d) for _ in range(n_jumps))
    return GklsGenerator(h, jumps)


def random_cycle(seed, d: int | None = None, m: int | None = None) -> KickCycle:
    """A kick cycle of ``m`` random CP kicks with a random GKLS generator.

    Even seeds use random Kraus channels (usually a single peripheral
    eigenvalue), odd seeds use random nonselective measurements (rich
    peripheral spectrum; a single measurement has no transient part).
    """
    rng = rng_from(seed)
    d = int(rng.integers(2, 4)) if d is None else d
    m = int(rng.integers(1, 3)) if m is None else m
    measure = isinstance(seed, (int, np.integer)) and seed % 2 == 1
    kicks = [random_measurement_channel(d, rng) if measure else random_channel(d, rng) for _ in range(m)]
    gen = gkls_to_superop(random_gkls(d, rng))
    return KickCycle(tuple(kicks), gen)
