"""Zeno limits of kicked evolutions.

A kick cycle ``E_1, ..., E_m`` interleaved with free evolution
``exp(t L / (m n))`` is repeated ``n`` times.  As ``n`` grows the evolution
approaches ``E_phi^n exp(t L_Z)`` with ``E_phi`` the peripheral part of
``E = E_m ... E_1`` and ``L_Z`` the Zeno generator.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .spectral import SpectralDecomposition, decompose
from .superop import SuperOperator, Verdict, _matrix, compose, is_cptp, op_norm, superop_exp

IDEMPOTENT_TOL = 1e-9
CROSSCHECK_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class KickCycle:
    """Kicks ``[E_1, ..., E_m]`` (applied in this order) and a generator ``L``."""

    kicks: tuple
    generator: SuperOperator
    check_cp: bool = True

    def __post_init__(self):
        kicks = tuple(k if isinstance(k, SuperOperator) else SuperOperator(k) for k in self.kicks)
        gen = self.generator if isinstance(self.generator, SuperOperator) else SuperOperator(self.generator)
        if not kicks:
            raise ValueError("a kick cycle needs at least one kick")
        for k in kicks:
            if k.dim != gen.dim:
                raise ValueError(f"kick dimension {k.dim} differs from generator dimension {gen.dim}")
            if k.convention != gen.convention:
                raise ValueError("kicks and generator use different vectorization conventions")
            if self.check_cp and is_cptp(k) is Verdict.NOT_CP:
                raise ValueError("every kick must be completely positive")
        object.__setattr__(self, "kicks", kicks)
        object.__setattr__(self, "generator", gen)

    @property
    def m(self) -> int:
        return len(self.kicks)

    @property
    def dim(self) -> int:
        return self.generator.dim

    @property
    def product(self) -> SuperOperator:
        return compose(self.kicks)


@dataclass(frozen=True, eq=False)
class ZenoLimit:
    product: SuperOperator
    decomposition: SpectralDecomposition
    lbar: SuperOperator
    lz: SuperOperator
    peripheral_part: SuperOperator
    peripheral_projection: SuperOperator
    peripheral_inverse: SuperOperator

    @property
    def decays_to_zero(self) -> bool:
        """True when the product has no peripheral spectrum at all."""
        return not self.decomposition.peripheral

    @property
    def dim(self) -> int:
        return self.product.dim


def averaged_generator(cycle: KickCycle, peripheral_inverse: np.ndarray) -> np.ndarray:
    """``(1/m) (L + E_phi^{-1} sum_{j=2..m} E_m...E_j L E_{j-1}...E_1)``."""
    kicks = [k.matrix for k in cycle.kicks]
    gen = cycle.generator.matrix
    n = gen.shape[0]
    m = len(kicks)
    # before[j] = E_j ... E_1, after[j] = E_m ... E_j (1-based j)
    before = [np.eye(n, dtype=complex)]
    for k in kicks:
        before.append(k @ before[-1])
    after = [np.eye(n, dtype=complex)] * (m + 2)
    for j in range(m, 0, -1):
        after[j] = after[j + 1] @ kicks[j - 1]
    total = np.zeros_like(gen)
    for j in range(2, m + 1):
        total = total + after[j] @ gen @ before[j - 1]
    return (gen + peripheral_inverse @ total) / m


def zeno_generator(cycle: KickCycle, **decompose_kwargs) -> ZenoLimit:
    """Zeno generator ``L_Z = sum over peripheral k of P_k Lbar P_k``.

    With a single kick the sum over ``j`` is empty and ``Lbar = L``.  An empty
    peripheral spectrum gives ``P_phi = 0`` and ``L_Z = 0``
    (``decays_to_zero`` is then set).
    """
    product = cycle.product
    dec = decompose(product, **decompose_kwargs)
    lbar = averaged_generator(cycle, dec.peripheral_inverse)
    lz = np.zeros_like(lbar)
    for c in dec.peripheral:
        lz = lz + c.projection @ lbar @ c.projection
    d = cycle.dim
    return ZenoLimit(
        product=product,
        decomposition=dec,
        lbar=SuperOperator(lbar, d),
        lz=SuperOperator(lz, d),
        peripheral_part=SuperOperator(dec.peripheral_part, d),
        peripheral_projection=SuperOperator(dec.peripheral_projection, d),
        peripheral_inverse=SuperOperator(dec.peripheral_inverse, d),
    )


def kicked_step(cycle: KickCycle, t: float, n: int) -> SuperOperator:
    """One cycle ``E_m e^{(t/mn) L} ... E_1 e^{(t/mn) L}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if t < 0:
        raise ValueError("t must be >= 0")
    free = superop_exp(cycle.generator, t / (cycle.m * n))
    step = SuperOperator.identity(cycle.dim)
    for k in cycle.kicks:
        step = k @ free @ step
    return step


def kicked_evolution(cycle: KickCycle, t: float, n: int) -> SuperOperator:
    """``kicked_step(cycle, t, n) ** n`` by repeated squaring."""
    return kicked_step(cycle, t, n) ** n


def peripheral_power(zl: ZenoLimit, n: int) -> np.ndarray:
    """``E_phi^n`` from unimodular eigenvalue phases."""
    size = zl.dim**2
    if n == 0:
        return np.eye(size, dtype=complex)
    out = np.zeros((size, size), dtype=complex)
    for c in zl.decomposition.peripheral:
        phase = c.eigenvalue / abs(c.eigenvalue)
        out = out + phase**n * c.projection
    return out


def zeno_limit_map(zl: ZenoLimit, t: float, n: int) -> SuperOperator:
    """``E_phi^n exp(t L_Z)``; ``n = 0`` gives ``exp(t L_Z)``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return SuperOperator(peripheral_power(zl, n) @ scipy.linalg.expm(t * zl.lz.matrix), zl.dim)


def loglog_slope(ns, values) -> float:
    """Least-squares slope of ``log value`` against ``log n`` (positive values only)."""
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = values > 0
    if np.count_nonzero(keep) < 2:
        return float("nan")
    return float(np.polyfit(np.log(ns[keep]), np.log(values[keep]), 1)[0])


@dataclass(frozen=True)
class ScanResult:
    """Distances along a list of ``n`` with the odd-``n`` log-log slope."""

    n: tuple
    distance: tuple
    odd_slope: float
    even_slope: float = float("nan")
    all_slope: float = float("nan")
    params: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(zip(self.n, self.distance))

    def __len__(self):
        return len(self.n)

    @property
    def parity(self) -> tuple:
        return tuple("odd" if k % 2 else "even" for k in self.n)

    def rows(self) -> list:
        return [(k, dist, par) for k, dist, par in zip(self.n, self.distance, self.parity)]


def _check_n_list(n_list) -> list:
    ns = [int(k) for k in n_list]
    if not ns or any(k < 1 for k in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_list must be strictly increasing positive integers")
    return ns


def _pmap(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _scan(ns, dists, params) -> ScanResult:
    odd = [(k, x) for k, x in zip(ns, dists) if k % 2]
    even = [(k, x) for k, x in zip(ns, dists) if not k % 2]
    return ScanResult(
        n=tuple(ns),
        distance=tuple(float(x) for x in dists),
        odd_slope=loglog_slope(*zip(*odd)) if len(odd) >= 2 else float("nan"),
        even_slope=loglog_slope(*zip(*even)) if len(even) >= 2 else float("nan"),
        all_slope=loglog_slope(ns, dists),
        params=dict(params),
    )


def convergence_scan(
    cycle: KickCycle,
    t: float,
    n_list: Sequence[int],
    zl: ZenoLimit | None = None,
    workers: int | None = None,
) -> ScanResult:
    """``op_norm(kicked_evolution(n) - zeno_limit_map(n))`` along ``n_list``."""
    ns = _check_n_list(n_list)
    zl = zeno_generator(cycle) if zl is None else zl

    def distance(k):
        return op_norm(kicked_evolution(cycle, t, k) - zeno_limit_map(zl, t, k))

    return _scan(ns, _pmap(distance, ns, workers), {"t": t, "m": cycle.m, "dim": cycle.dim})


def _is_hermitian_projection(p: np.ndarray, tol: float) -> bool:
    scale = max(1.0, np.linalg.norm(p, 2))
    return (
        np.linalg.norm(p @ p - p, 2) <= tol * scale and np.linalg.norm(p - p.conj().T, 2) <= tol * scale
    )


def hermitian_intersection(projs: Sequence, tol: float = IDEMPOTENT_TOL) -> np.ndarray:
    """Projection onto the common range of Hermitian projections.

    Obtained as the eigenprojection of ``P_m ... P_1`` for eigenvalue 1, which
    is Hermitian and absorbs every ``P_j`` from both sides.

    Raises
    ------
    ValueError
        If an input is not a Hermitian idempotent within ``tol``.
    """
    mats = [np.array(_matrix(p), dtype=complex) for p in projs]
    if not mats:
        raise ValueError("need at least one projection")
    for j, p in enumerate(mats):
        if not _is_hermitian_projection(p, tol):
            raise ValueError(f"input {j} is not a Hermitian projection")
    prod = mats[0]
    for p in mats[1:]:
        prod = p @ prod
    dec = decompose(prod)
    size = prod.shape[0]
    p_phi = np.zeros((size, size), dtype=complex)
    for c in dec.peripheral:
        if abs(c.eigenvalue - 1) <= 1e-7:
            p_phi = p_phi + c.projection
    for j, p in enumerate(mats):
        if max(np.linalg.norm(p_phi @ p - p_phi, 2), np.linalg.norm(p @ p_phi - p_phi, 2)) > 1e-8:
            raise ArithmeticError(f"intersection projection is not absorbed by input {j}")
    return p_phi


@dataclass(frozen=True, eq=False)
class ProjectionLimit:
    limit: SuperOperator
    distance: float
    crosscheck: float

    def __iter__(self):
        return iter((self.limit, self.distance))


def projection_cycle_limit(projs: Sequence, generator, t: float, n: int) -> ProjectionLimit:
    """Limit ``P_phi exp(t P_phi L P_phi)`` of a cycle of Hermitian superprojections.

    Also returns the distance of the ``n``-cycle evolution to that limit and the
    deviation from the general kick-cycle engine on the same cycle.

    Raises
    ------
    ArithmeticError
        When the two routes to the limit disagree by more than 1e-8.
    """
    kicks = [p if isinstance(p, SuperOperator) else SuperOperator(p) for p in projs]
    gen = generator if isinstance(generator, SuperOperator) else SuperOperator(generator)
    p_phi = hermitian_intersection([k.matrix for k in kicks])
    lim = p_phi @ scipy.linalg.expm(t * (p_phi @ gen.matrix @ p_phi))
    limit = SuperOperator(lim, gen.dim)
    cycle = KickCycle(tuple(kicks), gen)
    dist = op_norm(kicked_evolution(cycle, t, n) - limit)
    general = zeno_limit_map(zeno_generator(cycle), t, n)
    gap = op_norm(general - limit)
    if gap > CROSSCHECK_TOL:
        raise ArithmeticError(f"projection-cycle limit and general Zeno limit differ by {gap:.3g}")
    return ProjectionLimit(limit, dist, gap)


corollary2_limit = projection_cycle_limit


def asymptotic_projection_check(
    sequence: Callable[[int], object],
    projection,
    n_list: Sequence[int],
    workers: int | None = None,
) -> ScanResult:
    """Residuals ``op_norm(E_n^n - (P E_n P)^n)`` for a sequence ``n -> E_n``."""
    p = np.array(_matrix(projection), dtype=complex)
    if np.linalg.norm(p @ p - p, 2) > IDEMPOTENT_TOL * max(1.0, np.linalg.norm(p, 2)):
        raise ValueError("projection is not idempotent")
    ns = _check_n_list(n_list)

    def residual(k):
        e = _matrix(sequence(k))
        return float(
            np.linalg.norm(np.linalg.matrix_power(e, k) - np.linalg.matrix_power(p @ e @ p, k), 2)
        )

    return _scan(ns, _pmap(residual, ns, workers), {})
