"""Spectral decomposition of superoperators.

``A = sum_k (lambda_k P_k + N_k)`` with spectral projections ``P_k`` and
nilpotents ``N_k``.  The eigenvalues on the unit circle form the peripheral
spectrum; their part of the map and its inverse on the peripheral subspace are
exposed as well.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .superop import SuperOperator, _matrix

PERIPHERAL_TOL = 1e-9
CLUSTER_RTOL = 1e-7
SEMISIMPLE_TOL = 1e-7
CONTOUR_NODES = 64
# eigenvector route is trusted below this condition number of the eigenbasis
EIG_COND_LIMIT = 1e8
# clusters this close (relative to the spectral scale) are merged when their
# eigenvectors are nearly parallel, which is how a split Jordan block looks
DEFECT_RADIUS = 1e-3
DEFECT_VECTOR_TOL = 1e-6


class ClusteringWarning(UserWarning):
    """Eigenvalue clusters had to be merged after the tolerance pass."""


class ReconstructionError(ArithmeticError):
    """The spectral pieces do not add back up to the input matrix."""


@dataclass(frozen=True, eq=False)
class SpectralCluster:
    eigenvalue: complex
    projection: np.ndarray
    nilpotent: np.ndarray
    multiplicity: int
    is_peripheral: bool
    members: tuple = ()

    @property
    def nilpotent_norm(self) -> float:
        return float(np.linalg.norm(self.nilpotent, 2))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    clusters: tuple
    peripheral_projection: np.ndarray
    peripheral_part: np.ndarray
    peripheral_inverse: np.ndarray
    mu0: float
    matrix: np.ndarray
    method: str = "eig"
    warnings: tuple = field(default=())

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def peripheral(self) -> tuple:
        return tuple(c for c in self.clusters if c.is_peripheral)

    @property
    def nonperipheral(self) -> tuple:
        return tuple(c for c in self.clusters if not c.is_peripheral)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([c.eigenvalue for c in self.clusters])

    def as_superop(self, name: str) -> SuperOperator:
        """Wrap one of the stored matrices (e.g. ``"peripheral_projection"``)."""
        return SuperOperator(getattr(self, name))

    def report(self) -> dict:
        """Plain-data summary for JSON export."""
        return {
            "eigenvalues": [[float(c.eigenvalue.real), float(c.eigenvalue.imag)] for c in self.clusters],
            "multiplicities": [int(c.multiplicity) for c in self.clusters],
            "peripheral": [bool(c.is_peripheral) for c in self.clusters],
            "nilpotent_norms": [c.nilpotent_norm for c in self.clusters],
            "mu0": float(self.mu0),
            "method": self.method,
        }


def _cluster_indices(w: np.ndarray, tol: float) -> list[list[int]]:
    """Single-linkage clustering of eigenvalues at distance ``tol``."""
    n = len(w)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(w[i] - w[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _min_singular_normalized(v: np.ndarray) -> float:
    cols = v / np.linalg.norm(v, axis=0, keepdims=True)
    s = np.linalg.svd(cols, compute_uv=False)
    return float(s[-1] / s[0])


def _merge_pass(w, v, groups, cluster_tol, scale, notes):
    """Merge crowded clusters and split Jordan blocks."""
    merged = True
    while merged:
        merged = False
        centers = [np.mean(w[g]) for g in groups]
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                gap = min(abs(w[i] - w[j]) for i in groups[a] for j in groups[b])
                crowded = abs(centers[a] - centers[b]) <= 2 * cluster_tol
                defective = gap <= DEFECT_RADIUS * scale and (
                    _min_singular_normalized(v[:, groups[a] + groups[b]]) <= DEFECT_VECTOR_TOL
                )
                if crowded or defective:
                    why = "closer than 2*cluster_tol" if crowded else "nearly parallel eigenvectors"
                    notes.append(f"merged clusters at {centers[a]:.6g} and {centers[b]:.6g} ({why})")
                    groups[a] = groups[a] + groups[b]
                    del groups[b]
                    merged = True
                    break
            if merged:
                break
    return groups


def spectral_projection_via_contour(
    a,
    center: complex,
    radius: float,
    quad_points: int = CONTOUR_NODES,
    margin: float | None = None,
) -> np.ndarray:
    """Riesz projection ``(1/2 pi i) oint (z - A)^{-1} dz`` by the trapezoid rule.

    The circle ``|z - center| = radius`` must keep every eigenvalue at least
    ``margin`` away (default ``1e-3 * radius``).  The rule converges
    geometrically in ``quad_points`` with ratio set by the eigenvalue closest to
    the circle.
    """
    m = _matrix(a)
    if radius <= 0 or quad_points < 3:
        raise ValueError("radius must be positive and quad_points >= 3")
    margin = 1e-3 * radius if margin is None else margin
    w = np.linalg.eigvals(m)
    clearance = np.min(np.abs(np.abs(w - center) - radius))
    if clearance <= margin:
        raise ValueError(
            f"contour |z - {center}| = {radius} passes within {clearance:.3g} of the spectrum"
        )
    n = m.shape[0]
    eye = np.eye(n)
    theta = 2 * np.pi * np.arange(quad_points) / quad_points
    out = np.zeros((n, n), dtype=complex)
    for th in theta:
        shift = radius * np.exp(1j * th)
        out += shift * np.linalg.solve((center + shift) * eye - m, eye)
    return out / quad_points


def _schur_projection(m: np.ndarray, select) -> tuple[np.ndarray, int]:
    """Spectral projection onto the eigenvalues picked by ``select``.

    A reordered Schur form ``T = [[T11, T12], [0, T22]]`` is block diagonalized
    by solving ``T11 Y - Y T22 = -T12``.
    """
    t, z, sdim = scipy.linalg.schur(m, output="complex", sort=select)
    n = m.shape[0]
    if sdim == 0:
        return np.zeros_like(m), 0
    if sdim == n:
        return np.eye(n, dtype=complex), n
    t11, t12, t22 = t[:sdim, :sdim], t[:sdim, sdim:], t[sdim:, sdim:]
    y = scipy.linalg.solve_sylvester(t11, -t22, -t12)
    block = np.zeros((n, n), dtype=complex)
    block[:sdim, :sdim] = np.eye(sdim)
    block[:sdim, sdim:] = -y
    return z @ block @ z.conj().T, sdim


def _projections_eig(v, groups):
    if np.linalg.cond(v) > EIG_COND_LIMIT:
        return None
    vinv = np.linalg.inv(v)
    return [v[:, g] @ vinv[g, :] for g in groups]


def _projections_schur(m, centers, groups):
    projs = []
    centers = np.asarray(centers)
    for k, g in enumerate(groups):

        def select(z, k=k):
            return int(np.argmin(np.abs(centers - z))) == k

        p, sdim = _schur_projection(m, select)
        if sdim != len(g):
            p = _projection_contour(m, centers, k)
        projs.append(p)
    return projs


def _projection_contour(m, centers, k):
    others = np.delete(centers, k)
    gap = np.min(np.abs(others - centers[k])) if len(others) else max(1.0, abs(centers[k]))
    return spectral_projection_via_contour(m, centers[k], 0.5 * gap)


def _resolution_error(projs, n) -> float:
    return float(np.linalg.norm(sum(projs) - np.eye(n), 2))


def decompose(
    a,
    cluster_tol: float | None = None,
    peripheral_tol: float = PERIPHERAL_TOL,
    method: str = "auto",
    reconstruction_tol: float | None = None,
) -> SpectralDecomposition:
    """Cluster the spectrum of ``a`` and build projections and nilpotents.

    Parameters
    ----------
    a : SuperOperator or ndarray
    cluster_tol : float, optional
        Eigenvalues closer than this are one cluster.  Default
        ``1e-7 * max|lambda|``.
    peripheral_tol : float
        A cluster is peripheral when ``abs(abs(lambda) - 1) <= peripheral_tol``.
    method : {"auto", "eig", "schur", "contour"}
        How projections are formed.  ``"auto"`` uses eigenvector outer products
        when the eigenbasis is well conditioned and no cluster looks defective,
        and the reordered Schur form otherwise.

    Raises
    ------
    ReconstructionError
        If ``sum_k (lambda_k P_k + N_k)`` misses ``a`` by more than the
        reconstruction tolerance.
    """
    m = np.array(_matrix(a), dtype=complex)
    n = m.shape[0]
    if m.ndim != 2 or m.shape[1] != n:
        raise ValueError("decompose needs a square matrix")
    if peripheral_tol <= 0 or (cluster_tol is not None and cluster_tol <= 0):
        raise ValueError("tolerances must be positive")
    if method not in ("auto", "eig", "schur", "contour"):
        raise ValueError(f"unknown projection method {method!r}")
    norm_a = float(np.linalg.norm(m, 2))
    w, v = scipy.linalg.eig(m)
    scale = float(np.max(np.abs(w))) if n else 0.0
    if scale == 0.0:
        scale = max(norm_a, 1.0)
    ctol = CLUSTER_RTOL * scale if cluster_tol is None else cluster_tol

    notes: list[str] = []
    groups = _cluster_indices(w, ctol)
    before = len(groups)
    groups = _merge_pass(w, v, groups, ctol, scale, notes)
    for note in notes:
        warnings.warn(note, ClusteringWarning, stacklevel=2)

    centers = [complex(np.mean(w[g])) for g in groups]
    # a cluster within tolerance of the origin is the zero eigenvalue
    centers = [0j if abs(c) <= ctol else c for c in centers]
    order = sorted(range(len(groups)), key=lambda k: (-abs(centers[k]), np.angle(centers[k])))
    groups = [groups[k] for k in order]
    centers = [centers[k] for k in order]

    projs = None
    used = method
    if method in ("auto", "eig") and len(groups) == before:
        projs = _projections_eig(v, groups)
        if projs is not None and _resolution_error(projs, n) > 1e-10:
            projs = None
        used = "eig"
    if projs is None and method == "eig":
        raise ReconstructionError("eigenvector basis is too ill conditioned for the eig route")
    if projs is None and method in ("auto", "schur"):
        projs = _projections_schur(m, centers, groups)
        used = "schur"
    if projs is None:
        projs = [_projection_contour(m, np.asarray(centers), k) for k in range(len(groups))]
        used = "contour"

    clusters = []
    for g, lam, p in zip(groups, centers, projs):
        nil = p @ m @ p - lam * p
        periph = abs(abs(lam) - 1.0) <= peripheral_tol
        clusters.append(SpectralCluster(lam, p, nil, len(g), periph, tuple(int(i) for i in g)))

    recon = sum(c.eigenvalue * c.projection + c.nilpotent for c in clusters)
    rtol = 1e-7 * max(norm_a, 1.0) if reconstruction_tol is None else reconstruction_tol
    err = float(np.linalg.norm(recon - m, 2))
    if err > rtol:
        raise ReconstructionError(f"spectral reconstruction misses the input by {err:.3g} > {rtol:.3g}")

    zero = np.zeros((n, n), dtype=complex)
    periph = [c for c in clusters if c.is_peripheral]
    p_phi = sum((c.projection for c in periph), zero)
    e_phi = sum((c.eigenvalue * c.projection for c in periph), zero)
    e_phi_inv = sum((c.projection / c.eigenvalue for c in periph), zero)
    mu0 = max((abs(c.eigenvalue) for c in clusters if not c.is_peripheral), default=0.0)
    return SpectralDecomposition(
        clusters=tuple(clusters),
        peripheral_projection=p_phi,
        peripheral_part=e_phi,
        peripheral_inverse=e_phi_inv,
        mu0=float(mu0),
        matrix=m,
        method=used,
        warnings=tuple(notes),
    )


def peripheral_inverse(dec: SpectralDecomposition) -> SuperOperator:
    """``sum over |lambda_k| = 1 of P_k / lambda_k`` (zero when nothing is peripheral)."""
    return SuperOperator(dec.peripheral_inverse)


def schur_split(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(Lambda, N, U)`` with ``A = U^dag (Lambda + N) U``.

    ``Lambda`` is diagonal, ``N`` strictly upper triangular and ``U`` unitary.
    """
    m = _matrix(a)
    t, z = scipy.linalg.schur(m, output="complex")
    lam = np.diag(np.diag(t))
    nil = np.triu(t, 1)
    return lam, nil, z.conj().T
