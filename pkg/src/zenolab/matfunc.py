"""Primary matrix logarithm, f(ad_A), g(ad_A) and the generalized BCH step.

``f(z) = (1 - e^{-z}) / z`` is entire; ``g = 1/f`` has poles at ``2 pi i k``
(k != 0).  ``f(ad_A)`` is assembled from Frechet derivatives of the matrix
exponential, obtained as the top-right block of ``expm([[A, X], [0, A]])``.
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg
import scipy.optimize

from .superop import _matrix, unvec, vec

TWO_PI = 2 * np.pi
AUTO = "auto"
SING_RTOL = 1e-10
KERNEL_RTOL = 1e-10
ROUNDTRIP_RTOL = 1e-9


class NoAdmissibleCutError(ArithmeticError):
    """No straight branch cut keeps clear of the spectrum."""


class BranchJumpError(ArithmeticError):
    """The BCH logarithm left the branch of the reference logarithm."""


class SingularCorrectionError(ArithmeticError):
    """``f(ad_A)`` is (numerically) singular, so ``g(ad_A)`` does not exist."""


def _normalize_angle(phi: float) -> float:
    # into (-2 pi, 0]
    phi = float(np.fmod(phi, TWO_PI))
    if phi > 0:
        phi -= TWO_PI
    if phi <= -TWO_PI:
        phi += TWO_PI
    return phi


@dataclass(frozen=True)
class BranchCut:
    """Cut along the half-line ``{r e^{i angle}, r >= 0}``.

    The logarithm on this cut takes arguments in ``(angle, angle + 2 pi)``,
    with ``angle`` stored normalized into ``(-2 pi, 0]``.  The principal
    branch is ``BranchCut(-pi)`` (equivalently ``BranchCut(pi)``).
    """

    angle: float

    def __post_init__(self):
        if not np.isfinite(self.angle):
            raise ValueError("cut angle must be finite")
        object.__setattr__(self, "angle", _normalize_angle(self.angle))

    def clearance(self, eigenvalues) -> float:
        """Smallest distance from the eigenvalues to the cut."""
        z = np.asarray(eigenvalues, dtype=complex) * np.exp(-1j * self.angle)
        dist = np.where(z.real <= 0, np.abs(z), np.abs(z.imag))
        return float(np.min(dist)) if dist.size else np.inf

    @property
    def strip(self) -> tuple[float, float]:
        """Open interval containing the imaginary parts of the logarithm."""
        return self.angle, self.angle + TWO_PI


Cut = Union[BranchCut, str, None]


def auto_cut(eigenvalues) -> BranchCut:
    """Put the cut in the middle of the widest angular gap of the spectrum."""
    args = np.sort(np.mod(np.angle(np.asarray(eigenvalues, dtype=complex)), TWO_PI))
    if args.size == 0:
        return BranchCut(-np.pi)
    gaps = np.diff(np.concatenate([args, [args[0] + TWO_PI]]))
    k = int(np.argmax(gaps))
    return BranchCut(args[k] + gaps[k] / 2)


def resolve_cut(e, cut: Cut = AUTO, clearance_rtol: float = 1e-10) -> BranchCut:
    """Return a concrete cut for ``e`` after checking invertibility and clearance."""
    m = _matrix(e)
    w = np.linalg.eigvals(m)
    scale = max(float(np.max(np.abs(w))), np.finfo(float).tiny)
    if np.min(np.abs(w)) <= 1e-14 * max(np.linalg.norm(m, 2), 1e-300):
        raise NoAdmissibleCutError("matrix is singular, it has no logarithm")
    c = auto_cut(w) if cut is None or cut == AUTO else cut
    if not isinstance(c, BranchCut):
        raise TypeError(f"cut must be a BranchCut or {AUTO!r}")
    if c.clearance(w) <= clearance_rtol * scale:
        raise NoAdmissibleCutError(
            f"cut at angle {c.angle:.6g} passes within {c.clearance(w):.3g} of the spectrum"
        )
    return c


_LOGM_LOCK = threading.Lock()


def _logm(m: np.ndarray) -> np.ndarray:
    """``scipy.linalg.logm`` with its randomized norm estimate made reproducible.

    The 1-norm estimator inside ``logm`` draws from numpy's global generator,
    which perturbs the last bits of the result from call to call.  The global
    state is reseeded for the call and restored afterwards.
    """
    with _LOGM_LOCK:
        state = np.random.get_state()
        np.random.seed(0)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                return scipy.linalg.logm(m)
        finally:
            np.random.set_state(state)


def primary_log(e, cut: Cut = AUTO, return_cut: bool = False):
    """Primary logarithm of ``e`` on the branch defined by ``cut``.

    The principal logarithm of ``e * exp(-i (angle + pi))`` is shifted back by
    ``i (angle + pi)``, which moves the principal cut onto the requested one.

    Raises
    ------
    NoAdmissibleCutError
        If ``e`` is singular or the cut touches the spectrum.
    """
    m = _matrix(e)
    c = resolve_cut(m, cut)
    shift = c.angle + np.pi
    a = _logm(m * np.exp(-1j * shift))
    a = np.asarray(a, dtype=complex) + 1j * shift * np.eye(m.shape[0])
    err = np.linalg.norm(scipy.linalg.expm(a) - m, 2)
    if err > ROUNDTRIP_RTOL * max(np.linalg.norm(m, 2), 1.0):
        raise ArithmeticError(f"logarithm failed the exp round trip (error {err:.3g})")
    return (a, c) if return_cut else a


@dataclass(frozen=True, eq=False)
class AdSuperstructure:
    base: np.ndarray
    ad_matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.base.shape[0]

    def apply(self, x) -> np.ndarray:
        return unvec(self.ad_matrix @ vec(x), self.size)


def build_ad(a) -> AdSuperstructure:
    """Matrix of ``X -> A X - X A`` under column stacking: ``I (x) A - A^T (x) I``."""
    a = np.array(_matrix(a), dtype=complex)
    eye = np.eye(a.shape[0])
    return AdSuperstructure(a, np.kron(eye, a) - np.kron(a.T, eye))


def f_scalar(z):
    """``(1 - e^{-z}) / z`` with the removable singularity filled in."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-8
    safe = np.where(small, 1.0, z)
    return np.where(small, 1 - z / 2 + z * z / 6, -np.expm1(-safe) / safe)


def g_scalar(z):
    return 1.0 / f_scalar(z)


def f_of_ad(a) -> np.ndarray:
    """Matrix of ``f(ad_A)`` from block-exponential Frechet derivatives.

    Column ``a + D b`` is ``vec(e^{-A} F_ab)`` where ``F_ab`` is the top-right
    block of ``expm([[A, E_ab], [0, A]])``.
    """
    a = np.array(_matrix(a), dtype=complex)
    dd = a.shape[0]
    blocks = np.zeros((dd * dd, 2 * dd, 2 * dd), dtype=complex)
    blocks[:, :dd, :dd] = a
    blocks[:, dd:, dd:] = a
    for col in range(dd * dd):
        row_idx, col_idx = col % dd, col // dd
        blocks[col, row_idx, dd + col_idx] = 1.0
    tops = scipy.linalg.expm(blocks)[:, :dd, dd:]
    inv_exp = scipy.linalg.expm(-a)
    out = np.empty((dd * dd, dd * dd), dtype=complex)
    for col in range(dd * dd):
        out[:, col] = vec(inv_exp @ tops[col])
    return out


def f_of_ad_eig(a) -> np.ndarray:
    """``f(ad_A)`` through an eigendecomposition of ``ad_A`` (diagonalizable A only)."""
    ad = build_ad(a).ad_matrix
    w, v = np.linalg.eig(ad)
    return v @ np.diag(f_scalar(w)) @ np.linalg.inv(v)


def f_matrix(m) -> np.ndarray:
    """``f(M)`` for any square ``M``, via ``phi_1(-M)`` from one block exponential."""
    m = np.array(_matrix(m), dtype=complex)
    n = m.shape[0]
    block = np.zeros((2 * n, 2 * n), dtype=complex)
    block[:n, :n] = -m
    block[:n, n:] = np.eye(n)
    return scipy.linalg.expm(block)[:n, n:]


def g_matrix(m) -> np.ndarray:
    """``g(M) = f(M)^{-1}``."""
    fm = f_matrix(m)
    _check_invertible(fm, lambda: np.linalg.eigvals(_matrix(m)))
    return np.linalg.inv(fm)


def _check_invertible(fmat, spectrum, rtol: float = SING_RTOL):
    s = np.linalg.svd(fmat, compute_uv=False)
    if s[-1] <= rtol * s[0]:
        w = np.asarray(spectrum())
        nonzero = w[np.abs(w) > 1e-12]
        k = np.round(nonzero.imag / TWO_PI) if nonzero.size else np.array([])
        mask = k != 0
        if np.any(mask):
            idx = np.argmin(np.abs(nonzero[mask] - 2j * np.pi * k[mask]))
            near = nonzero[mask][idx]
            hint = f"; eigenvalue {near:.6g} sits near the zero 2*pi*i*{int(k[mask][idx])} of f"
        else:
            hint = ""
        raise SingularCorrectionError(f"f-matrix is singular (sigma_min/sigma_max = {s[-1] / s[0]:.3g}){hint}")


def g_of_ad_apply(a, l, rtol: float = SING_RTOL) -> np.ndarray:
    """``g(ad_A)(L)``, i.e. the solution ``Y`` of ``f(ad_A)(Y) = L``."""
    a = np.array(_matrix(a), dtype=complex)
    l = np.array(_matrix(l), dtype=complex)
    if l.shape != a.shape:
        raise ValueError(f"L has shape {l.shape}, expected {a.shape}")
    fmat = f_of_ad(a)
    _check_invertible(fmat, lambda: np.linalg.eigvals(build_ad(a).ad_matrix), rtol)
    return unvec(np.linalg.solve(fmat, vec(l)), a.shape[0])


def bch_log(e, l, t: float, n: int, cut: Cut = AUTO) -> np.ndarray:
    """Primary logarithm of ``E exp((t/n) L)`` on the branch of ``log E``.

    Raises
    ------
    BranchJumpError
        If the perturbed spectrum reaches the cut or an eigenvalue of the
        logarithm moves by a full branch (the step ``t/n`` is too large).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    e = np.array(_matrix(e), dtype=complex)
    a, c = primary_log(e, cut, return_cut=True)
    if t == 0:
        return a
    step = e @ scipy.linalg.expm((t / n) * _matrix(l))
    try:
        z = primary_log(step, c)
    except NoAdmissibleCutError as exc:
        raise BranchJumpError(f"{exc}; increase n") from None
    wa = np.linalg.eigvals(a)
    wz = np.linalg.eigvals(z)
    # one-to-one matching, so a jumped eigenvalue cannot pair with a neighbour
    cost = np.abs(wa[:, None] - wz[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    drift = float(np.max(cost[rows, cols]))
    if drift >= np.pi:
        raise BranchJumpError(f"logarithm eigenvalues moved by {drift:.3g} >= pi; increase n")
    return z


def kernel_projection(e, rtol: float = KERNEL_RTOL) -> np.ndarray:
    """Projection onto ``ker E`` along ``ran E``.

    The kernel is the span of right singular vectors with singular value below
    ``rtol * sigma_max``.  The projection annihilates the range of ``E`` so it
    commutes with ``E + Q``; for normal ``E`` it is the orthogonal projection.
    """
    m = _matrix(e)
    n = m.shape[0]
    u, s, vh = np.linalg.svd(m)
    thresh = rtol * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > thresh))
    if rank == n:
        return np.zeros((n, n), dtype=complex)
    kernel = vh[rank:].conj().T
    left = u[:, rank:]
    overlap = left.conj().T @ kernel
    if np.linalg.cond(overlap) > 1e10:
        raise ArithmeticError("kernel and range of E intersect; zero is not a semisimple eigenvalue")
    return kernel @ np.linalg.solve(overlap, left.conj().T)


def effective_generator(e, l, cut: Cut = AUTO):
    """Return ``(A, L_tilde, P)`` of the pulsed-versus-continuous comparison.

    ``A = log(E + Q)``, ``P = 1 - Q`` and ``L_tilde = P g(ad_A)(L) P``, so that
    ``(E exp((t/n) P L P))^n = exp(n A + t L_tilde) P + O(1/n)``.  For
    invertible ``E``, ``Q = 0``.
    """
    e = np.array(_matrix(e), dtype=complex)
    q = kernel_projection(e)
    p = np.eye(e.shape[0]) - q
    a = primary_log(e + q, cut)
    lt = p @ g_of_ad_apply(a, _matrix(l)) @ p
    return a, lt, p


def bch_residual(e, l, t: float, n: int, cut: Cut = AUTO) -> float:
    """``||bch_log(E, L, t, n) - A - (t/n) g(ad_A)(L)||`` with ``A = log E`` (second order in ``t/n``)."""
    e = np.array(_matrix(e), dtype=complex)
    a, c = primary_log(e, cut, return_cut=True)
    z = bch_log(e, l, t, n, c)
    return float(np.linalg.norm(z - a - (t / n) * g_of_ad_apply(a, l), 2))
