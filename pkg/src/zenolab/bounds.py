"""Closed-form error bounds and dominance checks against measured quantities.

Every ``check_*`` function returns a :class:`BoundReport` pairing an analytic
bound with the quantity it bounds.  A report whose precondition fails is
returned with ``applicable = False``; such reports are not violations.
"""

from __future__ import annotations

import math
import warnings
import zlib
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg
import scipy.special

from .matfunc import (
    AUTO,
    TWO_PI,
    BranchCut,
    build_ad,
    g_matrix,
    g_of_ad_apply,
    primary_log,
    resolve_cut,
)
from .models import analytic_distance_81
from .spectral import ClusteringWarning, SpectralDecomposition, decompose, schur_split
from .superop import SuperOperator, _matrix, op_norm, spectral_radius
from .zeno import KickCycle, ZenoLimit, kicked_step, zeno_generator

__all__ = [
    "BoundReport",
    "BoundInapplicable",
    "analytic_distance_81",
    "bound_channel_norm",
    "bound_cycle_perturbation",
    "power_bound_constants",
    "tight_power_constant",
    "n0_mu_tradeoff",
    "mu_n_lhs",
    "m_log",
    "m_log_quadrature",
    "m_g",
    "m_g_quadrature",
    "perturbation_beta",
    "matfunc_perturbation_bound",
    "bch_constants",
    "bch_remainder_value",
    "bch_admissible_t",
    "bch_remainder_bound",
    "total_correction_bound",
]

HOLDS_RTOL = 1e-12
N0_MAX_EXP = 62
DEFECT_RTOL = 1e-8


class BoundInapplicable(ValueError):
    """A precondition of the requested bound fails for this input."""


@dataclass(frozen=True)
class BoundReport:
    name: str
    analytic_value: float
    measured_value: float
    holds: bool
    applicable: bool = True
    inputs: dict = field(default_factory=dict)
    note: str = ""

    @property
    def violated(self) -> bool:
        return self.applicable and not self.holds

    def to_dict(self) -> dict:
        return asdict(self)

    def row(self, seed=None) -> tuple:
        return (self.name, self.analytic_value, self.measured_value, self.holds, self.applicable, seed)


def make_report(name, analytic, measured, inputs=None, applicable=True, note="") -> BoundReport:
    analytic = float(analytic)
    measured = float(measured)
    holds = bool(measured <= analytic * (1 + HOLDS_RTOL)) if not math.isnan(measured) else False
    return BoundReport(name, analytic, measured, holds, applicable, dict(inputs or {}), note)


def _dec(x) -> SpectralDecomposition:
    return x if isinstance(x, SpectralDecomposition) else decompose(x)


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709 else math.inf


# ---------------------------------------------------------------------------
# operation norm and one-cycle perturbation


def bound_channel_norm(d: int) -> float:
    """``sqrt(d)``, the operator-norm bound of a quantum operation on ``d x d`` matrices."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return math.sqrt(d)


def check_channel_norm(e) -> BoundReport:
    e = e if isinstance(e, SuperOperator) else SuperOperator(e)
    return make_report("channel_norm", bound_channel_norm(e.dim), op_norm(e), {"d": e.dim})


def bound_cycle_perturbation(d: int, m: int, t: float, n: int, norm_l: float) -> float:
    """``d^{m/2} (t/n) ||L|| e^{(t/n) ||L||}`` bounding ``||E_n - E||``."""
    if min(d, m, t, norm_l) < 0 or n < 1:
        raise ValueError("arguments must be nonnegative and n >= 1")
    s = t / n * norm_l
    return d ** (m / 2) * s * _safe_exp(s)


def check_cycle_perturbation(cycle: KickCycle, t: float, n: int) -> BoundReport:
    norm_l = op_norm(cycle.generator)
    bound = bound_cycle_perturbation(cycle.dim, cycle.m, t, n, norm_l)
    measured = op_norm(kicked_step(cycle, t, n) - cycle.product)
    inputs = {"d": cycle.dim, "m": cycle.m, "t": t, "n": n, "norm_L": norm_l}
    return make_report("cycle_perturbation", bound, measured, inputs)


# ---------------------------------------------------------------------------
# powers of the transient part


def tight_power_constant(d: int, mu: float) -> float:
    """``K`` of ``||E'^k|| <= K k^{d^2-1} mu^k`` valid when ``r(E') <= mu``."""
    return _safe_exp(2 * math.sqrt(d) / mu + 1)


def _remark_constant(d: int, mu: float, mu0: float) -> float:
    if mu0 <= 0:
        return math.inf
    big_d = d * d - 1
    head = 2 * math.sqrt(d / (mu * mu0)) + 1
    base = 2 * big_d / (math.e * math.log(mu / mu0))
    log_k = head + big_d * math.log(base) if big_d > 0 else head
    return _safe_exp(log_k)


def power_bound_constants(e_limit, mu: float, cycle: KickCycle | None = None, t: float | None = None):
    """Return ``(K, n0_hint)`` with ``||E_n'^k|| <= K mu^k`` for ``n > n0``.

    ``K = e^{2 sqrt(d/(mu mu0)) + 1} (2 (d^2-1) / (e log(mu/mu0)))^{d^2-1}``,
    obtained from the polynomial form at the intermediate radius
    ``sqrt(mu mu0)``.  ``K`` is infinite when there is no transient spectrum
    (``mu0 = 0``); the check is then vacuous.  ``n0_hint`` is the trade-off
    ``n0`` at radius ``sqrt(mu mu0)`` when a cycle and time are supplied.
    """
    dec = _dec(e_limit)
    mu0 = dec.mu0
    if not mu0 < mu < 1:
        raise ValueError(f"mu must lie in (mu0, 1) = ({mu0:.6g}, 1), got {mu}")
    d = int(round(math.sqrt(dec.size)))
    k = _remark_constant(d, mu, mu0)
    hint = None
    if cycle is not None and t is not None and mu0 > 0:
        try:
            hint = n0_mu_tradeoff(cycle, math.sqrt(mu * mu0), t)
        except ValueError:
            hint = None
    return k, hint


def transient_part(cycle: KickCycle, t: float, n: int, zl: ZenoLimit | None = None):
    """``(E_n, P, E_n')`` with ``E_n' = E_n - P E_n P``."""
    zl = zeno_generator(cycle) if zl is None else zl
    en = kicked_step(cycle, t, n).matrix
    p = zl.peripheral_projection.matrix
    return en, p, en - p @ en @ p


def check_power_bounds(
    cycle: KickCycle, t: float, n: int, mu: float, k_max: int = 200, zl: ZenoLimit | None = None
) -> list:
    """Both power-bound forms for ``E_n' = E_n - P E_n P`` on ``k = 1..k_max``.

    The measured value of the remark form is ``max_k ||E'^k|| / mu^k`` and of
    the tight form ``max_k ||E'^k|| / (k^{d^2-1} mu^k)``; each is compared with
    its constant ``K``.
    """
    zl = zeno_generator(cycle) if zl is None else zl
    mu0 = zl.decomposition.mu0
    d = cycle.dim
    big_d = d * d - 1
    _, _, ep = transient_part(cycle, t, n, zl)
    r = spectral_radius(ep)
    ratios_remark, ratios_tight = [], []
    power = np.eye(ep.shape[0], dtype=complex)
    for k in range(1, k_max + 1):
        power = power @ ep
        norm = float(np.linalg.norm(power, 2))
        log_mu_k = k * math.log(mu)
        ratios_remark.append(norm * math.exp(-log_mu_k))
        ratios_tight.append(norm * math.exp(-log_mu_k - big_d * math.log(k)))
    mu1 = math.sqrt(mu * mu0)
    inputs = {"d": d, "n": n, "t": t, "mu": mu, "mu0": mu0, "mu1": mu1, "r_transient": r, "k_max": k_max}
    k_remark = _remark_constant(d, mu, mu0)
    k_tight = tight_power_constant(d, mu)
    remark_ok = mu0 > 0 and r <= mu1
    note = "" if remark_ok else ("no transient spectrum" if mu0 <= 0 else "r(E_n') exceeds sqrt(mu mu0), n below n0")
    out = [
        make_report("power_K_remark", k_remark, max(ratios_remark), {**inputs, "K": k_remark}, remark_ok, note),
        make_report(
            "power_K_tight", k_tight, max(ratios_tight), {**inputs, "K": k_tight}, r <= mu,
            "" if r <= mu else "r(E_n') exceeds mu",
        ),
    ]
    return out


# ---------------------------------------------------------------------------
# n0 versus mu trade-off


def mu_n_lhs(cycle: KickCycle, n: int, t: float, zl: ZenoLimit | None = None) -> float:
    """Left side of the ``n0``-``mu`` trade-off evaluated at ``n0 = n``.

    ``mu0 + ((1+d) d^{m/2+2} (t/n) ||L|| e^{(t/n)||L||})^{1/d^2} (1 + ||N_n||)``
    with ``N_n`` the strictly upper Schur part of
    ``Theta_n = (E_n - E) - P (E_n - E) P``.
    """
    zl = zeno_generator(cycle) if zl is None else zl
    d, m = cycle.dim, cycle.m
    mu0 = zl.decomposition.mu0
    if t == 0:
        return mu0
    diff = kicked_step(cycle, t, n).matrix - cycle.product.matrix
    p = zl.peripheral_projection.matrix
    theta = diff - p @ diff @ p
    _, nil, _ = schur_split(theta)
    s = t / n * op_norm(cycle.generator)
    inner = (1 + d) * d ** (m / 2 + 2) * s * _safe_exp(s)
    return mu0 + inner ** (1 / d**2) * (1 + float(np.linalg.norm(nil, 2)))


def n0_mu_tradeoff(cycle: KickCycle, mu: float, t: float, zl: ZenoLimit | None = None) -> int:
    """Smallest ``n0`` with ``mu_n_lhs(n0) <= mu``.

    ``||N_n||`` depends on the candidate itself, so it is re-evaluated at
    every candidate.  The search doubles ``n`` until the inequality holds and
    then bisects, assuming the left side decreases in ``n``.

    Raises
    ------
    ValueError
        If ``mu`` is outside ``(mu0, 1)`` or no ``n0 <= 2**62`` works.
    """
    zl = zeno_generator(cycle) if zl is None else zl
    mu0 = zl.decomposition.mu0
    if not mu0 < mu < 1:
        raise ValueError(f"mu must lie in (mu0, 1) = ({mu0:.6g}, 1), got {mu}")
    if t < 0:
        raise ValueError("t must be >= 0")

    def ok(n):
        return mu_n_lhs(cycle, n, t, zl) <= mu

    if ok(1):
        return 1
    lo = 1
    for e in range(1, N0_MAX_EXP + 1):
        hi = 2**e
        if ok(hi):
            break
        lo = hi
    else:
        raise ValueError(f"no n0 <= 2**{N0_MAX_EXP} satisfies the trade-off at mu = {mu}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# contour constants


def m_log(x, radius: float, cut: BranchCut) -> float:
    """Closed-form ``M`` for the logarithm on ``cut``.

    ``(r+R) (1 + sqrt(log^2(r+R) + max(phi^2, (phi+2 pi)^2)))`` with ``r`` the
    spectral radius of ``x`` and ``phi`` the cut angle in ``(-2 pi, 0]``.
    """
    rho = spectral_radius(x) + radius
    phi = cut.angle
    return rho * (1 + math.sqrt(math.log(rho) ** 2 + max(phi**2, (phi + TWO_PI) ** 2)))


def m_log_quadrature(x, radius: float, cut: BranchCut, nodes: int = 4096) -> float:
    """``(1/2 pi) * contour integral of |log z| |dz|`` on the keyhole contour.

    The circle of radius ``r+R`` is integrated numerically; the two edges of
    the cut contribute exactly ``r+R`` because the jump of ``log`` across the
    cut is ``2 pi i``.
    """
    rho = spectral_radius(x) + radius
    theta = cut.angle + TWO_PI * (np.arange(nodes) + 0.5) / nodes
    integrand = np.sqrt(math.log(rho) ** 2 + theta**2)
    return rho + rho * float(np.mean(integrand))


def _g_abs(z):
    z = np.asarray(z, dtype=complex)
    den = np.abs(-np.expm1(-z))
    return np.abs(z) / den


def _g_strip(x):
    w = np.linalg.eigvals(_matrix(x))
    delta = TWO_PI - float(np.max(np.abs(w.imag)))
    return spectral_radius(x), delta


def m_g(x, radius: float) -> float:
    """Closed-form ``M`` for ``g(z) = z / (1 - e^{-z})`` on the rectangle.

    The rectangle has vertical sides at ``+-(r+R)`` and horizontal sides at
    ``+-(2 pi - delta + R)``, ``delta = 2 pi - max|Im x_k|``.
    """
    r, delta = _g_strip(x)
    if not 0 < radius < delta:
        raise BoundInapplicable(f"R = {radius} must lie in (0, delta = {delta:.6g})")
    rho = r + radius
    height = TWO_PI - delta + radius
    a = delta - radius
    c = math.cos(a)
    den = abs(math.sin(a)) if c > 0 else 1.0 if c < 0 else 0.0
    tail = rho / den if den > 0 else math.inf
    return (2 / math.pi) * math.hypot(rho, height) * (height / 2 / math.tanh(rho / 2) + tail)


def m_g_quadrature(x, radius: float, nodes: int = 4096) -> float:
    """``(1/2 pi) * contour integral of |g(z)| |dz|`` on the same rectangle (midpoint rule)."""
    r, delta = _g_strip(x)
    rho = r + radius
    height = TWO_PI - delta + radius
    u = (np.arange(nodes) + 0.5) / nodes
    xs = -rho + 2 * rho * u
    ys = -height + 2 * height * u
    horizontal = np.mean(_g_abs(xs + 1j * height) + _g_abs(xs - 1j * height)) * 2 * rho
    vertical = np.mean(_g_abs(rho + 1j * ys) + _g_abs(-rho + 1j * ys)) * 2 * height
    return float(horizontal + vertical) / TWO_PI


# ---------------------------------------------------------------------------
# perturbation of a matrix function


def perturbation_beta(dim: int, p_norm: float, n_norm: float, radius: float) -> float:
    """``(D P / R) (1 - (N/R)^D) / (1 - N/R)`` (the ratio tends to ``D`` at ``N = R``)."""
    q = n_norm / radius
    ratio = dim if abs(1 - q) < 1e-12 else (1 - q**dim) / (1 - q)
    return dim * p_norm / radius * ratio


def _projection_norms(dec: SpectralDecomposition) -> tuple[float, float]:
    p = max(float(np.linalg.norm(c.projection, 2)) for c in dec.clusters)
    nrm = max(c.nilpotent_norm for c in dec.clusters)
    return p, nrm


def matfunc_perturbation_bound(x, y, h: str = "log", radius: float | None = None, cut=AUTO, quadrature=False) -> BoundReport:
    """Bound ``||h(X+Y) - h(X)|| <= M beta^2 ||Y|| / (1 - beta ||Y||)``.

    Parameters
    ----------
    h : {"log", "g"}
        Primary logarithm on ``cut`` or ``g(z) = z / (1 - e^{-z})`` on the
        strip ``|Im z| < 2 pi``.
    radius : float, optional
        Contour clearance ``R``; defaults to half the distance from the
        spectrum to the singular set of ``h``.
    quadrature : bool
        Evaluate ``M`` by quadrature instead of the closed form.

    The report is inapplicable when ``beta ||Y|| >= 1``.
    """
    x = np.array(_matrix(x), dtype=complex)
    y = np.array(_matrix(y), dtype=complex)
    dim = x.shape[0]
    dec = decompose(x)
    p_norm, n_norm = _projection_norms(dec)
    w = np.linalg.eigvals(x)
    y_norm = float(np.linalg.norm(y, 2))
    if h == "log":
        c = resolve_cut(x, cut)
        delta = c.clearance(w)
        radius = 0.5 * delta if radius is None else radius
        mval = m_log_quadrature(x, radius, c) if quadrature else m_log(x, radius, c)
        extra = {"cut": c.angle}
    elif h == "g":
        _, delta = _g_strip(x)
        if delta <= 0:
            raise BoundInapplicable("spectrum leaves the strip |Im z| < 2 pi")
        radius = 0.5 * delta if radius is None else radius
        mval = m_g_quadrature(x, radius) if quadrature else m_g(x, radius)
        extra = {}
    else:
        raise ValueError(f"h must be 'log' or 'g', got {h!r}")
    if not 0 < radius < delta:
        raise BoundInapplicable(f"R = {radius} must lie in (0, delta = {delta:.6g})")
    beta = perturbation_beta(dim, p_norm, n_norm, radius)
    inputs = {"D": dim, "P": p_norm, "N": n_norm, "R": radius, "delta": delta, "M": mval,
              "beta": beta, "norm_Y": y_norm, **extra}
    name = f"matfunc_{h}"
    if beta * y_norm >= 1:
        return make_report(name, math.inf, math.nan, inputs, False, "beta ||Y|| >= 1")
    bound = mval * beta**2 * y_norm / (1 - beta * y_norm)
    if h == "log":
        measured = np.linalg.norm(primary_log(x + y, c) - primary_log(x, c), 2)
    else:
        measured = np.linalg.norm(g_matrix(x + y) - g_matrix(x), 2)
    return make_report(name, bound, measured, inputs)


# ---------------------------------------------------------------------------
# remainder of the first-order BCH formula


def _eigenbasis(dec: SpectralDecomposition) -> np.ndarray:
    cols = []
    for c in dec.clusters:
        u, s, _ = np.linalg.svd(c.projection)
        cols.append(u[:, : c.multiplicity])
    return np.hstack(cols)


def bch_constants(x, radius: float | None = None) -> dict:
    """Constants of the BCH remainder bound for diagonalizable ``X``.

    Returns a dict with ``D``, ``chi`` (condition number of an eigenbasis),
    ``alpha = max Re x_k``, the gaps ``delta1`` (distance of ``e^{x_k}`` from
    the cut) and ``delta2 = 2 pi - max Im(x_k - x_l)``, ``R``, the strip
    angle ``phi``, ``M_log``, ``M_g`` and ``M = max(M_log, M_g)``.

    Raises
    ------
    BoundInapplicable
        If ``X`` is defective, its spectrum spans a strip of height ``>= 2 pi``,
        or ``R`` is not below both gaps.
    """
    x = np.array(_matrix(x), dtype=complex)
    dim = x.shape[0]
    dec = decompose(x)
    scale = max(float(np.linalg.norm(x, 2)), 1.0)
    if max(c.nilpotent_norm for c in dec.clusters) > DEFECT_RTOL * scale:
        raise BoundInapplicable("X is not diagonalizable; only the diagonalizable branch is evaluated")
    v = _eigenbasis(dec)
    chi = float(np.linalg.cond(v))
    w = np.linalg.eigvals(x)
    spread = float(np.max(w.imag) - np.min(w.imag))
    if spread >= TWO_PI:
        raise BoundInapplicable("spectrum of X does not fit in a strip of height 2 pi")
    phi = (float(np.max(w.imag)) + float(np.min(w.imag))) / 2 - np.pi
    cut = BranchCut(phi)
    ew = np.exp(w)
    delta1 = cut.clearance(ew)
    delta2 = TWO_PI - spread
    radius = 0.5 * min(delta1, delta2) if radius is None else radius
    if not 0 < radius < min(delta1, delta2):
        raise BoundInapplicable(f"R = {radius} must be below delta1 = {delta1:.6g} and delta2 = {delta2:.6g}")
    ad = build_ad(x).ad_matrix
    ml = m_log(scipy.linalg.expm(x), radius, cut)
    mg = m_g(ad, radius)
    return {
        "D": dim, "chi": chi, "alpha": float(np.max(w.real)), "delta1": delta1, "delta2": delta2,
        "R": radius, "phi": phi, "M_log": ml, "M_g": mg, "M": max(ml, mg),
    }


def _bch_factor(c: dict) -> float:
    dim, m, r2, ea = c["D"], c["M"], 2 * c["R"], math.exp(c["alpha"])
    return (1 + 8 * m * dim**4 / r2**2) * (2 * dim**2 * ea / r2)


def bch_remainder_value(c: dict, t: float, y_norm: float) -> float:
    """Evaluate the remainder bound for constants ``c`` from :func:`bch_constants`.

    The diagonalizable form uses the full clearance, so every explicit ``R``
    of the general bound is ``2R`` here while ``M`` keeps its contour at ``R``.
    """
    dim, m, chi, r2, ea = c["D"], c["M"], c["chi"], 2 * c["R"], math.exp(c["alpha"])
    s = t * chi * y_norm
    grow = _safe_exp(s)
    den = 1 - _bch_factor(c) * s * grow
    if den <= 0:
        raise BoundInapplicable("t is too large for the denominator condition")
    num = 32 * m**2 * dim**9 * ea / r2**4 * t**2 * chi**3 * y_norm**2 * grow
    return num / den


def bch_admissible_t(x, y, radius: float | None = None, constants: dict | None = None) -> float:
    """Largest ``t`` allowed by the denominator condition (``inf`` for ``Y = 0``)."""
    c = bch_constants(x, radius) if constants is None else constants
    y_norm = float(np.linalg.norm(_matrix(y), 2))
    if y_norm == 0:
        return math.inf
    s = float(scipy.special.lambertw(1 / _bch_factor(c)).real)
    return s / (c["chi"] * y_norm)


def bch_remainder_bound(x, y, t: float, radius: float | None = None) -> BoundReport:
    """Bound ``||log(e^X e^{tY}) - X - t g(ad_X)(Y)||`` for diagonalizable ``X``.

    The logarithm is taken on the branch whose strip is centred on the
    imaginary parts of the spectrum of ``X``, so that ``log e^X = X``.

    Raises
    ------
    BoundInapplicable
        Defective ``X`` or violated denominator condition.
    """
    x = np.array(_matrix(x), dtype=complex)
    y = np.array(_matrix(y), dtype=complex)
    if t < 0:
        raise ValueError("t must be >= 0")
    c = bch_constants(x, radius)
    y_norm = float(np.linalg.norm(y, 2))
    bound = bch_remainder_value(c, t, y_norm)
    cut = BranchCut(c["phi"])
    shift = 2j * np.pi * round((c["phi"] - cut.angle) / TWO_PI)
    ex = scipy.linalg.expm(x)
    z = primary_log(ex @ scipy.linalg.expm(t * y), cut) + shift * np.eye(x.shape[0])
    w = z - x - t * g_of_ad_apply(x, y)
    inputs = {**c, "t": t, "norm_Y": y_norm}
    return make_report("bch_remainder", bound, float(np.linalg.norm(w, 2)), inputs)


# ---------------------------------------------------------------------------
# total correction to the projected power


def total_correction_bound(m: float, k: float, mu: float, c_n: float, n: int) -> float:
    """``M [(1 + K C_n/(1-mu))^2 exp(M K n C_n^2/(1-mu)) - 1] + K mu^n`` (``inf`` on overflow)."""
    if not 0 <= mu < 1:
        raise ValueError("mu must lie in [0, 1)")
    if min(m, k, c_n) < 0 or n < 0:
        raise ValueError("constants must be nonnegative")
    if math.isinf(k):
        return math.inf
    a = 1 + k * c_n / (1 - mu)
    e = m * k * n * c_n**2 / (1 - mu)
    with np.errstate(over="ignore"):
        val = m * (a * a * _safe_exp(e) - 1) + k * mu**n
    return float(val) if np.isfinite(val) else math.inf


def check_total_correction(cycle: KickCycle, t: float, n: int, mu: float, zl: ZenoLimit | None = None) -> BoundReport:
    """Compare the total correction bound with ``||E_n^n - (P E_n P)^n||``.

    Uses ``M = sqrt(d)`` and the remark-form ``K``; inapplicable unless
    ``r(E_n') <= sqrt(mu mu0)``.
    """
    zl = zeno_generator(cycle) if zl is None else zl
    mu0 = zl.decomposition.mu0
    d = cycle.dim
    en, p, ep = transient_part(cycle, t, n, zl)
    c_n = max(float(np.linalg.norm(ep @ p, 2)), float(np.linalg.norm(p @ ep, 2)))
    m = bound_channel_norm(d)
    k = _remark_constant(d, mu, mu0)
    r = spectral_radius(ep)
    applicable = mu0 > 0 and r <= math.sqrt(mu * mu0)
    bound = total_correction_bound(m, k, mu, c_n, n)
    pep = p @ en @ p
    measured = np.linalg.norm(np.linalg.matrix_power(en, n) - np.linalg.matrix_power(pep, n), 2)
    inputs = {"d": d, "n": n, "t": t, "M": m, "K": k, "mu": mu, "mu0": mu0, "C_n": c_n, "r_transient": r}
    note = "" if applicable else "power bound not established at this n"
    return make_report("total_correction", bound, measured, inputs, applicable, note)


# ---------------------------------------------------------------------------
# dominance sweep over built-in models and random instances


def _inapplicable(name, note, inputs=None) -> BoundReport:
    return make_report(name, math.inf, math.nan, inputs or {}, False, note)


def _log_argument(cycle: KickCycle, zl: ZenoLimit) -> np.ndarray:
    """``log`` of the cycle product when invertible, else of its peripheral extension."""
    e = cycle.product.matrix
    try:
        return primary_log(e)
    except ArithmeticError:
        ext = zl.peripheral_part.matrix + np.eye(e.shape[0]) - zl.peripheral_projection.matrix
        return primary_log(ext)


def _perturbation(shape, rng, norm) -> np.ndarray:
    y = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return y * (norm / np.linalg.norm(y, 2))


def _matfunc_reports(x, h, rng) -> list:
    out = []
    y = _perturbation(x.shape, rng, 0.01)
    try:
        rep = matfunc_perturbation_bound(x, y, h)
    except ArithmeticError as exc:
        return [_inapplicable(f"matfunc_{h}", str(exc))]
    except BoundInapplicable as exc:
        return [_inapplicable(f"matfunc_{h}", str(exc))]
    out.append(rep)
    if not rep.applicable:
        # retry inside the domain of the bound
        y = y * (0.5 / (rep.inputs["beta"] * 0.01))
        out.append(matfunc_perturbation_bound(x, y, h))
    return out


def instance_reports(cycle: KickCycle, t: float = 1.0, seed=0, ns=(16, 64, 256), n_total: int = 64) -> list:
    """All dominance checks for one kick cycle at time ``t``."""
    rng = np.random.default_rng(seed)
    zl = zeno_generator(cycle)
    mu0 = zl.decomposition.mu0
    mu = (1 + mu0) / 2 if mu0 > 0 else 0.5
    out = [check_channel_norm(k) for k in cycle.kicks]
    out.append(check_channel_norm(cycle.product))
    out.append(check_channel_norm(kicked_step(cycle, t, ns[0])))
    out += [check_cycle_perturbation(cycle, t, n) for n in ns]
    for n in ns:
        out += check_power_bounds(cycle, t, n, mu, zl=zl)
    out.append(check_total_correction(cycle, t, n_total, mu, zl))

    try:
        n0 = n0_mu_tradeoff(cycle, mu, t, zl)
        for n in (n0, 2 * n0):
            _, _, ep = transient_part(cycle, t, n, zl)
            out.append(make_report("n0_tradeoff", mu, spectral_radius(ep), {"n0": n0, "n": n, "mu": mu, "mu0": mu0}))
    except ValueError as exc:
        out.append(_inapplicable("n0_tradeoff", str(exc)))

    try:
        out += _matfunc_reports(cycle.product.matrix, "log", rng)
    except BoundInapplicable as exc:
        out.append(_inapplicable("matfunc_log", str(exc)))
    a = _log_argument(cycle, zl)
    out += _matfunc_reports(build_ad(a).ad_matrix, "g", rng)

    y = cycle.generator.matrix
    try:
        c = bch_constants(a)
        t_bch = 0.5 * bch_admissible_t(a, y, constants=c)
        t_bch = min(t_bch, 1.0)
        out.append(bch_remainder_bound(a, y, t_bch))
    except BoundInapplicable as exc:
        out.append(_inapplicable("bch_remainder", str(exc)))
    return out


def builtin_instances() -> list:
    """``(label, cycle)`` pairs for the built-in models at default parameters."""
    from .models import build

    out = [(mid, build(mid).cycle) for mid in ("weak_meas_81", "cptp_kick_82", "cycle_83")]
    for variant in ("selective", "nonselective"):
        out.append((f"multi_proj_84:{variant}", build("multi_proj_84", variant=variant).cycle))
    return out


def dominance_suite(seeds=range(50), include_models: bool = True, t: float = 1.0, workers=None) -> list:
    """Run :func:`instance_reports` on models and random cycles.

    Returns a list of ``(label, BoundReport)``; random instances are labelled
    by their seed.
    """
    from .sampling import random_cycle
    from .zeno import _pmap

    jobs = list(builtin_instances()) if include_models else []
    jobs += [(int(s), None) for s in seeds]

    def run(job):
        label, cycle = job
        cycle = random_cycle(label) if cycle is None else cycle
        return [(label, r) for r in instance_reports(cycle, t, seed=zlib.crc32(str(label).encode()))]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClusteringWarning)
        chunks = _pmap(run, jobs, workers)
    return [item for chunk in chunks for item in chunk]
