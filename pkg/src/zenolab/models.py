"""Builders for the worked examples: weak measurements on a qubit, CPTP kicks and
kick cycles on a qutrit, alternating projective measurements, and the
measurement-time efficiency scan.

All parameters are dimensionless products with the total evolution time,
``t = 1`` (``omega_t`` is Omega t, ``gamma_t`` is Gamma t, ...).  Basis order is
``|0>, |1>, |2>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .superop import (
    GklsGenerator,
    KrausSet,
    SuperOperator,
    commutator_map,
    gkls_to_superop,
    kraus_to_superop,
    sandwich,
    trace_map,
)
from .zeno import KickCycle

MODEL_IDS = ("weak_meas_81", "cptp_kick_82", "cycle_83", "multi_proj_84", "efficiency_85")

DEFAULTS = {
    "weak_meas_81": {"p": 0.5, "omega_t": 1.0},
    "cptp_kick_82": {"q": 0.3, "gamma_t": 2.0, "omega0_t": 0.0, "omega1_t": 1.0, "omega2_t": 2.0},
    "cycle_83": {"q": 0.3, "gamma_t": 2.0, "omega0_t": 0.0, "omega1_t": 1.0, "omega2_t": 2.0},
    "multi_proj_84": {"g_t": 1.0, "gamma_t": 2.0, "variant": "selective"},
    "efficiency_85": {"p_model": "a", "omega_t": 1.0, "T": 1.0},
}

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def ket(i: int, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1
    return v


def outer(i: int, j: int, d: int = 3) -> np.ndarray:
    """``|i><j|`` in dimension ``d``."""
    return np.outer(ket(i, d), ket(j, d).conj())


def _embed(a2: np.ndarray) -> np.ndarray:
    """Qubit operator on span{|0>, |1>} inside the qutrit."""
    out = np.zeros((3, 3), dtype=complex)
    out[:2, :2] = a2
    return out


QUTRIT_P = _embed(np.eye(2))
QUTRIT_X = _embed(PAULI_X)
QUTRIT_Y = _embed(PAULI_Y)
QUTRIT_Z = _embed(PAULI_Z)


@dataclass(frozen=True)
class ModelSpec:
    id: str
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.id not in MODEL_IDS:
            raise ValueError(f"unknown model {self.id!r}; choose from {', '.join(MODEL_IDS)}")
        unknown = set(self.parameters) - set(DEFAULTS[self.id])
        if unknown:
            raise ValueError(f"unknown parameters for {self.id}: {sorted(unknown)}")
        problems = validate_parameters(self.id, self.resolved)
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def resolved(self) -> dict:
        return {**DEFAULTS[self.id], **self.parameters}


def validate_parameters(model_id: str, params: dict) -> list[str]:
    """Range diagnostics for model parameters (empty list when valid)."""
    out = []
    for key, value in params.items():
        if key in ("variant", "p_model"):
            continue
        if not isinstance(value, (int, float)) or not np.isfinite(value):
            out.append(f"{key} must be a finite number")
    if out:
        return out
    if "p" in params and not 0 <= params["p"] <= 1:
        out.append("p must lie in [0, 1]")
    if "q" in params and not 0 <= params["q"] < 1:
        out.append("q must lie in [0, 1): only q < 1 is treated (q = 1 decouples |2> from the kick)")
    for key in ("gamma_t", "g_t", "T"):
        if key in params and params[key] < 0:
            out.append(f"{key} must be >= 0")
    if params.get("T", 1.0) == 0:
        out.append("T must be positive")
    if model_id == "multi_proj_84" and params.get("variant") not in ("selective", "nonselective"):
        out.append("variant must be 'selective' or 'nonselective'")
    if model_id == "efficiency_85" and params.get("p_model") not in P_MODELS:
        out.append("p_model must be one of 'a', 'b', 'c'")
    return out


@dataclass(frozen=True, eq=False)
class BuiltModel:
    spec: ModelSpec
    cycle: KickCycle
    t: float = 1.0
    references: dict = field(default_factory=dict)


# -- weak measurement on a qubit ------------------------------------------------


def weak_measurement_projection() -> SuperOperator:
    """Nonselective measurement of X: ``(1 + X . X) / 2``."""
    return (SuperOperator.identity(2) + sandwich(PAULI_X)) * 0.5


def weak_measurement_eigenvalues(p: float, angle: float) -> np.ndarray:
    """Eigenvalues ``[1, 1-p, lambda_-+, lambda_--]`` of ``E exp(-i angle ad_Z / 2)``.

    ``angle`` is ``Omega t / n``.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    r = 2 / p - 1
    eta = np.sqrt(complex(1 - r**2 * np.sin(angle) ** 2))
    base = (1 - p / 2) * np.cos(angle)
    return np.array([1.0, 1 - p, base + p / 2 * eta, base - p / 2 * eta], dtype=complex)


def _weak_meas(params) -> tuple[KickCycle, dict]:
    p, w = params["p"], params["omega_t"]
    proj = weak_measurement_projection()
    kick = SuperOperator.identity(2) * (1 - p) + proj * p
    gen = commutator_map(0.5 * w * PAULI_Z) * (-1j)
    refs = {
        "projection": proj,
        "lz": SuperOperator.zero(2),
        "eigenvalues": lambda n: weak_measurement_eigenvalues(p, w / n),
    }
    return KickCycle((kick,), gen), refs


# -- qutrit kicks -----------------------------------------------------------------


def _qutrit_generator(params) -> SuperOperator:
    k = np.diag([params["omega0_t"], params["omega1_t"], params["omega2_t"]]).astype(complex)
    jump = np.sqrt(params["gamma_t"]) * np.diag([0, 1, 1]).astype(complex)
    return gkls_to_superop(GklsGenerator(k, (jump,)))


def _decay_kraus(q: float) -> np.ndarray:
    return np.sqrt(1 - q) * outer(0, 2)


def qutrit_kick_kraus(q: float) -> KrausSet:
    k0 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, np.sqrt(q)]], dtype=complex)
    return KrausSet((k0, _decay_kraus(q)))


def qutrit_cycle_kraus(q: float) -> tuple[KrausSet, KrausSet]:
    k1 = np.diag([1, -1, np.sqrt(q)]).astype(complex)
    k2 = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, np.sqrt(q)]], dtype=complex)
    return KrausSet((k1, _decay_kraus(q))), KrausSet((k2, _decay_kraus(q)))


def flip_oscillation_lz(gamma_t: float) -> SuperOperator:
    """``-(Gamma/2) (|0><0| . |1><1| + |1><1| . |0><0|)``."""
    s = sandwich(outer(0, 0), outer(1, 1)) + sandwich(outer(1, 1), outer(0, 0))
    return s * (-0.5 * gamma_t)


def _qutrit_references(c: float) -> dict:
    # P_phi = P.P + (P - c Z)/2 <2|.|2>,  E_phi = X.X + (P + c Z)/2 <2|.|2>
    two = outer(2, 2)
    p_phi = sandwich(QUTRIT_P) + trace_map(0.5 * (QUTRIT_P - c * QUTRIT_Z), two)
    e_phi = sandwich(QUTRIT_X) + trace_map(0.5 * (QUTRIT_P + c * QUTRIT_Z), two)
    p0 = (trace_map(QUTRIT_P, QUTRIT_P) + trace_map(QUTRIT_X, QUTRIT_X)) * 0.5
    p1 = (trace_map(QUTRIT_Y, QUTRIT_Y) + trace_map(QUTRIT_Z, QUTRIT_Z) - trace_map(c * QUTRIT_Z, two)) * 0.5
    unitary = QUTRIT_X + two
    return {"p_phi": p_phi, "e_phi": e_phi, "p0": p0, "p1": p1, "u_inf": sandwich(unitary)}


def _qutrit_kick(params) -> tuple[KickCycle, dict]:
    q = params["q"]
    kick = kraus_to_superop(qutrit_kick_kraus(q))
    refs = _qutrit_references((1 - q) / (1 + q))
    refs["lz"] = flip_oscillation_lz(params["gamma_t"])
    return KickCycle((kick,), _qutrit_generator(params)), refs


def _qutrit_cycle(params) -> tuple[KickCycle, dict]:
    q = params["q"]
    e1, e2 = (kraus_to_superop(k) for k in qutrit_cycle_kraus(q))
    # the decayed |2> population is fed with the opposite sign of Z here
    refs = _qutrit_references(-((1 - q) ** 2) / (1 + q**2))
    refs["e_phi_inv"] = refs["e_phi"]
    refs["lz"] = flip_oscillation_lz(params["gamma_t"])
    return KickCycle((e1, e2), _qutrit_generator(params)), refs


# -- alternating projective measurements ------------------------------------------

HILBERT_P1 = np.diag([0, 1, 1]).astype(complex)
HILBERT_P2 = np.array([[0.5, 0.5, 0], [0.5, 0.5, 0], [0, 0, 1]], dtype=complex)


def _multi_proj(params) -> tuple[KickCycle, dict]:
    g, gamma = params["g_t"], params["gamma_t"]
    h = g * (outer(0, 1) + outer(1, 0) + outer(1, 2) + outer(2, 1))
    gen = gkls_to_superop(GklsGenerator(h, (np.sqrt(gamma) * outer(1, 2),)))
    eye = np.eye(3)
    two = outer(2, 2)
    selective = [sandwich(HILBERT_P1), sandwich(HILBERT_P2)]
    nonselective = [sandwich(p) + sandwich(eye - p) for p in (HILBERT_P1, HILBERT_P2)]
    refs = {
        "hilbert_p1": HILBERT_P1,
        "hilbert_p2": HILBERT_P2,
        "hilbert_product": np.array([[0, 0.5, 0], [0, 0.5, 0], [0, 0, 1]], dtype=complex),
        "hilbert_p_phi": two,
        "hamiltonian": h,
        "selective_kicks": selective,
        "nonselective_kicks": nonselective,
        "selective_p_phi": sandwich(two),
        "selective_lz": sandwich(two) * (-gamma),
        "nonselective_p_phi": trace_map(0.5 * QUTRIT_P, QUTRIT_P) + sandwich(two),
        "nonselective_lz": trace_map(-gamma * (two - 0.5 * QUTRIT_P), two),
    }
    variant = params["variant"]
    kicks = selective if variant == "selective" else nonselective
    refs["p_phi"] = refs[f"{variant}_p_phi"]
    refs["lz"] = refs[f"{variant}_lz"]
    return KickCycle(tuple(kicks), gen), refs


def _efficiency(params) -> tuple[KickCycle, dict]:
    # the efficiency model shares the qubit cycle; p is set at the largest tau
    tau_max = 5.0 if params["p_model"] == "a" else 1.0
    p = float(p_of_tau(params["p_model"], tau_max, params["T"]))
    cycle, refs = _weak_meas({"p": p, "omega_t": params["omega_t"]})
    return cycle, refs


BUILDERS = {
    "weak_meas_81": _weak_meas,
    "cptp_kick_82": _qutrit_kick,
    "cycle_83": _qutrit_cycle,
    "multi_proj_84": _multi_proj,
    "efficiency_85": _efficiency,
}


def build(spec: ModelSpec | str, **parameters) -> BuiltModel:
    """Kick cycle plus analytic reference objects for a model.

    ``build("cptp_kick_82", q=0.3)`` is shorthand for
    ``build(ModelSpec("cptp_kick_82", {"q": 0.3}))``.
    """
    if isinstance(spec, str):
        spec = ModelSpec(spec, parameters)
    elif parameters:
        spec = ModelSpec(spec.id, {**spec.parameters, **parameters})
    cycle, refs = BUILDERS[spec.id](spec.resolved)
    return BuiltModel(spec=spec, cycle=cycle, t=1.0, references=refs)


# -- measurement-time efficiency --------------------------------------------------

P_MODELS = {
    "a": lambda x: -np.expm1(-x),
    "b": lambda x: np.sin(np.pi * x / 2),
    "c": lambda x: np.sin(np.pi * x / 2) ** 2,
}
TAU_RANGE = {"a": (0.01, 5.0), "b": (0.01, 1.0), "c": (0.01, 1.0)}


def p_of_tau(model: str, tau, T: float = 1.0):
    """Measurement strength after time ``tau``: a ``1 - e^{-tau/T}``,
    b ``sin(pi tau / 2T)``, c ``sin^2(pi tau / 2T)``."""
    if model not in P_MODELS:
        raise ValueError(f"unknown p(tau) model {model!r}")
    return P_MODELS[model](np.asarray(tau, dtype=float) / T)


def analytic_distance_81(p, omega_t, n):
    """Leading ``1/n`` term of the weak-measurement distance to the Zeno limit.

    ``(w / 2n) (2/p - 1) (sqrt(w^2/4 + 1) + sqrt(w^2/4 + (2/p - 1)^{-2}))`` with
    ``w = Omega t``.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0) or np.any(p > 1):
        raise ValueError("p must lie in (0, 1]")
    if np.any(np.asarray(n) < 1) or np.any(np.asarray(omega_t) < 0):
        raise ValueError("need n >= 1 and omega_t >= 0")
    r = 2 / p - 1
    w = np.asarray(omega_t, dtype=float)
    w2 = w**2 / 4
    return w / (2 * np.asarray(n, dtype=float)) * r * (np.sqrt(w2 + 1) + np.sqrt(w2 + r**-2))


@dataclass(frozen=True, eq=False)
class EfficiencyResult:
    model: str
    tau: np.ndarray
    n: np.ndarray
    distance: np.ndarray  # shape (len(n), len(tau))
    target: float
    tau_opt: float
    n_opt: int
    total_time_opt: float
    feasible: np.ndarray  # smallest feasible n per tau (0 when none)
    at_feasible_edge: bool
    degenerate: bool
    projective_total_time: float

    @property
    def tau_max(self) -> float:
        return float(self.tau[-1])

    @property
    def interior(self) -> bool:
        return 0 < self.tau_opt < self.tau_max

    @property
    def nonprojective_wins(self) -> bool:
        """The optimum beats measuring until the strength is (nearly) maximal."""
        return self.total_time_opt < self.projective_total_time

    def surface_rows(self):
        for i, nn in enumerate(self.n):
            for j, tt in enumerate(self.tau):
                yield int(nn), float(tt), float(self.distance[i, j]), float(nn * tt)


def efficiency_scan(
    model: str,
    omega_t: float = 1.0,
    T: float = 1.0,
    target: float = 0.01,
    n_points: int = 200,
    tau_points: int = 200,
    n_max: float = 1e4,
    tau_range: tuple | None = None,
) -> EfficiencyResult:
    """Total measurement time ``n tau`` needed to reach ``target`` versus ``tau``.

    ``n`` runs over ``n_points`` log-spaced integers in ``[1, n_max]`` (repeats
    from rounding are dropped) and ``tau`` over ``tau_points`` linear points.
    For each ``tau`` the smallest grid ``n`` with distance <= target is taken;
    ``tau_opt`` minimizes ``n tau`` over the feasible ``tau``.

    Raises
    ------
    ValueError
        If no grid cell reaches the target.
    """
    lo, hi = TAU_RANGE[model] if tau_range is None else tau_range
    tau = np.linspace(lo, hi, tau_points) * T
    n = np.unique(np.round(np.logspace(0, np.log10(n_max), n_points)).astype(np.int64))
    p = np.clip(p_of_tau(model, tau, T), np.finfo(float).tiny, 1.0)
    dist = analytic_distance_81(p[None, :], omega_t, n[:, None])
    degenerate = not np.isfinite(target)
    ok = dist <= target
    first = np.where(ok.any(axis=0), n[np.argmax(ok, axis=0)], 0)
    feasible = first > 0
    if not feasible.any():
        raise ValueError(f"no grid point reaches distance {target}")
    total = np.where(feasible, first * tau, np.inf)
    k = int(np.argmin(total))
    edge = k == int(np.argmax(feasible)) and k > 0
    last = int(np.nonzero(feasible)[0][-1])
    return EfficiencyResult(
        model=model,
        tau=tau,
        n=n,
        distance=dist,
        target=float(target),
        tau_opt=float(tau[k]),
        n_opt=int(first[k]),
        total_time_opt=float(total[k]),
        feasible=first,
        at_feasible_edge=bool(edge),
        degenerate=degenerate,
        projective_total_time=float(total[last]),
    )
