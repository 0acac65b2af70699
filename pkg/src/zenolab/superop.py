"""Superoperator algebra on the Hilbert-Schmidt space of a d-level system.

Operators are vectorized by stacking columns, so that
``vec(A X B) == kron(B.T, A) @ vec(X)``.  Every :class:`SuperOperator`
carries this convention as a tag and refuses to combine with anything else.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

CONVENTION = "column-stacking"

#: Largest ``||t L||`` accepted by :func:`superop_exp`.
EXP_NORM_CAP = 1e4

HERMITIAN_RTOL = 1e-12
TP_TOL = 1e-10


def cp_tol_default(d: int) -> float:
    return 1e-9 * d


def as_operator(x, name: str = "operator") -> np.ndarray:
    """Return ``x`` as a finite square complex matrix."""
    a = np.asarray(x, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if d is None:
        d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"cannot unvec a vector of length {v.size}")
    return v.reshape((d, d), order="F")


def _check_same_convention(a: "SuperOperator", b: "SuperOperator") -> None:
    if a.convention != b.convention:
        raise ValueError(f"mixed vectorization conventions: {a.convention} vs {b.convention}")
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """A linear map on d x d operators, stored as a d^2 x d^2 matrix."""

    matrix: np.ndarray
    dim: int = field(default=0)
    convention: str = CONVENTION

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"superoperator matrix must be square, got {m.shape}")
        d = self.dim or int(round(np.sqrt(m.shape[0])))
        if m.shape != (d * d, d * d):
            raise ValueError(f"superoperator for d={d} must be {(d * d, d * d)}, got {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dim", d)

    @classmethod
    def identity(cls, d: int) -> "SuperOperator":
        return cls(np.eye(d * d), d)

    @classmethod
    def zero(cls, d: int) -> "SuperOperator":
        return cls(np.zeros((d * d, d * d)), d)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} operator, got {x.shape}")
        return unvec(self.matrix @ vec(x), self.dim)

    def __call__(self, x) -> np.ndarray:
        return self.apply(x)

    def __matmul__(self, other):
        if isinstance(other, SuperOperator):
            _check_same_convention(self, other)
            return SuperOperator(self.matrix @ other.matrix, self.dim, self.convention)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, SuperOperator):
            _check_same_convention(self, other)
            return SuperOperator(self.matrix + other.matrix, self.dim, self.convention)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SuperOperator):
            _check_same_convention(self, other)
            return SuperOperator(self.matrix - other.matrix, self.dim, self.convention)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return SuperOperator(scalar * self.matrix, self.dim, self.convention)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if np.isscalar(scalar):
            return SuperOperator(self.matrix / scalar, self.dim, self.convention)
        return NotImplemented

    def __neg__(self):
        return SuperOperator(-self.matrix, self.dim, self.convention)

    def __pow__(self, k: int):
        if int(k) != k or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        return SuperOperator(np.linalg.matrix_power(self.matrix, int(k)), self.dim, self.convention)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"SuperOperator(dim={self.dim}, convention={self.convention!r})"


def _matrix(a) -> np.ndarray:
    return a.matrix if isinstance(a, SuperOperator) else np.asarray(a, dtype=complex)


def sandwich(a, b=None) -> SuperOperator:
    """The map ``X -> a X b`` (``b`` defaults to ``a^dagger``)."""
    a = as_operator(a)
    b = a.conj().T if b is None else as_operator(b)
    return SuperOperator(np.kron(b.T, a), a.shape[0])


def trace_map(a, b) -> SuperOperator:
    """The map ``X -> a tr(b X)``."""
    a, b = as_operator(a), as_operator(b)
    return SuperOperator(np.outer(vec(a), vec(b.T)), a.shape[0])


def commutator_map(h) -> SuperOperator:
    """The map ``X -> [h, X]``."""
    h = as_operator(h)
    eye = np.eye(h.shape[0])
    return SuperOperator(np.kron(eye, h) - np.kron(h.T, eye), h.shape[0])


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators of a quantum operation, ``sum_j K_j^dag K_j <= I``."""

    operators: tuple
    tol: float = 1e-10

    def __post_init__(self):
        ops = tuple(as_operator(k, "Kraus operator") for k in self.operators)
        if not ops:
            raise ValueError("a Kraus set needs at least one operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise ValueError(f"Kraus operators have mismatched dimensions: {k.shape} vs {(d, d)}")
        if len(ops) > d * d:
            raise ValueError(f"at most d^2={d * d} Kraus operators are allowed, got {len(ops)}")
        deficit = np.eye(d) - self._gram(ops)
        if np.linalg.eigvalsh((deficit + deficit.conj().T) / 2).min() < -self.tol:
            raise ValueError("Kraus operators are not trace-nonincreasing (sum K^dag K > I)")
        object.__setattr__(self, "operators", ops)

    @staticmethod
    def _gram(ops) -> np.ndarray:
        return sum(k.conj().T @ k for k in ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def is_trace_preserving(self) -> bool:
        return np.linalg.norm(self._gram(self.operators) - np.eye(self.dim), 2) <= self.tol

    def __len__(self):
        return len(self.operators)


@dataclass(frozen=True)
class GklsGenerator:
    hamiltonian: np.ndarray
    jumps: tuple = ()

    def __post_init__(self):
        h = as_operator(self.hamiltonian, "hamiltonian")
        scale = np.linalg.norm(h, 2)
        if np.linalg.norm(h - h.conj().T, 2) > HERMITIAN_RTOL * scale:
            raise ValueError("hamiltonian is not Hermitian")
        jumps = tuple(as_operator(j, "jump operator") for j in self.jumps)
        for j in jumps:
            if j.shape != h.shape:
                raise ValueError(f"jump operator shape {j.shape} does not match hamiltonian {h.shape}")
        h.flags.writeable = False
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


def kraus_to_superop(k: KrausSet | Sequence) -> SuperOperator:
    if not isinstance(k, KrausSet):
        k = KrausSet(tuple(k))
    d = k.dim
    m = sum(np.kron(op.conj(), op) for op in k.operators)
    return SuperOperator(m, d)


def gkls_to_superop(g: GklsGenerator) -> SuperOperator:
    """Matrix of ``rho -> -i[H, rho] + sum_j (L rho L^dag - {L^dag L, rho}/2)``."""
    h = g.hamiltonian
    d = g.dim
    eye = np.eye(d)
    m = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for jump in g.jumps:
        ll = jump.conj().T @ jump
        m = m + np.kron(jump.conj(), jump) - 0.5 * (np.kron(eye, ll) + np.kron(ll.T, eye))
    return SuperOperator(m, d)


def superop_exp(generator: SuperOperator, t: float = 1.0) -> SuperOperator:
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    m = t * _matrix(generator)
    if np.linalg.norm(m, 1) > EXP_NORM_CAP:
        raise OverflowError(f"||tL|| exceeds the exponential cap {EXP_NORM_CAP:g}")
    return SuperOperator(scipy.linalg.expm(m), generator.dim, generator.convention)


def op_norm(a) -> float:
    """Operator (2-2) norm on the Hilbert-Schmidt space: the largest singular value."""
    return float(np.linalg.norm(_matrix(a), 2))


def spectral_radius(a) -> float:
    m = _matrix(a)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def adjoint(a: SuperOperator) -> SuperOperator:
    """Adjoint with respect to the Hilbert-Schmidt inner product."""
    return SuperOperator(a.matrix.conj().T, a.dim, a.convention)


def kraus_adjoint(k: KrausSet) -> tuple:
    """Kraus operators of the adjoint map, in the original order.

    The adjoint of a trace-nonincreasing map is subunital and need not be
    trace-nonincreasing itself, so a plain tuple is returned.
    """
    return tuple(op.conj().T for op in k.operators)


def choi_matrix(a: SuperOperator) -> np.ndarray:
    """``J = sum_ab E_ab (x) E(E_ab)``, indexed as ``J[(a, i), (b, j)] = E(E_ab)[i, j]``."""
    d = a.dim
    s4 = a.matrix.reshape(d, d, d, d)  # [j, i, b, a] for row i + d j, column a + d b
    return s4.transpose(3, 1, 2, 0).reshape(d * d, d * d)


class Verdict(enum.Enum):
    CPTP = "CPTP"
    CP_ONLY = "CP-only"
    NOT_CP = "not-CP"


def is_cptp(a: SuperOperator, tol: float | None = None, tp_tol: float = TP_TOL) -> Verdict:
    """Classify a map through its Choi matrix.

    CP iff the Hermitian part of the Choi matrix has no eigenvalue below
    ``-tol``; TP iff its partial trace over the output equals the identity
    within ``tp_tol``.
    """
    d = a.dim
    tol = cp_tol_default(d) if tol is None else tol
    if tol <= 0:
        raise ValueError("tol must be positive")
    j = choi_matrix(a)
    herm = (j + j.conj().T) / 2
    if np.linalg.norm(j - herm, 2) > tol or np.linalg.eigvalsh(herm).min() < -tol:
        return Verdict.NOT_CP
    if trace_deficit(a) <= tp_tol:
        return Verdict.CPTP
    return Verdict.CP_ONLY


def trace_deficit(a: SuperOperator) -> float:
    """``|| E^dag(I) - I ||``, zero iff the map is trace preserving."""
    d = a.dim
    j4 = choi_matrix(a).reshape(d, d, d, d)
    partial = np.einsum("aibi->ab", j4)
    return float(np.linalg.norm(partial - np.eye(d), 2))


def is_trace_nonincreasing(a: SuperOperator, tol: float = TP_TOL) -> bool:
    d = a.dim
    j4 = choi_matrix(a).reshape(d, d, d, d)
    partial = np.einsum("aibi->ab", j4)
    partial = (partial + partial.conj().T) / 2
    return bool(np.linalg.eigvalsh(np.eye(d) - partial.T).min() >= -tol)


def compose(maps: Iterable[SuperOperator]) -> SuperOperator:
    """``E_m ... E_1`` for ``maps = [E_1, ..., E_m]``."""
    maps = list(maps)
    if not maps:
        raise ValueError("nothing to compose")
    out = maps[0]
    for m in maps[1:]:
        out = m @ out
    return out
