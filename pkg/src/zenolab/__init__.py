"""Quantum Zeno dynamics for cycles of quantum operations."""

from .matfunc import BranchCut, bch_log, effective_generator, g_of_ad_apply, primary_log
from .models import ModelSpec, analytic_distance_81, build, efficiency_scan
from .spectral import SpectralDecomposition, decompose, schur_split
from .superop import (
    GklsGenerator,
    KrausSet,
    SuperOperator,
    Verdict,
    gkls_to_superop,
    is_cptp,
    kraus_to_superop,
    op_norm,
    superop_exp,
)
from .zeno import (
    KickCycle,
    ZenoLimit,
    convergence_scan,
    corollary2_limit,
    projection_cycle_limit,
    hermitian_intersection,
    kicked_evolution,
    zeno_generator,
)

__all__ = [
    "BranchCut", "bch_log", "effective_generator", "g_of_ad_apply", "primary_log",
    "ModelSpec", "analytic_distance_81", "build", "efficiency_scan",
    "SpectralDecomposition", "decompose", "schur_split",
    "GklsGenerator", "KrausSet", "SuperOperator", "Verdict", "gkls_to_superop", "is_cptp",
    "kraus_to_superop", "op_norm", "superop_exp",
    "KickCycle", "ZenoLimit", "convergence_scan", "corollary2_limit", "projection_cycle_limit", "hermitian_intersection",
    "kicked_evolution", "zeno_generator",
]
