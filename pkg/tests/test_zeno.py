import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from zenolab import models
from zenolab.bounds import bound_cycle_perturbation
from zenolab.sampling import random_channel, random_cycle, random_gkls
from zenolab.superop import (
    SuperOperator,
    Verdict,
    gkls_to_superop,
    is_cptp,
    op_norm,
    superop_exp,
)
from zenolab.zeno import (
    KickCycle,
    asymptotic_projection_check,
    averaged_generator,
    convergence_scan,
    corollary2_limit,
    hermitian_intersection,
    kicked_evolution,
    kicked_step,
    loglog_slope,
    peripheral_power,
    zeno_generator,
    zeno_limit_map,
)

ODD = [2**k + 1 for k in range(3, 11)]


def close(a, b, tol=1e-9):
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol


# -- Zeno generator ------------------------------------------------------------------


def test_weak_measurement_generator_vanishes():
    zl = zeno_generator(models.build("weak_meas_81", p=0.5).cycle)
    assert close(zl.lz.matrix, 0)
    assert close(zl.peripheral_projection.matrix, models.weak_measurement_projection().matrix)


@pytest.mark.parametrize("model_id", ["cptp_kick_82", "cycle_83"])
@pytest.mark.parametrize("q", [0.0, 0.3, 0.9])
def test_qutrit_generators_match_closed_form(model_id, q):
    b = models.build(model_id, q=q, gamma_t=2.0)
    zl = zeno_generator(b.cycle)
    assert close(zl.lz.matrix, b.references["lz"].matrix)
    assert close(zl.peripheral_projection.matrix, b.references["p_phi"].matrix)
    assert close(zl.peripheral_part.matrix, b.references["e_phi"].matrix)


def test_two_kick_cycle_peripheral_inverse_equals_peripheral_part():
    zl = zeno_generator(models.build("cycle_83", q=0.3).cycle)
    assert close(zl.peripheral_inverse.matrix, zl.peripheral_part.matrix)


def test_single_kick_reduces_to_projected_generator(rng):
    e = random_channel(2, rng)
    l = gkls_to_superop(random_gkls(2, rng))
    zl = zeno_generator(KickCycle((e,), l))
    assert np.array_equal(zl.lbar.matrix, l.matrix)
    manual = sum(c.projection @ l.matrix @ c.projection for c in zl.decomposition.peripheral)
    assert np.linalg.norm(zl.lz.matrix - manual) <= 1e-12


def test_empty_peripheral_spectrum_decays_to_zero(rng):
    e = SuperOperator(0.5 * np.eye(4))
    zl = zeno_generator(KickCycle((e,), gkls_to_superop(random_gkls(2, rng))))
    assert zl.decays_to_zero
    assert close(zl.lz.matrix, 0) and close(zl.peripheral_projection.matrix, 0)


def test_generator_block_structure():
    for mid in ("cptp_kick_82", "cycle_83", "multi_proj_84"):
        zl = zeno_generator(models.build(mid).cycle)
        p = zl.peripheral_projection.matrix
        assert close(p @ zl.lz.matrix @ p, zl.lz.matrix)
        ps = [c.projection for c in zl.decomposition.peripheral]
        for i, a in enumerate(ps):
            for j, b in enumerate(ps):
                if i != j:
                    assert close(a @ zl.lz.matrix @ b, 0)


def test_kick_cycle_rejects_non_cp():
    flip = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            flip[b + 2 * a, a + 2 * b] = 1
    with pytest.raises(ValueError):
        KickCycle((SuperOperator(flip),), SuperOperator.zero(2))
    with pytest.raises(ValueError):
        KickCycle((), SuperOperator.zero(2))
    with pytest.raises(ValueError):
        KickCycle((SuperOperator.identity(3),), SuperOperator.zero(2))


# -- evolution -----------------------------------------------------------------------


def test_kicked_step_examples(rng):
    cyc = models.build("cycle_83", q=0.3).cycle
    assert np.array_equal(kicked_step(cyc, 0.0, 5).matrix, cyc.product.matrix)
    l = gkls_to_superop(random_gkls(2, rng))
    triv = KickCycle((SuperOperator.identity(2),), l)
    assert close(kicked_step(triv, 1.0, 4).matrix, superop_exp(l, 0.25).matrix, 1e-12)
    assert close(kicked_evolution(triv, 1.0, 1).matrix, kicked_step(triv, 1.0, 1).matrix, 0)


def test_kicked_step_is_cptp_and_close_to_kick():
    b = models.build("cptp_kick_82", q=0.3, gamma_t=2.0)
    step = kicked_step(b.cycle, 1.0, 8)
    assert is_cptp(step) is Verdict.CPTP
    bound = bound_cycle_perturbation(3, 1, 1.0, 8, op_norm(b.cycle.generator))
    assert op_norm(step - b.cycle.product) <= bound


def test_projective_weak_measurement_evolution_spectrum():
    # p = 1: the one-step eigenvalues follow the closed form, so the n-th power does too
    b = models.build("weak_meas_81", p=1.0, omega_t=1.0)
    n = 16
    evo = kicked_evolution(b.cycle, 1.0, n).matrix
    expect = b.references["eigenvalues"](n) ** n
    got = np.linalg.eigvals(evo)
    assert close(np.sort_complex(got), np.sort_complex(expect), 1e-9)


def test_selective_projection_cycle_converges():
    b = models.build("multi_proj_84", variant="selective", g_t=1.0)
    zl = zeno_generator(b.cycle)
    d64 = op_norm(kicked_evolution(b.cycle, 1.0, 64) - zeno_limit_map(zl, 1.0, 64))
    d8 = op_norm(kicked_evolution(b.cycle, 1.0, 8) - zeno_limit_map(zl, 1.0, 8))
    assert d64 < d8 / 4


def test_zeno_limit_map_examples():
    zl = zeno_generator(models.build("cptp_kick_82", q=0.0).cycle)
    assert np.array_equal(zeno_limit_map(zl, 0.0, 0).matrix, np.eye(9))
    b = models.build("weak_meas_81", p=0.5)
    zlw = zeno_generator(b.cycle)
    for n in (1, 7, 100):
        assert close(zeno_limit_map(zlw, 2.0, n).matrix, b.references["projection"].matrix)
    b0 = models.build("cptp_kick_82", q=0.0, gamma_t=2.0)
    zl0 = zeno_generator(b0.cycle)
    u = b0.references["u_inf"].matrix
    p = zl0.peripheral_projection.matrix
    expect = np.linalg.matrix_power(u, 5) @ p @ scipy.linalg.expm(zl0.lz.matrix)
    assert close(zeno_limit_map(zl0, 1.0, 5).matrix, expect)


def test_peripheral_power_uses_phases():
    zl = zeno_generator(models.build("cptp_kick_82", q=0.3).cycle)
    e = zl.peripheral_part.matrix
    assert close(peripheral_power(zl, 1001), np.linalg.matrix_power(e, 1001), 1e-9)
    assert np.array_equal(peripheral_power(zl, 0), np.eye(9))


# -- scans ---------------------------------------------------------------------------


def test_weak_measurement_scan_matches_first_order_law():
    b = models.build("weak_meas_81", p=1.0, omega_t=1.0)
    res = convergence_scan(b.cycle, 1.0, [64, 256, 1024])
    scaled = [n * d for n, d in res]
    target = models.analytic_distance_81(1.0, 1.0, 1) * 1
    assert abs(scaled[-1] - target) / target < 0.01


def test_qutrit_kick_odd_slope():
    b = models.build("cptp_kick_82", q=0.3, gamma_t=2.0)
    res = convergence_scan(b.cycle, 1.0, ODD)
    assert abs(res.odd_slope + 1) <= 0.15


def test_trivial_cycle_has_zero_distance(rng):
    cyc = KickCycle((SuperOperator.identity(2),), gkls_to_superop(random_gkls(2, rng)))
    res = convergence_scan(cyc, 1.0, [1, 2, 8])
    assert all(d <= 1e-12 for _, d in res)


def test_scan_rows_and_parallel_agree():
    cyc = models.build("cycle_83").cycle
    a = convergence_scan(cyc, 1.0, [8, 9, 16, 17])
    b = convergence_scan(cyc, 1.0, [8, 9, 16, 17], workers=3)
    assert a.distance == b.distance
    assert [r[2] for r in a.rows()] == ["even", "odd", "even", "odd"]
    with pytest.raises(ValueError):
        convergence_scan(cyc, 1.0, [4, 2])


@pytest.mark.parametrize("seed", range(6))
def test_random_cycles_converge(seed):
    cyc = random_cycle(seed, m=1 + seed % 3)
    res = convergence_scan(cyc, 1.0, [3, 9, 33, 129, 513, 1025])
    scaled = [n * d for n, d in res]
    assert max(scaled) <= 10 * max(scaled[0], 1e-12) + 1e-9
    assert res.distance[-1] <= res.distance[0] + 1e-12


def test_loglog_slope_exact_power():
    ns = [2, 4, 8, 16]
    assert loglog_slope(ns, [3 / n**2 for n in ns]) == pytest.approx(-2)
    assert np.isnan(loglog_slope([1], [1.0]))


# -- projection cycles ---------------------------------------------------------------


def test_hermitian_intersection_examples():
    b = models.build("multi_proj_84")
    p1, p2 = b.references["hilbert_p1"], b.references["hilbert_p2"]
    w = np.linalg.eigvals(p2 @ p1)
    assert close(np.sort(w.real), [0, 0.5, 1], 1e-10)
    p_phi = hermitian_intersection([p1, p2])
    assert close(p_phi, models.outer(2, 2), 1e-10)
    assert close(hermitian_intersection([p1, p1]), p1)
    a, c = np.diag([1.0, 0, 0]), np.diag([0.0, 1, 0])
    assert close(hermitian_intersection([a, c]), 0)
    with pytest.raises(ValueError):
        hermitian_intersection([np.array([[1.0, 1.0], [0.0, 0.0]])])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_hermitian_intersection_properties(seed):
    rng = np.random.default_rng(seed)
    d = 4
    shared = np.linalg.qr(rng.standard_normal((d, 1)) + 1j * rng.standard_normal((d, 1)))[0]
    projs = []
    for _ in range(3):
        extra = rng.standard_normal((d, 1)) + 1j * rng.standard_normal((d, 1))
        q = np.linalg.qr(np.hstack([shared, extra]))[0]
        projs.append(q @ q.conj().T)
    p = hermitian_intersection(projs)
    assert np.linalg.norm(p - p.conj().T) <= 1e-9 and np.linalg.norm(p @ p - p) <= 1e-9
    assert np.linalg.norm(p - shared @ shared.conj().T) <= 1e-8
    for pj in projs:
        assert np.linalg.norm(pj @ p - p) <= 1e-9


def test_nonselective_unitary_limit_is_projection():
    b = models.build("multi_proj_84", variant="nonselective", gamma_t=0.0)
    res = corollary2_limit(b.references["nonselective_kicks"], b.cycle.generator, 1.0, 64)
    assert close(res.limit.matrix, b.references["nonselective_p_phi"].matrix)
    assert res.crosscheck <= 1e-8


def test_selective_limit_and_identity_projection(rng):
    b = models.build("multi_proj_84", variant="selective", gamma_t=2.0)
    lim, dist = corollary2_limit(b.references["selective_kicks"], b.cycle.generator, 1.0, 64)
    expect = b.references["selective_p_phi"].matrix @ scipy.linalg.expm(b.references["selective_lz"].matrix)
    assert close(lim.matrix, expect)
    l = gkls_to_superop(random_gkls(2, rng))
    lim, _ = corollary2_limit([SuperOperator.identity(2)], l, 0.7, 4)
    assert close(lim.matrix, superop_exp(l, 0.7).matrix)


def test_asymptotic_projection_examples():
    p = models.weak_measurement_projection()
    res = asymptotic_projection_check(lambda n: p, p, [1, 2, 4])
    assert all(d <= 1e-14 for _, d in res)
    b = models.build("weak_meas_81", p=0.5)
    res = asymptotic_projection_check(lambda n: kicked_step(b.cycle, 1.0, n), p, [16, 32, 64, 128, 256, 512, 1024])
    assert abs(res.all_slope + 1) <= 0.2
    b3 = models.build("cycle_83", q=0.6, gamma_t=2.0)
    zl = zeno_generator(b3.cycle)
    res = asymptotic_projection_check(
        lambda n: kicked_step(b3.cycle, 1.0, n), zl.peripheral_projection, [8, 16, 32, 64]
    )
    assert res.distance[-1] < res.distance[0]
    with pytest.raises(ValueError):
        asymptotic_projection_check(lambda n: p, 2 * np.eye(4), [1])


def test_averaged_generator_two_kicks():
    b = models.build("cycle_83", q=0.3)
    zl = zeno_generator(b.cycle)
    e1, e2 = (k.matrix for k in b.cycle.kicks)
    l = b.cycle.generator.matrix
    manual = 0.5 * (l + zl.peripheral_inverse.matrix @ e2 @ l @ e1)
    assert close(averaged_generator(b.cycle, zl.peripheral_inverse.matrix), manual, 1e-13)
