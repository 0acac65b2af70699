import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenolab import models
from zenolab.sampling import random_channel, random_kraus, random_unitary
from zenolab.spectral import (
    ClusteringWarning,
    ReconstructionError,
    decompose,
    peripheral_inverse,
    schur_split,
    spectral_projection_via_contour,
)
from zenolab.superop import SuperOperator, Verdict, is_cptp, kraus_to_superop, sandwich


def test_weak_measurement_eigenvalues():
    e = models.build("weak_meas_81", p=0.5).cycle.product
    dec = decompose(e)
    assert np.allclose(sorted(dec.eigenvalues.real), [0.5, 1.0])
    assert [c.multiplicity for c in dec.clusters] == [2, 2]
    assert dec.mu0 == pytest.approx(0.5)


def test_identity_single_cluster():
    dec = decompose(SuperOperator.identity(2))
    assert dec.size == 4 and len(dec.clusters) == 1
    c = dec.clusters[0]
    assert c.eigenvalue == pytest.approx(1)
    assert np.allclose(c.projection, np.eye(4)) and np.allclose(c.nilpotent, 0)
    assert dec.mu0 == 0.0


@pytest.mark.parametrize("q", [0.0, 0.3, 0.6, 0.9])
def test_qutrit_kick_peripheral_pair(q):
    dec = decompose(models.build("cptp_kick_82", q=q).cycle.product)
    periph = sorted(c.eigenvalue.real for c in dec.peripheral)
    assert np.allclose(periph, [-1, 1], atol=1e-12)


def test_contour_examples():
    p = spectral_projection_via_contour(np.diag([2.0, 0.0]), 2.0, 0.5)
    assert np.allclose(p, np.diag([1, 0]), atol=1e-12)
    p = spectral_projection_via_contour(np.array([[1.0, 1.0], [0.0, 1.0]]), 1.0, 0.5)
    assert np.allclose(p, np.eye(2), atol=1e-12)
    e = models.build("weak_meas_81", p=0.5).cycle.product
    p = spectral_projection_via_contour(e, 0.5, 0.2)
    ref = np.eye(4) - models.weak_measurement_projection().matrix
    assert np.allclose(p, ref, atol=1e-10)


def test_contour_rejects_circle_through_spectrum():
    with pytest.raises(ValueError):
        spectral_projection_via_contour(np.diag([1.0, 0.0]), 0.5, 0.5)


def test_contour_matches_eig_projection(rng):
    e = random_channel(2, rng).matrix
    dec = decompose(e)
    w = dec.eigenvalues
    for k, c in enumerate(dec.clusters):
        gap = min([abs(c.eigenvalue - x) for j, x in enumerate(w) if j != k] + [1.0])
        p = spectral_projection_via_contour(e, c.eigenvalue, gap / 3)
        assert np.linalg.norm(p - c.projection, 2) <= 1e-6


def test_defective_matrix_takes_schur_route():
    a = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.2]])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClusteringWarning)
        dec = decompose(a)
    c = dec.clusters[0]
    assert c.multiplicity == 2
    assert np.allclose(c.nilpotent, [[0, 1, 0], [0, 0, 0], [0, 0, 0]], atol=1e-7)
    assert dec.method in ("schur", "contour")


def test_peripheral_inverse_examples(rng):
    u = random_unitary(2, rng)
    conj = sandwich(u)
    dec = decompose(conj)
    assert np.allclose(peripheral_inverse(dec).matrix, sandwich(u.conj().T).matrix, atol=1e-10)
    d83 = decompose(models.build("cycle_83", q=0.3).cycle.product)
    assert np.allclose(d83.peripheral_inverse, d83.peripheral_part, atol=1e-12)
    assert np.allclose(peripheral_inverse(decompose(0.5 * np.eye(4))).matrix, 0)


def test_schur_split_examples(rng):
    h = rng.standard_normal((3, 3))
    lam, nil, u = schur_split(h + h.T)
    assert np.allclose(nil, 0, atol=1e-12)
    lam, nil, u = schur_split(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert np.allclose(lam, 0) and np.linalg.norm(nil, 2) == pytest.approx(1)
    a = rng.standard_normal((4, 4))
    lam, nil, u = schur_split(a)
    assert np.allclose(u.conj().T @ (lam + nil) @ u, a)
    assert np.allclose(np.tril(nil), 0)


def test_schur_split_of_transient_part():
    e = models.build("cptp_kick_82", q=0.3).cycle.product.matrix
    dec = decompose(e)
    p = dec.peripheral_projection
    lam, _, _ = schur_split(e - p @ e @ p)
    assert np.max(np.abs(np.diag(lam))) == pytest.approx(dec.mu0)
    assert dec.mu0 < 1


def test_reconstruction_failure_is_hard_error():
    a = np.array([[1.0, 1e6], [0.0, 1.0 + 1e-9]])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClusteringWarning)
        with pytest.raises(ReconstructionError):
            decompose(a, method="eig")


def test_bad_tolerance():
    with pytest.raises(ValueError):
        decompose(np.eye(2), peripheral_tol=0)


def test_report_fields():
    rep = decompose(models.build("weak_meas_81").cycle.product).report()
    assert set(rep) == {"eigenvalues", "multiplicities", "peripheral", "nilpotent_norms", "mu0", "method"}


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.booleans())
def test_decomposition_properties(seed, d, tp):
    k = random_kraus(d, seed, contraction=1.0 if tp else 0.8)
    e = kraus_to_superop(k)
    dec = decompose(e)
    n = d * d
    assert np.linalg.norm(sum(c.projection for c in dec.clusters) - np.eye(n), 2) <= 1e-8
    for i, a in enumerate(dec.clusters):
        for j, b in enumerate(dec.clusters):
            if i != j:
                assert np.linalg.norm(a.projection @ b.projection, 2) <= 1e-8
    assert all(c.nilpotent_norm <= 1e-7 for c in dec.peripheral)
    assert np.allclose(dec.peripheral_inverse @ dec.peripheral_part, dec.peripheral_projection, atol=1e-8)
    if tp:
        assert any(abs(c.eigenvalue - 1) < 1e-9 for c in dec.clusters)
        assert dec.mu0 < 1
    for name in ("peripheral_projection", "peripheral_part", "peripheral_inverse"):
        m = dec.as_superop(name)
        verdict = is_cptp(m)
        if dec.peripheral:
            assert verdict is not Verdict.NOT_CP
            if tp:
                assert verdict is Verdict.CPTP
