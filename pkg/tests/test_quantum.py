import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asymfreeze.errors import DimMismatch, NotHermitian, NotNormalized, NotPSD, TraceLoss, TraceNotOne
from asymfreeze.quantum import (
    DensityMatrix,
    KrausChannel,
    action_distance,
    adjoint_channel,
    apply_channel,
    apply_kraus,
    compose,
    density_from_pure,
    identity_channel,
    random_cptp,
    random_density,
    validate_cptp,
    validate_density,
)
from asymfreeze.scenarios import example1_channel, example1_state, example2_channel

R2 = 1 / math.sqrt(2)


def test_density_from_pure_examples():
    assert np.allclose(density_from_pure([1, 0]).matrix, np.diag([1, 0]))
    assert np.allclose(density_from_pure([R2, R2]).matrix, np.full((2, 2), 0.5))
    with pytest.raises(NotNormalized):
        density_from_pure([1, 1])


def test_density_from_two_qubit_state():
    rho = density_from_pure([R2, 0, R2, 0])
    w, v = np.linalg.eigh(rho.matrix)
    assert np.allclose(w, [0, 0, 0, 1], atol=1e-14)
    target = np.array([1, 0, 1, 0]) / math.sqrt(2)
    assert abs(abs(np.vdot(v[:, -1], target)) - 1) < 1e-12


def test_validate_density_errors():
    assert validate_density(np.eye(2) / 2).dim == 2
    with pytest.raises(NotPSD):
        validate_density(np.diag([1.5, -0.5]))
    with pytest.raises(TraceNotOne, match="differs"):
        validate_density(np.diag([0.6, 0.6]))
    with pytest.raises(NotHermitian):
        validate_density(np.array([[0.5, 0.3], [0.0, 0.5]]))


def test_density_is_immutable():
    rho = validate_density(np.eye(2) / 2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


def test_identity_channel(rng):
    rho = random_density(3, rng)
    assert np.allclose(apply_channel(identity_channel(3), rho).matrix, rho.matrix)


def test_example1_channel_half_mixture():
    rho0 = example1_state(R2, R2)
    out = apply_channel(example1_channel(0.5), rho0).matrix
    u = np.array([1, 0, 1, 0]) / math.sqrt(2)
    v = np.array([0, 1, 0, -1]) / math.sqrt(2)
    expected = 0.5 * np.outer(u, u) + 0.5 * np.outer(v, v)
    assert np.allclose(out, expected, atol=1e-14)


def _kraus_expand(ops, rho):
    # oracle: explicit loop, elementwise products
    d = rho.shape[0]
    out = np.zeros((d, d), dtype=complex)
    for k in ops:
        for i in range(d):
            for j in range(d):
                out[i, j] += sum(k[i, a] * rho[a, b] * np.conj(k[j, b]) for a in range(d) for b in range(d))
    return out


def test_example2_channel_on_number_state():
    d, n = 6, 3
    rho = np.zeros((d, d))
    rho[n, n] = 1
    expected = np.zeros((d, d))
    expected[n, n], expected[n + 1, n + 1], expected[n - 1, n - 1] = 0.5, 0.25, 0.25
    ch = example2_channel(d)
    assert np.allclose(_kraus_expand(ch.kraus_ops, rho), expected)
    assert np.allclose(apply_channel(ch, rho).matrix, expected)


def test_apply_dim_mismatch():
    with pytest.raises(DimMismatch):
        apply_channel(identity_channel(3), np.eye(2) / 2)


def test_apply_reports_trace_loss():
    half = KrausChannel((np.eye(2) / math.sqrt(2),))
    with pytest.raises(TraceLoss):
        apply_channel(half, np.eye(2) / 2)
    # a flagged channel may lose up to its declared deficit, and says so
    top = np.zeros((3, 3))
    top[2, 2] = 1
    out = apply_channel(example2_channel(3), top)
    assert out.trace_deficit == pytest.approx(0.25)
    assert out.trace == pytest.approx(0.75)


def test_compose_identity_and_sequential(rng):
    lam = random_cptp(3, rng)
    assert action_distance(compose(identity_channel(3), lam), lam) < 1e-12
    ch = example2_channel(8)
    twice = compose(ch, ch)
    rho = np.zeros((8, 8))
    rho[4, 4] = 1
    assert np.allclose(apply_channel(twice, rho).matrix, apply_channel(ch, apply_channel(ch, rho)).matrix, atol=1e-14)


def test_adjoint_examples():
    assert np.allclose(adjoint_channel(identity_channel(2)).kraus_ops[0], np.eye(2))
    ch = example1_channel(0.3)
    assert np.linalg.norm(apply_kraus(adjoint_channel(ch).kraus_ops, np.eye(4)) - np.eye(4)) < 1e-12
    back = adjoint_channel(adjoint_channel(ch))
    assert all(np.array_equal(a, b) for a, b in zip(back.kraus_ops, ch.kraus_ops))


@pytest.mark.parametrize("p", [0.0, 0.1, 0.3, 0.5, 0.77, 1.0])
def test_validate_cptp_example1(p):
    rep = validate_cptp(example1_channel(p))
    assert rep.passed and rep.residual <= 1e-14


def test_validate_cptp_example2_deficit():
    d = 7
    rep = validate_cptp(example2_channel(d))
    assert rep.residual == pytest.approx(0.25, abs=1e-15)
    assert not rep.passed
    assert rep.within_declared_deficit
    ch = example2_channel(d)
    gap = np.eye(d) - sum(k.conj().T @ k for k in ch.kraus_ops)
    expected = np.zeros((d, d))
    expected[d - 1, d - 1] = 0.25
    assert np.allclose(gap, expected)


def test_validate_cptp_fails_for_half_identity():
    assert not validate_cptp(KrausChannel((np.eye(2) / 2,))).passed


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 6))
def test_channel_invariants(seed, dim):
    rng = np.random.default_rng(seed)
    a, b = random_cptp(dim, rng), random_cptp(dim, rng, env=3)
    rho = random_density(dim, rng)
    out = apply_channel(a, rho).matrix
    assert abs(np.trace(out) - 1) <= 1e-10
    assert np.linalg.eigvalsh(out)[0] >= -1e-10
    seq = apply_channel(b, apply_channel(a, rho)).matrix
    assert np.max(np.abs(apply_channel(compose(b, a), rho).matrix - seq)) <= 1e-12
    assert validate_cptp(a).passed


def test_compose_matches_sequential_on_ten_states(rng):
    a, b = random_cptp(4, rng), random_cptp(4, rng)
    ab = compose(b, a)
    for _ in range(10):
        rho = random_density(4, rng)
        seq = apply_channel(b, apply_channel(a, rho))
        assert np.max(np.abs(apply_channel(ab, rho).matrix - seq.matrix)) <= 1e-12
