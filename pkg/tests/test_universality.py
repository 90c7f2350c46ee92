import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asymfreeze.errors import DimMismatch, EmptyTrajectory, WrongVariant
from asymfreeze.matcore import trace_norm_distance
from asymfreeze.quantum import (
    DensityMatrix,
    KrausChannel,
    action_distance,
    apply_channel,
    compose,
    identity_channel,
    random_cptp,
    random_density,
    validate_cptp,
)
from asymfreeze.scenarios import example1_channel, example1_state
from asymfreeze.symmetry import cyclic, group_average_channel, is_covariant, twirl, two_qubit_u1
from asymfreeze.universality import (
    Branch,
    freezing_report,
    petz_recovery,
    theorem_check,
    verify_recovery,
)

R2 = 1 / math.sqrt(2)
Z6 = cyclic(6, 6, range(6))


def test_petz_identity_channel(rng):
    prior = random_density(3, rng)
    rec = petz_recovery(identity_channel(3), prior)
    assert rec.branch is Branch.INVERTIBLE
    assert action_distance(rec.channel, identity_channel(3)) <= 1e-10


def test_petz_example1_recovers_initial_state():
    rep = two_qubit_u1()
    rho0 = example1_state(R2, R2)
    lam = example1_channel(0.25)
    rec = petz_recovery(lam, twirl(rep, rho0))
    rho_t = apply_channel(lam, rho0)
    assert trace_norm_distance(rec(rho_t).matrix, rho0.matrix) <= 1e-9
    assert is_covariant(rep, rec.channel, tol=1e-8)
    res = verify_recovery(rec, rho_t, rho0)
    assert res.state <= 1e-9 and res.prior <= 1e-9


@pytest.mark.parametrize("p", [0.0, 1.0])
def test_petz_example1_kernel_branch(p):
    rep = two_qubit_u1()
    rho0 = example1_state(R2, R2)
    lam = example1_channel(p)
    rec = petz_recovery(lam, twirl(rep, rho0))
    assert rec.branch is Branch.KERNEL_AUGMENTED
    assert validate_cptp(rec.channel).residual <= 1e-9
    assert verify_recovery(rec, apply_channel(lam, rho0), rho0).state <= 1e-9
    assert is_covariant(rep, rec.channel, tol=1e-8)


def test_verify_recovery_identity(rng):
    rho = random_density(3, rng)
    rec = petz_recovery(identity_channel(3), rho)
    res = verify_recovery(rec, rho, rho)
    assert res.state <= 1e-12 and res.prior <= 1e-12


def test_verify_recovery_reports_injected_error():
    rep = two_qubit_u1()
    rho0 = example1_state(R2, R2)
    wrong = example1_state(0.6, 0.8)
    lam = example1_channel(0.3)
    rec = petz_recovery(lam, twirl(rep, rho0))
    res = verify_recovery(rec, apply_channel(lam, rho0), wrong)
    assert res.state == pytest.approx(trace_norm_distance(rho0.matrix, wrong.matrix), abs=1e-9)


def test_verify_recovery_dim_mismatch(rng):
    rec = petz_recovery(identity_channel(2), np.eye(2) / 2)
    with pytest.raises(DimMismatch):
        verify_recovery(rec, np.eye(3) / 3, np.eye(2) / 2)


def test_petz_composition_structure(rng):
    # R = R1 o R2 o R3 with R1 = d0^1/2 . d0^1/2, R2 = adjoint, R3 = dt^-1/2 . dt^-1/2
    from asymfreeze.matcore import pinv_sqrt, sqrt_psd
    from asymfreeze.quantum import adjoint_channel

    lam = group_average_channel(Z6, random_cptp(6, rng))
    prior = twirl(Z6, random_density(6, rng))
    rec = petz_recovery(lam, prior)
    r1 = KrausChannel((sqrt_psd(prior.matrix),))
    r3 = KrausChannel((pinv_sqrt(rec.evolved_prior.matrix),))
    chained = compose(r1, compose(adjoint_channel(lam), r3))
    assert action_distance(chained, rec.channel) <= 1e-9
    for part in (r1, adjoint_channel(lam), r3):
        assert is_covariant(Z6, part, tol=1e-8)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_recovery_invariants(seed):
    rng = np.random.default_rng(seed)
    lam = group_average_channel(Z6, random_cptp(6, rng))
    prior = twirl(Z6, random_density(6, rng))
    rec = petz_recovery(lam, prior)
    assert trace_norm_distance(rec(rec.evolved_prior).matrix, prior.matrix) <= 1e-9
    assert validate_cptp(rec.channel).residual <= 1e-9
    assert is_covariant(Z6, rec.channel, tol=1e-8)


def test_freezing_report_constant_trajectory(rng):
    rho = random_density(4, rng)
    rep = freezing_report(two_qubit_u1(), [rho, rho, rho])
    assert rep.all_frozen
    assert all(v == 0 for v in rep.deviations.values())
    assert len(rep.steps) == 3 and rep.steps[0].recovery_residual is None


def test_freezing_report_detects_decay(rng):
    rep = two_qubit_u1()
    rho0 = example1_state(R2, R2)
    # full dephasing within the charge-0 block destroys the coherence
    decayed = twirl(rep, rho0)
    report = freezing_report(rep, [rho0, decayed])
    assert not any(report.frozen.values())
    assert report.deviations["relative_entropy_of_asymmetry"] == pytest.approx(1, abs=1e-12)


def test_freezing_report_errors():
    with pytest.raises(EmptyTrajectory):
        freezing_report(two_qubit_u1(), [])
    with pytest.raises(DimMismatch):
        freezing_report(two_qubit_u1(), [np.eye(4) / 4, np.eye(2) / 2])


def test_theorem_check_identity_and_unitary():
    stats = theorem_check(Z6, 8, 6, seed=1, kind="identity")
    assert stats.frozen_count == 8 and stats.passed
    assert stats.max_recovery_residual <= 1e-10
    stats = theorem_check(Z6, 8, 6, seed=2, kind="unitary")
    assert stats.frozen_count == 8 and stats.passed


def test_theorem_check_wrong_variant_and_dim():
    with pytest.raises(WrongVariant):
        theorem_check(two_qubit_u1(), 2, 4, seed=0)
    with pytest.raises(DimMismatch):
        theorem_check(Z6, 2, 5, seed=0)


def test_theorem_check_deterministic_and_schedule_independent():
    a = theorem_check(Z6, 12, 6, seed=7)
    b = theorem_check(Z6, 12, 6, seed=7, workers=4)
    assert a.summary() == b.summary()
    assert [o.ar_final for o in a.outcomes] == [o.ar_final for o in b.outcomes]
