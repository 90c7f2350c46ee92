"""Covariant Petz recovery, freezing detection and the randomized theorem harness."""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimMismatch, EmptyTrajectory, NotTracePreserving, WrongVariant
from .matcore import dagger, fro, kernel_projector, pinv_sqrt, sqrt_psd, trace_norm_distance
from .measures import Measure, MeasureValue, measure_registry, rel_entropy_asymmetry, relative_entropy
from .quantum import (
    DensityMatrix,
    KrausChannel,
    apply_channel,
    completeness,
    identity_channel,
    random_cptp,
    random_density,
    validate_density,
)
from .symmetry import FiniteRep, SymmetryRep, commutant_unitary, group_average_channel, twirl

FREEZE_TOL = 1e-9
RECOVERY_TP_TOL = 1e-8
FROZEN_TRIGGER = 1e-10
CONSEQUENCE_TOL = 1e-7
MONOTONE_SLACK = 1e-9
NEAR_FROZEN_BAND = 1e-6


class Branch(enum.Enum):
    INVERTIBLE = "invertible"
    KERNEL_AUGMENTED = "kernel_augmented"


@dataclass(frozen=True, eq=False)
class RecoveryMap:
    channel: KrausChannel
    prior: DensityMatrix
    evolved_prior: DensityMatrix
    branch: Branch

    def __call__(self, rho) -> DensityMatrix:
        return apply_channel(self.channel, rho)


def petz_recovery(channel: KrausChannel, prior) -> RecoveryMap:
    """Petz map of ``channel`` with respect to ``prior``.

    Kraus operators are ``prior^1/2 K_n^dag evolved^-1/2`` where
    ``evolved = channel(prior)`` and the inverse square root is taken on the
    support. If ``evolved`` is singular, the projector onto its kernel is
    appended as one more Kraus operator so the map stays trace preserving.
    """
    prior = validate_density(prior)
    if prior.dim != channel.dim:
        raise DimMismatch(f"channel dimension {channel.dim} vs prior dimension {prior.dim}")
    evolved = apply_channel(channel, prior)
    root = sqrt_psd(prior.matrix)
    inv_root = pinv_sqrt(evolved.matrix)
    ops = [root @ dagger(k) @ inv_root for k in channel.kraus_ops]
    kernel = kernel_projector(evolved.matrix)
    branch = Branch.INVERTIBLE
    if np.trace(kernel).real > 0.5:
        ops.append(kernel)
        branch = Branch.KERNEL_AUGMENTED
    rec = KrausChannel(tuple(ops), tp_tolerance=FREEZE_TOL, label="petz")
    residual = fro(completeness(rec) - np.eye(rec.dim))
    if residual > RECOVERY_TP_TOL:
        raise NotTracePreserving(residual)
    return RecoveryMap(rec, prior, evolved, branch)


@dataclass(frozen=True)
class RecoveryResidual:
    state: float  # D(R(rho_t), rho_0)
    prior: float  # D(R(delta_t), delta_0)


def verify_recovery(recovery: RecoveryMap, rho_t, rho_0) -> RecoveryResidual:
    rho_t = validate_density(rho_t)
    rho_0 = validate_density(rho_0)
    if not rho_t.dim == rho_0.dim == recovery.channel.dim:
        raise DimMismatch("recovery map, evolved state and initial state must share a dimension")
    back = recovery(rho_t)
    back_prior = recovery(recovery.evolved_prior)
    return RecoveryResidual(
        trace_norm_distance(back.matrix, rho_0.matrix),
        trace_norm_distance(back_prior.matrix, recovery.prior.matrix),
    )


# -- freezing along a trajectory ---------------------------------------------


@dataclass(frozen=True)
class StepRecord:
    index: int
    values: dict[str, MeasureValue]
    recovery_residual: float | None = None


@dataclass(frozen=True)
class FreezeReport:
    steps: list[StepRecord]
    frozen: dict[str, bool]
    deviations: dict[str, float]
    tolerance: float

    @property
    def all_frozen(self) -> bool:
        return all(self.frozen.values())

    def series(self, measure_id: str) -> list[float]:
        return [s.values[measure_id].value for s in self.steps]


def freezing_report(
    rep: SymmetryRep,
    trajectory: Sequence,
    measures: Sequence[Measure] | None = None,
    tol: float = FREEZE_TOL,
    channels: Sequence[KrausChannel] | None = None,
) -> FreezeReport:
    """Evaluate every measure at every step and decide which ones stay frozen.

    ``channels[i]`` (optional) is the map taking ``trajectory[0]`` to
    ``trajectory[i]``; when given, the Petz recovery residual with prior
    ``twirl(trajectory[0])`` is recorded for each step.
    """
    if len(trajectory) == 0:
        raise EmptyTrajectory("trajectory has no states")
    states = [validate_density(r) for r in trajectory]
    dim = states[0].dim
    if any(s.dim != dim for s in states):
        raise DimMismatch("trajectory states differ in dimension")
    if channels is not None and len(channels) != len(states):
        raise ValueError(f"got {len(channels)} channels for {len(states)} states")
    measures = measure_registry(rep) if measures is None else list(measures)

    prior = twirl(rep, states[0]) if channels is not None else None
    steps = []
    for i, rho in enumerate(states):
        values = {m.measure_id: m.evaluate(rep, rho) for m in measures}
        residual = None
        if channels is not None:
            rec = petz_recovery(channels[i], prior)
            residual = verify_recovery(rec, rho, states[0]).state
        steps.append(StepRecord(i, values, residual))

    deviations = {}
    for m in measures:
        start = steps[0].values[m.measure_id].value
        deviations[m.measure_id] = max(abs(s.values[m.measure_id].value - start) for s in steps)
    frozen = {k: v <= tol for k, v in deviations.items()}
    return FreezeReport(steps, frozen, deviations, tol)


# -- randomized theorem harness ------------------------------------------------


@dataclass
class TrialOutcome:
    kind: str
    ar_initial: float
    ar_final: float
    frozen: bool
    near_frozen: bool
    monotone_ok: bool
    sandwich_ok: bool
    sandwich_slack: float
    measure_deviation: float | None = None
    recovery_residual: float | None = None
    consequence_ok: bool = True


@dataclass
class TheoremStats:
    trials: int
    frozen_count: int = 0
    near_frozen_count: int = 0
    max_ar_drop: float = 0.0
    max_measure_deviation: float = 0.0
    max_recovery_residual: float = 0.0
    monotonicity_violations: int = 0
    sandwich_violations: int = 0
    frozen_violations: int = 0
    outcomes: list[TrialOutcome] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.monotonicity_violations == 0 and self.sandwich_violations == 0 and self.frozen_violations == 0

    def summary(self) -> dict:
        return {
            "trials": self.trials,
            "frozen_count": self.frozen_count,
            "max_ar_drop": self.max_ar_drop,
            "max_measure_deviation": self.max_measure_deviation,
            "max_recovery_residual": self.max_recovery_residual,
            "monotonicity_violations": self.monotonicity_violations,
        }


CHANNEL_KINDS = ("mixed", "random", "identity", "unitary", "commutant")


def _trial_channel(rep: FiniteRep, kind: str, index: int, rng: np.random.Generator) -> tuple[str, KrausChannel]:
    if kind == "mixed":
        # every fourth trial uses a reversible covariant channel so the frozen
        # branch of the theorem is actually exercised
        kind = "commutant" if index % 4 == 3 else "random"
    if kind == "random":
        return kind, group_average_channel(rep, random_cptp(rep.dim, rng))
    if kind == "identity":
        return kind, identity_channel(rep.dim)
    if kind == "unitary":
        u = rep.unitaries[int(rng.integers(rep.order))]
        return kind, KrausChannel((u,), label="group element")
    if kind == "commutant":
        return kind, KrausChannel((commutant_unitary(rep, rng),), label="commutant unitary")
    raise ValueError(f"unknown channel kind {kind!r}; expected one of {CHANNEL_KINDS}")


def run_trial(
    rep: FiniteRep, seed: int, index: int, measures: Sequence[Measure], kind: str = "mixed"
) -> TrialOutcome:
    rng = np.random.default_rng([seed, index])
    rho_0 = random_density(rep.dim, rng)
    kind, channel = _trial_channel(rep, kind, index, rng)

    rho_t = apply_channel(channel, rho_0)
    delta_0 = twirl(rep, rho_0)
    delta_t = apply_channel(channel, delta_0)
    ar0 = rel_entropy_asymmetry(rep, rho_0)
    art = rel_entropy_asymmetry(rep, rho_t)
    s_mid = relative_entropy(rho_t, delta_t)
    s_top = relative_entropy(rho_0, delta_0)
    slack = max(art - s_mid, s_mid - s_top, abs(s_top - ar0))
    drop = ar0 - art
    out = TrialOutcome(
        kind=kind,
        ar_initial=ar0,
        ar_final=art,
        frozen=abs(drop) <= FROZEN_TRIGGER,
        near_frozen=FROZEN_TRIGGER < abs(drop) <= NEAR_FROZEN_BAND,
        monotone_ok=art <= ar0 + MONOTONE_SLACK,
        sandwich_ok=slack <= MONOTONE_SLACK,
        sandwich_slack=slack,
    )
    if out.frozen:
        out.measure_deviation = max(
            abs(m.evaluate(rep, rho_t).value - m.evaluate(rep, rho_0).value) for m in measures
        )
        rec = petz_recovery(channel, delta_0)
        out.recovery_residual = verify_recovery(rec, rho_t, rho_0).state
        out.consequence_ok = out.measure_deviation <= CONSEQUENCE_TOL and out.recovery_residual <= CONSEQUENCE_TOL
    return out


def theorem_check(
    rep: SymmetryRep,
    trials: int,
    dim: int | None = None,
    seed: int = 0,
    measures: Sequence[Measure] | None = None,
    kind: str = "mixed",
    workers: int = 1,
) -> TheoremStats:
    """Randomized check of "A_r frozen implies every measure frozen".

    Trial ``i`` draws from ``default_rng([seed, i])`` so the statistics do
    not depend on ``workers``.
    """
    if not isinstance(rep, FiniteRep):
        raise WrongVariant("theorem_check samples covariant channels by group averaging; needs a finite rep")
    if dim is not None and dim != rep.dim:
        raise DimMismatch(f"dim={dim} but the representation acts on dimension {rep.dim}")
    measures = measure_registry(rep, extra=True) if measures is None else list(measures)

    def one(i):
        return run_trial(rep, seed, i, measures, kind)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            outcomes = list(pool.map(one, range(trials)))
    else:
        outcomes = [one(i) for i in range(trials)]

    stats = TheoremStats(trials=trials, outcomes=outcomes)
    for o in outcomes:
        stats.max_ar_drop = max(stats.max_ar_drop, o.ar_initial - o.ar_final)
        stats.monotonicity_violations += not o.monotone_ok
        stats.sandwich_violations += not o.sandwich_ok
        stats.near_frozen_count += o.near_frozen
        if o.frozen:
            stats.frozen_count += 1
            stats.frozen_violations += not o.consequence_ok
            stats.max_measure_deviation = max(stats.max_measure_deviation, o.measure_deviation)
            stats.max_recovery_residual = max(stats.max_recovery_residual, o.recovery_residual)
    return stats
