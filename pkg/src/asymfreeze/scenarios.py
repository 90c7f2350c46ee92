"""The two worked models: a covariant two-qubit evolution and a Fock-space
phase reference degraded by repeated covariant measurements."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GuardBandViolation, NotNormalized, OutOfRange, TraceLoss
from .matcore import kron
from .quantum import DENSITY_TOL, DensityMatrix, KrausChannel, apply_channel, compose, density_from_pure, identity_channel
from .symmetry import I2, SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z, fock_u1, two_qubit_u1
from .universality import FreezeReport, freezing_report

DEFAULT_P_GRID = tuple(round(0.1 * k, 10) for k in range(11))
EQUAL_PAIR = (1 / math.sqrt(2), 1 / math.sqrt(2))


def _weights(amplitudes: Sequence[complex]) -> np.ndarray:
    a = np.asarray(amplitudes, dtype=np.complex128)
    w = np.abs(a) ** 2
    if abs(w.sum() - 1.0) > DENSITY_TOL:
        raise NotNormalized(f"squared amplitudes sum to {w.sum():.12g}, not 1")
    return w


def amplitude_entropy(amplitudes: Sequence[complex]) -> float:
    """``-sum |l_m|^2 log2 |l_m|^2`` (0 log 0 = 0)."""
    w = _weights(amplitudes)
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w))) + 0.0


# -- two-qubit evolution ---------------------------------------------------------


@dataclass(frozen=True)
class Example1Config:
    p_grid: tuple = DEFAULT_P_GRID
    amplitudes: tuple = EQUAL_PAIR

    def __post_init__(self):
        _weights(self.amplitudes)
        if len(self.amplitudes) != 2:
            raise ValueError("the two-qubit model takes exactly two amplitudes")
        for p in self.p_grid:
            if not 0.0 <= p <= 1.0:
                raise OutOfRange(f"p={p} outside [0, 1]")


def example1_channel(p: float) -> KrausChannel:
    """``(1-p) rho + p X rho X^dag + p X^dag rho X`` with ``X = sz (x) s+``."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"p={p} outside [0, 1]")
    up = kron(SIGMA_Z, SIGMA_PLUS)
    down = kron(SIGMA_Z, SIGMA_MINUS)
    ops = (math.sqrt(1 - p) * np.eye(4), math.sqrt(p) * up, math.sqrt(p) * down)
    return KrausChannel(ops, label=f"example1(p={p})")


def example1_state(l0: complex, l1: complex) -> DensityMatrix:
    """``|phi> = l0 |00> + l1 |10>``."""
    _weights((l0, l1))
    psi = np.zeros(4, dtype=np.complex128)
    psi[0b00] = l0
    psi[0b10] = l1
    return density_from_pure(psi / np.linalg.norm(psi))


def example1_expected_ar(l0: complex, l1: complex) -> float:
    return amplitude_entropy((l0, l1))


def example1_sweep(cfg: Example1Config) -> FreezeReport:
    """Freezing report over the p grid, including Petz recovery residuals."""
    rep = two_qubit_u1()
    rho_0 = example1_state(*cfg.amplitudes)
    channels = [example1_channel(p) for p in cfg.p_grid]
    trajectory = [apply_channel(ch, rho_0) for ch in channels]
    # step 0 must be the initial state itself so deviations are measured from it
    trajectory = [rho_0] + trajectory
    channels = [identity_channel(4)] + channels
    return freezing_report(rep, trajectory, channels=channels)


# -- Fock-space phase reference ----------------------------------------------------


def default_fock_dim(N: int, M: int, t_max: int) -> int:
    return (2 * M + 1) * N + t_max + 2


@dataclass(frozen=True)
class Example2Config:
    N: int = 3
    M: int = 1
    amplitudes: tuple | None = None  # equal weights when omitted
    t_max: int = 2
    fock_dim: int | None = None

    def __post_init__(self):
        if self.N < 1 or self.M < 0 or self.t_max < 0:
            raise ValueError(f"need N >= 1, M >= 0, t_max >= 0; got N={self.N}, M={self.M}, t_max={self.t_max}")
        if self.amplitudes is None:
            object.__setattr__(self, "amplitudes", tuple([1 / math.sqrt(self.M + 1)] * (self.M + 1)))
        if len(self.amplitudes) != self.M + 1:
            raise ValueError(f"expected {self.M + 1} amplitudes, got {len(self.amplitudes)}")
        _weights(self.amplitudes)
        need = default_fock_dim(self.N, self.M, self.t_max)
        if self.fock_dim is None:
            object.__setattr__(self, "fock_dim", need)
        elif self.fock_dim < need:
            raise GuardBandViolation(f"fock_dim={self.fock_dim} is below the guard-band minimum {need}")


def ladder(dim: int) -> np.ndarray:
    """``A = sum_n |n><n+1|`` truncated to ``dim`` levels (no sqrt(n) factors)."""
    return np.eye(dim, k=1, dtype=np.complex128)


def example2_channel(dim: int) -> KrausChannel:
    """One covariant measurement back-action step on the truncated Fock space.

    Truncation loses 1/4 of the population sitting on the top level, so the
    channel is flagged trace decreasing with that declared deficit.
    """
    if dim < 2:
        raise ValueError(f"Fock dimension must be at least 2, got {dim}")
    a = ladder(dim)
    vac = np.zeros((dim, dim), dtype=np.complex128)
    vac[0, 0] = 1.0
    ops = (math.sqrt(0.5) * np.eye(dim), 0.5 * vac, 0.5 * a.conj().T, 0.5 * a)
    return KrausChannel(ops, trace_decreasing=True, max_trace_deficit=0.25, label="example2")


def phi(cfg: Example2Config, shift: int) -> np.ndarray:
    """``sum_m l_m |(2m+1)N + shift>``."""
    if cfg.N + shift < 0:
        raise OutOfRange(f"shift {shift} moves level N={cfg.N} below the vacuum")
    v = np.zeros(cfg.fock_dim, dtype=np.complex128)
    for m, lam in enumerate(cfg.amplitudes):
        level = (2 * m + 1) * cfg.N + shift
        if level >= cfg.fock_dim:
            raise GuardBandViolation(f"level {level} outside the truncated space of dimension {cfg.fock_dim}")
        v[level] = lam
    return v


def example2_state(cfg: Example2Config) -> DensityMatrix:
    v = phi(cfg, 0)
    return density_from_pure(v / np.linalg.norm(v))


def p_weight(n: int, t: int) -> float:
    """Probability that ``t`` steps shift the phase-reference levels by ``n``."""
    if t < 0 or abs(n) > t:
        raise OutOfRange(f"need |n| <= t and t >= 0, got n={n}, t={t}")
    total = 0.0
    for k in range(max(n, 0), (t + n) // 2 + 1):
        total += math.comb(t, k) * math.comb(t - k, k - n) * 0.5 ** (t - n + 2 * k)
    return total


def example2_closed_form(cfg: Example2Config, t: int) -> np.ndarray:
    """``sum_{n=-t}^{t} p_n(t) |phi_n><phi_n|``, valid while ``t < N``."""
    out = np.zeros((cfg.fock_dim, cfg.fock_dim), dtype=np.complex128)
    for n in range(-t, t + 1):
        v = phi(cfg, n)
        out += p_weight(n, t) * np.outer(v, v.conj())
    return out


def example2_trajectory(cfg: Example2Config) -> list[DensityMatrix]:
    channel = example2_channel(cfg.fock_dim)
    states = [example2_state(cfg)]
    for _ in range(cfg.t_max):
        nxt = apply_channel(channel, states[-1])
        if nxt.trace < 1.0 - 1e-9:
            raise TraceLoss(1.0 - nxt.trace, 1e-9)
        states.append(nxt)
    return states


def example2_expected_ar(amplitudes: Sequence[complex]) -> float:
    return amplitude_entropy(amplitudes)


def example2_run(cfg: Example2Config) -> FreezeReport:
    rep = fock_u1(cfg.fock_dim)
    trajectory = example2_trajectory(cfg)
    step = example2_channel(cfg.fock_dim)
    channels = [identity_channel(cfg.fock_dim)]
    for _ in range(cfg.t_max):
        channels.append(compose(step, channels[-1]) if len(channels) > 1 else step)
    return freezing_report(rep, trajectory, channels=channels)
