"""Density matrices, pure states and Kraus channels."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimMismatch, NotHermitian, NotNormalized, NotPSD, ShapeMismatch, TraceLoss, TraceNotOne
from .matcore import as_matrix, dagger, fro, hermiticity_residual

DENSITY_TOL = 1e-10
TP_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state.

    ``trace_deficit`` is nonzero only for outputs of trace-decreasing
    channels; the trace check is then ``Tr = 1 - trace_deficit``.
    """

    matrix: np.ndarray
    trace_deficit: float = 0.0

    def __post_init__(self):
        m = as_matrix(self.matrix, "density matrix")
        if m.shape[0] != m.shape[1]:
            raise ShapeMismatch(f"density matrix must be square, got {m.shape}")
        res = hermiticity_residual(m)
        if res > DENSITY_TOL:
            raise NotHermitian(f"Hermiticity residual {res:.3e} exceeds {DENSITY_TOL:.0e}")
        m = 0.5 * (m + dagger(m))
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -DENSITY_TOL:
            raise NotPSD(f"minimum eigenvalue {lo:.3e} is below -{DENSITY_TOL:.0e}")
        tr = float(np.trace(m).real)
        if abs(tr - (1.0 - self.trace_deficit)) > DENSITY_TOL:
            raise TraceNotOne(
                f"trace {tr:.12g} differs from {1.0 - self.trace_deficit:.12g} by more than {DENSITY_TOL:.0e}"
            )
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True, eq=False)
class PureStateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if a.size == 0:
            raise ShapeMismatch("empty state vector")
        norm = float(np.linalg.norm(a))
        if abs(norm - 1.0) > DENSITY_TOL:
            raise NotNormalized(f"state norm {norm:.12g} is not 1 within {DENSITY_TOL:.0e}")
        object.__setattr__(self, "amplitudes", _frozen(a))

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Operator-sum map ``rho -> sum_n K_n rho K_n^dag``.

    Trace preservation is not enforced on construction (the adjoint of a
    channel is generally not trace preserving); use :func:`validate_cptp`.
    A channel flagged ``trace_decreasing`` may lose at most
    ``max_trace_deficit`` of trace per application.
    """

    kraus_ops: tuple
    tp_tolerance: float = TP_TOL
    trace_decreasing: bool = False
    max_trace_deficit: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        ops = [as_matrix(k, "Kraus operator") for k in self.kraus_ops]
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise DimMismatch(f"Kraus operator of shape {k.shape}, expected {(d, d)}")
        object.__setattr__(self, "kraus_ops", tuple(_frozen(k) for k in ops))

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def __len__(self) -> int:
        return len(self.kraus_ops)

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        return apply_channel(self, rho)


@dataclass(frozen=True)
class CPTPReport:
    residual: float
    passed: bool
    tolerance: float
    # deficit checks only meaningful for trace-decreasing channels
    within_declared_deficit: bool
    note: str = "complete positivity holds by construction (Kraus form)"


def density_from_pure(psi) -> DensityMatrix:
    if not isinstance(psi, PureStateVector):
        psi = PureStateVector(psi)
    a = psi.amplitudes
    return DensityMatrix(np.outer(a, np.conj(a)))


def validate_density(candidate) -> DensityMatrix:
    if isinstance(candidate, DensityMatrix):
        return candidate
    return DensityMatrix(candidate)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim),), label="identity")


def apply_kraus(ops: Sequence[np.ndarray], x: np.ndarray) -> np.ndarray:
    """Raw operator-sum action on an arbitrary operator, no validation."""
    out = np.zeros_like(x, dtype=np.complex128)
    for k in ops:
        out += k @ x @ dagger(k)
    return out


def _check_dims(channel: KrausChannel, dim: int) -> None:
    if channel.dim != dim:
        raise DimMismatch(f"channel acts on dimension {channel.dim}, got {dim}")


def apply_channel(channel: KrausChannel, rho) -> DensityMatrix:
    rho = validate_density(rho)
    _check_dims(channel, rho.dim)
    out = apply_kraus(channel.kraus_ops, rho.matrix)
    out = 0.5 * (out + dagger(out))
    tr_out = float(np.trace(out).real)
    lost = rho.trace - tr_out
    if channel.trace_decreasing:
        if lost > channel.max_trace_deficit + channel.tp_tolerance:
            raise TraceLoss(lost, channel.max_trace_deficit)
        return DensityMatrix(out, trace_deficit=max(0.0, 1.0 - tr_out))
    if abs(lost) > channel.tp_tolerance:
        raise TraceLoss(lost, channel.tp_tolerance)
    # a trace-preserving channel keeps whatever deficit the input carried
    return DensityMatrix(out, trace_deficit=rho.trace_deficit)


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """``second o first``: apply ``first``, then ``second``."""
    if second.dim != first.dim:
        raise DimMismatch(f"cannot compose dimensions {second.dim} and {first.dim}")
    ops = tuple(k2 @ k1 for k2 in second.kraus_ops for k1 in first.kraus_ops)
    decreasing = second.trace_decreasing or first.trace_decreasing
    return KrausChannel(
        ops,
        tp_tolerance=max(second.tp_tolerance, first.tp_tolerance),
        trace_decreasing=decreasing,
        max_trace_deficit=min(1.0, second.max_trace_deficit + first.max_trace_deficit),
        label=f"{second.label} o {first.label}".strip(" o"),
    )


def adjoint_channel(channel: KrausChannel) -> KrausChannel:
    """Heisenberg-picture map with Kraus operators ``K_n^dag``."""
    return KrausChannel(
        tuple(dagger(k) for k in channel.kraus_ops),
        tp_tolerance=channel.tp_tolerance,
        label=f"adjoint({channel.label})" if channel.label else "",
    )


def completeness(channel: KrausChannel) -> np.ndarray:
    """``sum_n K_n^dag K_n``."""
    return sum(dagger(k) @ k for k in channel.kraus_ops)


def validate_cptp(channel: KrausChannel) -> CPTPReport:
    gap = completeness(channel) - np.eye(channel.dim)
    residual = fro(gap)
    passed = residual <= channel.tp_tolerance
    if channel.trace_decreasing:
        # I - sum K^dag K must be PSD and bounded by the declared deficit
        w = np.linalg.eigvalsh(-0.5 * (gap + dagger(gap)))
        within = bool(w[0] >= -channel.tp_tolerance and w[-1] <= channel.max_trace_deficit + channel.tp_tolerance)
    else:
        within = passed
    return CPTPReport(residual=residual, passed=passed, tolerance=channel.tp_tolerance, within_declared_deficit=within)


def superoperator(channel: KrausChannel) -> np.ndarray:
    """Matrix ``S`` with ``vec(L(X)) = S vec(X)`` for row-major ``vec``."""
    return sum(np.kron(k, np.conj(k)) for k in channel.kraus_ops)


def action_distance(a: KrausChannel, b: KrausChannel) -> float:
    """Largest Frobenius distance between the two actions over matrix units."""
    if a.dim != b.dim:
        raise DimMismatch(f"dimensions {a.dim} and {b.dim} differ")
    diff = superoperator(a) - superoperator(b)
    # column (i, j) of the superoperator is vec of the image of E_ij
    return float(np.max(np.linalg.norm(diff, axis=0)))


# -- random objects (deterministic given the Generator) ----------------------


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Hilbert-Schmidt-like random state of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = g @ dagger(g)
    return DensityMatrix(m / np.trace(m).real)


def random_cptp(dim: int, rng: np.random.Generator, env: int = 2) -> KrausChannel:
    """Random channel from a Haar-ish isometry ``C^d -> C^d (x) C^env``."""
    g = rng.standard_normal((dim * env, dim)) + 1j * rng.standard_normal((dim * env, dim))
    v, r = np.linalg.qr(g)
    v = v * (np.diag(r) / np.abs(np.diag(r)))
    ops = tuple(v[j * dim : (j + 1) * dim, :] for j in range(env))
    return KrausChannel(ops, label="random")


def basis_state(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def projector(vectors: Iterable[np.ndarray]) -> np.ndarray:
    vs = [np.asarray(v, dtype=np.complex128) for v in vectors]
    return sum(np.outer(v, np.conj(v)) for v in vs)
