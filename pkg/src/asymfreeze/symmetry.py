"""Symmetry representations, G-twirling and covariance predicates."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimMismatch, NotClosed, NotUnitary, WrongVariant
from .matcore import as_matrix, check_hermitian, commutator, dagger, fro, kron
from .quantum import DensityMatrix, KrausChannel, superoperator, validate_density

UNITARY_TOL = 1e-10
MEMBERSHIP_TOL = 1e-8
CLUSTER_TOL = 1e-8
COVARIANCE_TOL = 1e-9

# k*pi/6 + 1/7, k = 0..11; the irrational offset dodges special angles
THETA_GRID = tuple(k * np.pi / 6 + 1.0 / 7.0 for k in range(12))

SIGMA_Z = np.diag([1.0, -1.0]).astype(np.complex128)
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)  # |1><0|
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |0><1|
I2 = np.eye(2, dtype=np.complex128)


class CheckResult(NamedTuple):
    passed: bool
    residual: float

    def __bool__(self) -> bool:  # lets callers write ``if is_symmetric(...)``
        return bool(self.passed)


class EigenBlock(NamedTuple):
    eigenvalue: float
    basis: np.ndarray  # orthonormal columns

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)


def eigenblocks(generator) -> list[EigenBlock]:
    """Group the eigenvectors of a Hermitian matrix by (clustered) eigenvalue."""
    n = check_hermitian(generator, "generator")
    w, v = np.linalg.eigh(n)
    blocks: list[EigenBlock] = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > CLUSTER_TOL:
            blocks.append(EigenBlock(float(np.mean(w[start:i])), v[:, start:i]))
            start = i
    return blocks


class SymmetryRep:
    """Common base of :class:`FiniteRep` and :class:`OneParameterRep`."""

    dim: int

    def twirl_matrix(self, m: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def unitaries_for_check(self) -> Sequence[np.ndarray]:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class FiniteRep(SymmetryRep):
    """A finite group given by its (closed) set of representing unitaries."""

    unitaries: tuple
    name: str = field(default="finite", compare=False)

    def __post_init__(self):
        mats = [as_matrix(u, "group element") for u in self.unitaries]
        if not mats:
            raise ValueError("a finite group needs at least one element")
        d = mats[0].shape[0]
        eye = np.eye(d)
        for u in mats:
            if u.shape != (d, d):
                raise DimMismatch(f"group element of shape {u.shape}, expected {(d, d)}")
            err = fro(dagger(u) @ u - eye)
            if err > UNITARY_TOL:
                raise NotUnitary(f"group element deviates from unitarity by {err:.3e}")
        unique: list[np.ndarray] = []
        for u in mats:
            if _index_of(unique, u) is None:
                unique.append(u)
        for a in unique:
            for b in unique:
                if _index_of(unique, a @ b) is None:
                    raise NotClosed("the set of unitaries is not closed under products")
        frozen = []
        for u in unique:
            u = u.copy()
            u.setflags(write=False)
            frozen.append(u)
        object.__setattr__(self, "unitaries", tuple(frozen))

    @property
    def dim(self) -> int:
        return self.unitaries[0].shape[0]

    @property
    def order(self) -> int:
        return len(self.unitaries)

    def twirl_matrix(self, m: np.ndarray) -> np.ndarray:
        return sum(u @ m @ dagger(u) for u in self.unitaries) / self.order

    def unitaries_for_check(self) -> Sequence[np.ndarray]:
        return self.unitaries


def _index_of(pool: list[np.ndarray], u: np.ndarray) -> int | None:
    for i, v in enumerate(pool):
        if np.max(np.abs(v - u)) <= MEMBERSHIP_TOL:
            return i
    return None


@dataclass(frozen=True, eq=False)
class OneParameterRep(SymmetryRep):
    """U(1) representation ``theta -> exp(i theta N)``."""

    generator: np.ndarray
    name: str = field(default="u1", compare=False)

    def __post_init__(self):
        n = check_hermitian(self.generator, "generator")
        n.setflags(write=False)
        object.__setattr__(self, "generator", n)

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    @cached_property
    def blocks(self) -> list[EigenBlock]:
        return eigenblocks(self.generator)

    def unitary(self, theta: float) -> np.ndarray:
        w, v = np.linalg.eigh(self.generator)
        return (v * np.exp(1j * theta * w)) @ dagger(v)

    def twirl_matrix(self, m: np.ndarray) -> np.ndarray:
        # exact Haar average over U(1): pinch onto the generator's eigenspaces
        out = np.zeros_like(m, dtype=np.complex128)
        for b in self.blocks:
            p = b.projector
            out += p @ m @ p
        return out

    def unitaries_for_check(self) -> Sequence[np.ndarray]:
        return [self.unitary(theta) for theta in THETA_GRID]


def _dim_guard(rep: SymmetryRep, dim: int) -> None:
    if rep.dim != dim:
        raise DimMismatch(f"representation acts on dimension {rep.dim}, got {dim}")


def twirl(rep: SymmetryRep, rho) -> DensityMatrix:
    rho = validate_density(rho)
    _dim_guard(rep, rho.dim)
    out = rep.twirl_matrix(rho.matrix)
    return DensityMatrix(0.5 * (out + dagger(out)), trace_deficit=rho.trace_deficit)


def is_symmetric(rep: SymmetryRep, rho, tol: float = 1e-10) -> CheckResult:
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    _dim_guard(rep, m.shape[0])
    if isinstance(rep, OneParameterRep):
        residual = fro(commutator(m, rep.generator))
    else:
        residual = max(fro(u @ m @ dagger(u) - m) for u in rep.unitaries)
    return CheckResult(residual <= tol, residual)


def is_covariant(rep: SymmetryRep, channel: KrausChannel, tol: float = COVARIANCE_TOL) -> CheckResult:
    """Check ``L(U E U^dag) = U L(E) U^dag`` on all matrix units ``E``.

    Finite groups are checked on every element; U(1) on the fixed grid
    ``THETA_GRID``. The residual is the largest Frobenius discrepancy.
    """
    _dim_guard(rep, channel.dim)
    s = superoperator(channel)
    residual = 0.0
    for u in rep.unitaries_for_check():
        su = np.kron(u, np.conj(u))
        diff = s @ su - su @ s
        residual = max(residual, float(np.max(np.linalg.norm(diff, axis=0))))
    return CheckResult(residual <= tol, residual)


def group_average_channel(rep: SymmetryRep, channel: KrausChannel) -> KrausChannel:
    """Covariant channel ``(1/|G|) sum_g U_g^dag L(U_g . U_g^dag) U_g``."""
    if not isinstance(rep, FiniteRep):
        raise WrongVariant("group averaging needs a finite representation")
    _dim_guard(rep, channel.dim)
    scale = 1.0 / np.sqrt(rep.order)
    ops = tuple(scale * dagger(u) @ k @ u for u in rep.unitaries for k in channel.kraus_ops)
    return KrausChannel(
        ops,
        tp_tolerance=channel.tp_tolerance,
        trace_decreasing=channel.trace_decreasing,
        max_trace_deficit=channel.max_trace_deficit,
        label=f"avg({channel.label})" if channel.label else "averaged",
    )


# -- built-in representations ------------------------------------------------


def two_qubit_u1() -> OneParameterRep:
    """U(1) on two qubits generated by ``sz (x) I + I (x) sz``."""
    return OneParameterRep(kron(SIGMA_Z, I2) + kron(I2, SIGMA_Z), name="two_qubit_u1")


def fock_u1(dim: int) -> OneParameterRep:
    """Phase rotations on a Fock space truncated to ``dim`` levels."""
    if dim < 1:
        raise ValueError(f"Fock dimension must be positive, got {dim}")
    return OneParameterRep(np.diag(np.arange(dim, dtype=float)), name=f"fock_u1({dim})")


def cyclic(n: int, dim: int, charges: Sequence[int]) -> FiniteRep:
    """Z_n acting as ``diag(exp(2 pi i c_j / n))`` and its powers."""
    if n < 1 or dim < 1:
        raise ValueError(f"need n >= 1 and dim >= 1, got n={n}, dim={dim}")
    charges = tuple(int(c) for c in charges)
    if len(charges) != dim:
        raise ValueError(f"expected {dim} charges, got {len(charges)}")
    phases = np.exp(2j * np.pi * np.asarray(charges) / n)
    elems = [np.diag(phases**k) for k in range(n)]
    return FiniteRep(tuple(elems), name=f"cyclic({n},{dim})")


def commutant_unitary(rep: SymmetryRep, rng: np.random.Generator) -> np.ndarray:
    """Random unitary commuting with every group element.

    Built block-diagonally on the joint eigenspaces of the representation,
    so ``rho -> V rho V^dag`` is a covariant, reversible channel.
    """
    from .quantum import random_unitary

    if isinstance(rep, OneParameterRep):
        blocks = [b.basis for b in rep.blocks]
    else:
        blocks = _joint_eigenspaces(rep)
    out = np.zeros((rep.dim, rep.dim), dtype=np.complex128)
    for basis in blocks:
        u = random_unitary(basis.shape[1], rng)
        out += basis @ u @ dagger(basis)
    return out


def _joint_eigenspaces(rep: FiniteRep) -> list[np.ndarray]:
    # generic real combination of the Hermitian parts separates the joint spectrum
    # for commuting (abelian) groups; non-abelian reps are out of scope here
    for a in rep.unitaries:
        for b in rep.unitaries:
            if fro(commutator(a, b)) > MEMBERSHIP_TOL:
                raise WrongVariant("commutant sampling is implemented for abelian groups only")
    rng = np.random.default_rng(0)
    h = np.zeros((rep.dim, rep.dim), dtype=np.complex128)
    for u in rep.unitaries:
        a, b = rng.uniform(0.5, 1.5, size=2)
        h += a * (u + dagger(u)) + 1j * b * (u - dagger(u))
    return [b.basis for b in eigenblocks(h)]
