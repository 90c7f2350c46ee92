"""Entropies and asymmetry measures.

Entropic quantities are reported in units of ``log_base`` from
:mod:`asymfreeze.settings` (bits by default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConsistencyError, DimMismatch
from .matcore import as_matrix, check_hermitian, commutator, sqrt_psd, trace_norm_distance, zero_threshold
from .quantum import DensityMatrix, validate_density
from .settings import get_settings
from .symmetry import OneParameterRep, SymmetryRep, twirl

NEG_CLAMP = 1e-10
FORMS_AGREE_TOL = 1e-9


@dataclass(frozen=True)
class MeasureValue:
    value: float
    measure_id: str

    def __float__(self) -> float:
        return self.value


def _xlogx(p: np.ndarray) -> float:
    return float(np.sum(p * np.log(p)))


def _clamp(x: float) -> float:
    return 0.0 if -NEG_CLAMP <= x < 0.0 else x


def von_neumann_entropy(rho) -> float:
    rho = validate_density(rho)
    w = np.linalg.eigvalsh(rho.matrix)
    w = w[w > zero_threshold(w)]
    return _clamp(-_xlogx(w) * get_settings().log_scale)


def relative_entropy(rho, sigma) -> float:
    """``Tr rho (log rho - log sigma)``; ``inf`` when supp(rho) is not inside supp(sigma)."""
    rho = validate_density(rho)
    sigma = validate_density(sigma)
    if rho.dim != sigma.dim:
        raise DimMismatch(f"dimensions {rho.dim} and {sigma.dim} differ")
    ws, vs = np.linalg.eigh(sigma.matrix)
    tau = zero_threshold(ws)
    on = ws > tau
    # populations of rho in sigma's eigenbasis
    pops = np.real(np.einsum("ij,jk,ki->i", vs.conj().T, rho.matrix, vs))
    leak = float(np.sum(pops[~on]))
    if leak > tau:
        return math.inf
    wr = np.linalg.eigvalsh(rho.matrix)
    wr = wr[wr > zero_threshold(wr)]
    value = _xlogx(wr) - float(np.sum(pops[on] * np.log(ws[on])))
    return _clamp(value * get_settings().log_scale)


def rel_entropy_asymmetry(rep: SymmetryRep, rho, validate: bool = False) -> float:
    """Relative entropy of asymmetry via ``S(twirl(rho)) - S(rho)``.

    With ``validate`` the relative-entropy form ``S(rho || twirl(rho))`` is
    also evaluated and a :class:`ConsistencyError` raised if the two differ
    by more than 1e-9.
    """
    rho = validate_density(rho)
    tw = twirl(rep, rho)
    value = _clamp(von_neumann_entropy(tw) - von_neumann_entropy(rho))
    if validate:
        other = relative_entropy(rho, tw)
        if not abs(other - value) <= FORMS_AGREE_TOL:
            raise ConsistencyError(f"entropy-difference form {value!r} vs relative-entropy form {other!r}")
    return value


def rel_entropy_asymmetry_forms(rep: SymmetryRep, rho) -> tuple[float, float]:
    """Both closed forms: ``(S(twirl) - S(rho), S(rho || twirl))``."""
    rho = validate_density(rho)
    tw = twirl(rep, rho)
    return (
        _clamp(von_neumann_entropy(tw) - von_neumann_entropy(rho)),
        relative_entropy(rho, tw),
    )


def skew_information(rho, generator) -> float:
    """Wigner-Yanase skew information ``-1/2 Tr([sqrt(rho), N]^2)``."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    n = check_hermitian(generator, "generator")
    if m.shape != n.shape:
        raise DimMismatch(f"state shape {m.shape} vs generator shape {n.shape}")
    c = commutator(sqrt_psd(m), n)
    return _clamp(float(-0.5 * np.trace(c @ c).real))


def twirl_trace_distance(rep: SymmetryRep, rho) -> float:
    """Trace distance from ``rho`` to its twirl.

    Monotone under covariant channels because they commute with the twirl
    and the trace norm contracts under positive trace-preserving maps.
    """
    rho = validate_density(rho)
    return trace_norm_distance(rho.matrix, twirl(rep, rho).matrix)


class Measure(NamedTuple):
    measure_id: str
    evaluate: Callable[[SymmetryRep, DensityMatrix], MeasureValue]


def _ar(rep, rho):
    return MeasureValue(rel_entropy_asymmetry(rep, rho), "relative_entropy_of_asymmetry")


def _skew(rep, rho):
    return MeasureValue(skew_information(rho, rep.generator), "skew_information")


def _ttd(rep, rho):
    return MeasureValue(twirl_trace_distance(rep, rho), "twirl_trace_distance")


def measure_registry(rep: SymmetryRep, extra: bool = False) -> list[Measure]:
    """Asymmetry measures applicable to ``rep``.

    Skew information needs a generator, so it is only registered for U(1)
    representations. ``extra`` adds the trace distance to the twirl.
    """
    out = [Measure("relative_entropy_of_asymmetry", _ar)]
    if isinstance(rep, OneParameterRep):
        out.append(Measure("skew_information", _skew))
    if extra:
        out.append(Measure("twirl_trace_distance", _ttd))
    return out
