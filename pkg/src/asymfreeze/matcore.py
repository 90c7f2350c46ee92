"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Everything here
is a pure function; nothing mutates its inputs.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, NonFinite, NotHermitian, NotPSD, ShapeMismatch
from .settings import get_settings

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-d complex array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite(f"{name} contains NaN or Inf entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def fro(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro"))


def hermiticity_residual(h: np.ndarray) -> float:
    """Relative anti-Hermitian part, ``||H - H^dag||_F / max(1, ||H||_F)``."""
    return fro(h - dagger(h)) / max(1.0, fro(h))


def _square(m: np.ndarray, name: str) -> None:
    if m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ShapeMismatch(f"{name} must be square and non-empty, got shape {m.shape}")


def check_hermitian(h, name: str = "matrix", tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(h, name)
    _square(m, name)
    res = hermiticity_residual(m)
    if res > tol:
        raise NotHermitian(f"{name} is not Hermitian: relative residual {res:.3e} > {tol:.0e}")
    return 0.5 * (m + dagger(m))


def eig_hermitian(h) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    m = check_hermitian(h)
    w, v = np.linalg.eigh(m)
    return HermitianEig(w, v)


def zero_threshold(eigenvalues: np.ndarray) -> float:
    scale = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    return get_settings().zero_threshold(scale)


def _reassemble(v: np.ndarray, fw: np.ndarray) -> np.ndarray:
    return (v * fw) @ dagger(v)


def func_hermitian(
    h, f: Callable[[np.ndarray], np.ndarray], support_only: bool = False
) -> np.ndarray:
    """Apply ``f`` to the spectrum of ``h`` and return ``V f(w) V^dag``.

    With ``support_only`` the eigenvalues at or below the zero threshold are
    sent to 0 instead of being passed to ``f``; that is what makes ``log`` and
    negative powers usable on singular matrices.
    """
    w, v = eig_hermitian(h)
    if support_only:
        tau = zero_threshold(w)
        keep = w > tau
        if np.any(w < -tau):
            raise DomainError(
                f"eigenvalue {w.min():.3e} is negative beyond the zero threshold {tau:.1e}"
            )
        fw = np.zeros_like(w)
        with np.errstate(all="ignore"):
            fw[keep] = f(w[keep])
    else:
        with np.errstate(all="ignore"):
            fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise DomainError("function is undefined on part of the spectrum")
    return _reassemble(v, fw)


def _checked_psd(p) -> HermitianEig:
    w, v = eig_hermitian(p)
    norm = float(np.max(np.abs(w)))
    if w[0] < -PSD_TOL * norm:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3e} below -{PSD_TOL:.0e}*||P||")
    return HermitianEig(w, v)


def sqrt_psd(p) -> np.ndarray:
    """Principal square root.

    Eigenvalues at or below the zero threshold are set to 0 first: sqrt would
    otherwise promote 1e-16 roundoff to 1e-8 entries.
    """
    w, v = _checked_psd(p)
    fw = np.where(w > zero_threshold(w), np.sqrt(np.clip(w, 0.0, None)), 0.0)
    return _reassemble(v, fw)


def pinv_sqrt(p) -> np.ndarray:
    """Square root of the Moore-Penrose pseudoinverse of a PSD matrix."""
    w, v = _checked_psd(p)
    tau = zero_threshold(w)
    fw = np.zeros_like(w)
    on = w > tau
    fw[on] = w[on] ** -0.5
    return _reassemble(v, fw)


def support_projector(p) -> np.ndarray:
    w, v = _checked_psd(p)
    on = w > zero_threshold(w)
    return v[:, on] @ dagger(v[:, on])


def kernel_projector(p) -> np.ndarray:
    """Orthogonal projector onto the numerical kernel of a PSD matrix."""
    w, v = _checked_psd(p)
    off = w <= zero_threshold(w)
    return v[:, off] @ dagger(v[:, off])


def kron(*mats) -> np.ndarray:
    out = as_matrix(mats[0])
    for m in mats[1:]:
        out = np.kron(out, as_matrix(m))
    return out


def trace_norm_distance(a, b) -> float:
    """Half the trace norm of ``a - b``."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    s = np.linalg.svd(a - b, compute_uv=False)
    return 0.5 * float(np.sum(s))
