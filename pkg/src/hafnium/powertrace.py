"""Power traces tr(B^k), k = 1..K, of general complex square matrices.

Two interchangeable backends: 'spectral' triangularizes by Hessenberg
reduction plus shifted QR and sums eigenvalue powers; 'charpoly' derives the
traces from the characteristic polynomial (Newton's identities, then the
linear trace recurrence). The spectral backend is the default; charpoly
exists for cross-validation and eigensolver-free environments.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import DegenerateHessenberg, EigensolverNoConvergence, NonSquare

BACKENDS = ("spectral", "charpoly")


def _prepare(B, K: int) -> np.ndarray:
    b = np.array(B, dtype=np.complex128, order="C")
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise NonSquare(f"power traces need a square matrix, got shape {b.shape}")
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    return b


def power_traces_spectral(B, K: int) -> np.ndarray:
    """Eigenvalue-based power traces; raises EigensolverNoConvergence if the
    QR iteration exhausts its sweep budget (callers may retry with the
    charpoly backend)."""
    b = _prepare(B, K)
    if b.shape[0] == 0:
        return np.zeros(K, dtype=np.complex128)
    impl = kernels.active()
    t, _, ok = impl.power_traces_spectral(b, K, impl.SWEEP_CAP_MULT)
    if not ok:
        raise EigensolverNoConvergence(
            f"QR iteration did not converge within {impl.SWEEP_CAP_MULT} * size sweeps"
        )
    return t


def power_traces_spectral_info(B, K: int):
    """(traces, sweeps): sweep count of the QR iteration, for cost auditing.

    Sweeps are reported as 0 when the active backend delegates to LAPACK.
    """
    b = _prepare(B, K)
    if b.shape[0] == 0:
        return np.zeros(K, dtype=np.complex128), 0
    impl = kernels.active()
    t, sweeps, ok = impl.power_traces_spectral(b, K, impl.SWEEP_CAP_MULT)
    if not ok:
        raise EigensolverNoConvergence(
            f"QR iteration did not converge within {impl.SWEEP_CAP_MULT} * size sweeps"
        )
    return t, sweeps


def power_traces_charpoly(B, K: int) -> np.ndarray:
    """Characteristic-polynomial power traces; raises DegenerateHessenberg if
    the recurrence produces non-finite values (never silently wrong)."""
    b = _prepare(B, K)
    if b.shape[0] == 0:
        return np.zeros(K, dtype=np.complex128)
    t, ok = kernels.active().power_traces_charpoly(b, K)
    if not ok:
        raise DegenerateHessenberg("charpoly trace recurrence produced non-finite values")
    return t


def charpoly_coefficients(B) -> np.ndarray:
    """Monic characteristic polynomial, ascending coefficients (last entry 1)."""
    b = _prepare(B, 1)
    if b.shape[0] == 0:
        return np.ones(1, dtype=np.complex128)
    return kernels.active().charpoly_coefficients(b)


def power_traces(B, K: int, backend: str = "spectral") -> np.ndarray:
    if backend == "spectral":
        return power_traces_spectral(B, K)
    if backend == "charpoly":
        return power_traces_charpoly(B, K)
    raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
