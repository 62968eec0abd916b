"""Dense complex Hermitian linear algebra.

Everything downstream (constraint assembly, the SDP solver boundary, the
rank-1 extraction step) works with small dense Hermitian matrices, so the
routines here favour clarity and reproducibility over asymptotic tricks:
the eigensolver is a cyclic Jacobi iteration applied directly to the
complex matrix, and the real symmetric embedding is provided so a
real-cone solver can process complex problems.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, HermitianViolationError

# Absolute tolerance of the conjugate-symmetry invariant.
HERMITIAN_ATOL = 1e-12

# Eigenvalue lower bound for the PSD test, relative to ||A||.
PSD_RTOL = 1e-9


def check_hermitian(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate conjugate symmetry and return the matrix as a complex array.

    Raises HermitianViolationError if ``a`` is not square, has a
    conjugate-symmetry defect larger than ``atol`` or a diagonal imaginary
    part larger than ``atol``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise HermitianViolationError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(float))):
        raise HermitianViolationError("matrix has non-finite entries")
    defect = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if defect > 2 * atol:
        raise HermitianViolationError(f"conjugate-symmetry defect {defect:.3e} > {atol:.1e}")
    diag_imag = np.max(np.abs(np.diagonal(a).imag)) if a.size else 0.0
    if diag_imag > atol:
        raise HermitianViolationError(f"diagonal imaginary part {diag_imag:.3e} > {atol:.1e}")
    return a


def hermitize(a: np.ndarray) -> np.ndarray:
    """Average away floating-point asymmetry: (A + A^H)/2."""
    a = np.asarray(a, dtype=complex)
    return 0.5 * (a + a.conj().T)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (real, descending) and unit-norm eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Zero a[p, q] with a unitary two-sided rotation, updating a and v."""
    apq = a[p, q]
    absa = abs(apq)
    app = a[p, p].real
    aqq = a[q, q].real
    # Phase so that the pivot becomes real, then a classical real rotation.
    u = apq / absa
    tau = (aqq - app) / (2.0 * absa)
    if tau == 0.0:
        t = 1.0
    else:
        t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau))
    c = 1.0 / np.hypot(1.0, t)
    s = t * c
    u2 = np.array([[c, s], [-s * np.conj(u), c * np.conj(u)]], dtype=complex)
    idx = [p, q]
    a[:, idx] = a[:, idx] @ u2
    a[idx, :] = u2.conj().T @ a[idx, :]
    v[:, idx] = v[:, idx] @ u2
    # By construction; clean up round-off explicitly.
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diagonal(a))
    return float(np.linalg.norm(off))


def eig_hermitian(
    a: np.ndarray,
    rtol: float = 1e-12,
    max_sweeps: int = 100,
) -> EigenDecomposition:
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi.

    Sweeps stop when the off-diagonal Frobenius norm drops below
    ``rtol * ||A||_F``. Values are returned in descending order with the
    matching unit-norm eigenvector columns.
    """
    a = check_hermitian(a)
    n = a.shape[0]
    if n == 0:
        raise HermitianViolationError("empty matrix")
    work = a.copy()
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(work)
    if norm == 0.0:
        values = np.zeros(n)
        return EigenDecomposition(values=values, vectors=v)
    thresh = rtol * norm
    converged = _offdiag_norm(work) <= thresh
    for _ in range(max_sweeps):
        if converged:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(work[p, q]) > thresh / max(n, 1) * 1e-3:
                    _jacobi_rotate(work, v, p, q)
        converged = _offdiag_norm(work) <= thresh
    if not converged:
        raise ConvergenceError(f"Jacobi did not converge within {max_sweeps} sweeps")
    values = np.diagonal(work).real.copy()
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values=values[order], vectors=v[:, order])


def real_embed(a: np.ndarray) -> np.ndarray:
    """Map a Hermitian matrix to its 2n x 2n real symmetric embedding.

    T(A) = [[Re A, -Im A], [Im A, Re A]].  T preserves positive
    semidefiniteness in both directions, and
    tr(T(A) T(X)) = 2 Re tr(A X).
    """
    a = check_hermitian(a)
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def complex_from_embed(x: np.ndarray) -> np.ndarray:
    """Recover a Hermitian matrix from a real symmetric 2n x 2n matrix.

    Inverse of :func:`real_embed` on structured inputs; for a general
    symmetric matrix it averages the two embedded copies, which preserves
    positive semidefiniteness and trace functionals.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape[0] % 2:
        raise ValueError(f"expected an even-sided square matrix, got {x.shape}")
    n = x.shape[0] // 2
    re = 0.5 * (x[:n, :n] + x[n:, n:])
    im = 0.5 * (x[n:, :n] - x[:n, n:])
    return hermitize(re + 1j * im)


def trace_inner(a: np.ndarray, x: np.ndarray) -> float:
    """Re tr(A X) for equally sized square matrices."""
    a = np.asarray(a, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if a.shape != x.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {x.shape}")
    # tr(AX) = sum_ij A[i, j] X[j, i]
    return float(np.sum(a * x.T).real)


def is_psd(a: np.ndarray, rtol: float = PSD_RTOL) -> bool:
    """Eigenvalue PSD test with floating-point slack rtol * ||A||."""
    a = check_hermitian(a)
    norm = np.linalg.norm(a)
    values = eig_hermitian(a).values
    return bool(np.all(values >= -rtol * max(norm, 1e-300)))
