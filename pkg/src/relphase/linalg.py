"""Small dense complex linear algebra: eigensolvers, Takagi, partial traces.

Subsystem ordering is A (x) B with B the fast index, so basis state
|i_A j_B> sits at position 2*i + j.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation

ATOL = 1e-10


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # orthonormal columns

    def reassemble(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class TakagiFactorization:
    """``S = unitary @ diag(singulars) @ unitary.T`` with singulars descending."""

    unitary: np.ndarray
    singulars: np.ndarray

    def reassemble(self) -> np.ndarray:
        u = self.unitary
        return (u * self.singulars) @ u.T


def _square(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation("matrix has non-finite entries")
    return m


def hermitian_eig(h, tol: float = ATOL) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending."""
    h = _square(h)
    if np.max(np.abs(h - h.conj().T), initial=0.0) > tol:
        raise ContractViolation("matrix is not Hermitian")
    w, v = np.linalg.eigh(h)
    return HermitianEig(w[::-1].copy(), v[:, ::-1].copy())


def general_eigenvalues(m) -> np.ndarray:
    """All eigenvalues of a square (not necessarily normal) matrix."""
    return np.linalg.eigvals(_square(m))


def takagi(s, tol: float = ATOL) -> TakagiFactorization:
    """Takagi factorization of a complex symmetric matrix.

    Works through the real symmetric embedding ``[[A, B], [B, -A]]`` of
    ``S = A + iB``: an eigenvector ``(p, q)`` with eigenvalue ``d > 0``
    gives a Takagi vector ``u = p + iq`` with ``S conj(u) = d u``. Any real
    orthonormal basis of a degenerate eigenspace yields orthonormal ``u``,
    so degenerate singular values need no special care. Vectors for zero
    singular values are conjugates of the null space of ``S``.

    Parameters
    ----------
    s : (n, n) array_like
        Complex symmetric matrix.
    tol : float
        Symmetry tolerance, also used as the zero threshold for singular values.
    """
    s = _square(s)
    if np.max(np.abs(s - s.T), initial=0.0) > tol:
        raise ContractViolation("matrix is not complex symmetric")
    n = s.shape[0]
    s = 0.5 * (s + s.T)

    _, sv, wh = np.linalg.svd(s)
    zero = 1e-12 * max(1.0, sv[0] if n else 0.0)
    k = int(np.count_nonzero(sv > zero))

    a, b = s.real, s.imag
    emb = np.block([[a, b], [b, -a]])
    w, vecs = np.linalg.eigh(emb)
    top = vecs[:, ::-1][:, :k]
    u = np.empty((n, n), dtype=complex)
    u[:, :k] = top[:n] + 1j * top[n:]
    if k < n:
        u[:, k:] = wh[k:].T  # conj of null-space columns of S
    d = np.concatenate([w[::-1][:k], np.zeros(n - k)])

    # re-orthonormalize: guards against mixing of nearly degenerate +-d pairs
    q, r = np.linalg.qr(u)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return TakagiFactorization(q, d)


def partial_trace(op, dims: tuple[int, ...], traced: int) -> np.ndarray:
    """Trace subsystem ``traced`` out of an operator on a tensor product of ``dims``."""
    op = _square(op)
    total = int(np.prod(dims))
    if op.shape[0] != total:
        raise ContractViolation(f"operator of size {op.shape[0]} does not match dims {dims}")
    nsub = len(dims)
    t = op.reshape(tuple(dims) * 2)
    t = np.trace(t, axis1=traced, axis2=traced + nsub)
    keep = total // dims[traced]
    return t.reshape(keep, keep)


def partial_trace_B(p) -> np.ndarray:
    """Reduced 2x2 operator on A from a 4x4 operator on A (x) B."""
    p = np.asarray(p, dtype=complex)
    if p.shape != (4, 4):
        raise ContractViolation(f"expected a 4x4 operator, got shape {p.shape}")
    return np.einsum("ijkj->ik", p.reshape(2, 2, 2, 2))


def partial_trace_A(p) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    if p.shape != (4, 4):
        raise ContractViolation(f"expected a 4x4 operator, got shape {p.shape}")
    return np.einsum("ijil->jl", p.reshape(2, 2, 2, 2))
