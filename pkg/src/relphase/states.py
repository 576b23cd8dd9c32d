"""Two-qubit states: density matrices, decompositions, MEMS, concurrence.

A density matrix is a plain ``(4, 4)`` complex ndarray. A decomposition is a
``(n, 4)`` complex ndarray whose rows are subnormalized vectors ``psi_k`` with
``sum_k |psi_k><psi_k| = rho``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, DomainError, ParseError
from .linalg import hermitian_eig, partial_trace_A, partial_trace_B

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SIGMA_Y, SIGMA_Y).real  # purely real: antidiag(-1, 1, 1, -1)

RANK_TOL = 1e-12
STATE_TOL = 1e-10
FILE_TOL = 1e-8

BELL_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def ket(*bits: int) -> np.ndarray:
    """Computational basis vector, e.g. ``ket(0, 1)`` is |01>."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int("".join(map(str, bits)), 2)] = 1.0
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def density_matrix(m, tol: float = STATE_TOL) -> np.ndarray:
    """Validate a 4x4 density matrix and return it as a Hermitian ndarray.

    Raises
    ------
    ContractViolation
        Wrong shape, non-Hermitian, not unit trace, or not PSD beyond ``tol``.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ContractViolation(f"density matrix must be 4x4, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolation("density matrix has non-finite entries")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise ContractViolation("density matrix is not Hermitian")
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise ContractViolation(f"density matrix trace is {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(m)[0]
    if lo < -tol:
        raise ContractViolation(f"density matrix is not positive (min eigenvalue {lo:.3e})")
    return m / tr


def reconstruct(dec) -> np.ndarray:
    """``sum_k |psi_k><psi_k|`` for a decomposition given as rows."""
    dec = np.atleast_2d(np.asarray(dec, dtype=complex))
    return dec.T @ dec.conj()


def norms2(dec) -> np.ndarray:
    dec = np.atleast_2d(np.asarray(dec, dtype=complex))
    return np.sum(np.abs(dec) ** 2, axis=1)


def drop_null_members(dec, tol: float = RANK_TOL) -> np.ndarray:
    dec = np.atleast_2d(np.asarray(dec, dtype=complex))
    return dec[norms2(dec) >= tol]


def is_product(rho, tol: float = 1e-9) -> bool:
    return bool(np.max(np.abs(rho - np.kron(partial_trace_B(rho), partial_trace_A(rho)))) <= tol)


# --- spin flip, concurrence, entanglement of formation --------------------------------


def spin_flip(v) -> np.ndarray:
    """``(sigma_y x sigma_y) conj(v)``; antilinear, norm preserving."""
    return YY @ np.conj(np.asarray(v, dtype=complex))


def spin_flip_operator(rho) -> np.ndarray:
    return YY @ np.conj(rho) @ YY


def pure_concurrence(v) -> float:
    v = np.asarray(v, dtype=complex)
    n2 = np.vdot(v, v).real
    if n2 <= 0:
        raise ContractViolation("zero vector has no concurrence")
    return float(abs(np.vdot(v, spin_flip(v))) / n2)


def _psd_sqrt(rho) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def concurrence_spectrum(rho) -> np.ndarray:
    """Eigenvalues of ``rho @ rho_tilde`` as four nonnegative reals, descending.

    The square roots are obtained as singular values of
    ``sqrt(rho) @ sqrt(rho_tilde)``, whose Gram matrix is similar to
    ``rho @ rho_tilde``. This avoids the sqrt-of-rounding blowup that a
    direct non-Hermitian eigen-solve shows on (near-)zero eigenvalues.
    """
    r = _psd_sqrt(np.asarray(rho, dtype=complex))
    s = np.linalg.svd(r @ YY @ r.conj() @ YY, compute_uv=False)
    return np.sort(s)[::-1] ** 2


def concurrence(rho) -> float:
    """max(0, l1 - l2 - l3 - l4) with l_k the square roots of the spectrum above."""
    lam = np.sqrt(concurrence_spectrum(rho))
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def eof_from_concurrence(c: float) -> float:
    c = min(1.0, max(0.0, float(c)))
    return binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - c * c)))


def entanglement_of_formation(rho) -> float:
    return eof_from_concurrence(concurrence(rho))


def pure_entanglement(v) -> float:
    """Entropy (bits) of the reduced state of a pure, possibly subnormalized vector."""
    v = np.asarray(v, dtype=complex)
    rho_a = partial_trace_B(projector(v / np.linalg.norm(v)))
    w = np.clip(np.linalg.eigvalsh(rho_a), 0.0, None)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


# --- MEMS family -----------------------------------------------------------------------


@dataclass(frozen=True)
class MemsParams:
    x: float
    g: float
    p_plus: float
    p_minus: float
    p_zero: float


def mems_g(x: float) -> float:
    return 1.0 / 3.0 if x <= 2.0 / 3.0 else x / 2.0


def mems_params(x: float) -> MemsParams:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"MEMS parameter x={x} outside [0, 1]")
    g = mems_g(x)
    return MemsParams(x, g, g + x / 2, g - x / 2, 1 - 2 * g)


def mems_state(x: float) -> np.ndarray:
    """Maximally entangled mixed state with concurrence ``x``."""
    p = mems_params(x)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = p.g
    rho[1, 1] = p.p_zero
    rho[0, 3] = rho[3, 0] = x / 2
    return rho


def mems_eigenvectors(x: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Subnormalized eigenvectors (phi_plus, phi_zero, phi_minus), zero ones included."""
    p = mems_params(x)
    e00, e01, e11 = ket(0, 0), ket(0, 1), ket(1, 1)
    phi_plus = 1j * np.sqrt(p.p_plus / 2) * (e00 + e11)
    phi_minus = 1j * np.sqrt(max(p.p_minus, 0.0) / 2) * (e00 - e11)
    phi_zero = 1j * np.sqrt(max(p.p_zero, 0.0)) * e01
    return phi_plus, phi_zero, phi_minus


def mems_spectral(x: float) -> np.ndarray:
    """Analytic spectral decomposition of ``mems_state(x)``.

    At ``x = 0`` the spectrum is threefold degenerate and this fixes the
    eigenbasis to the Bell-type vectors; a generic eigensolver would not.
    """
    return drop_null_members(np.array(mems_eigenvectors(x)))


def spectral_decomposition(rho, tol: float = RANK_TOL) -> np.ndarray:
    """Rows ``sqrt(lambda_k) v_k`` for eigenvalues above ``tol``, descending."""
    eig = hermitian_eig(rho)
    keep = eig.eigenvalues > tol
    return (eig.eigenvectors[:, keep] * np.sqrt(eig.eigenvalues[keep])).T.copy()


# --- relative states -------------------------------------------------------------------


def _unit2(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (2,):
        raise ContractViolation(f"A-subsystem vector must have 2 components, got {phi.shape}")
    if abs(np.linalg.norm(phi) - 1.0) > 1e-12:
        raise ContractViolation("A-subsystem vector is not normalized")
    return phi


def relative_operator(rho, phi) -> np.ndarray:
    """``<phi| rho |phi>`` as an operator on B: the unnormalized state of B relative to phi."""
    phi = _unit2(phi)
    t = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return np.einsum("i,ijkl,k->jl", phi.conj(), t, phi)


def relative_state(psi, phi) -> np.ndarray:
    """B-vector with components ``sum_i conj(phi_i) psi_ij``; antilinear in ``phi``."""
    phi = _unit2(phi)
    return phi.conj() @ np.asarray(psi, dtype=complex).reshape(2, 2)


# --- text format -----------------------------------------------------------------------

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_ENTRY = re.compile(rf"^([+-]?{_NUM})([+-]{_NUM})i$")


def parse_complex(token: str) -> complex:
    m = _ENTRY.match(token)
    if not m:
        raise ValueError(f"malformed complex entry {token!r} (expected a+bi or a-bi)")
    return complex(float(m.group(1)), float(m.group(2)))


def parse_density_matrix(text: str, tol: float = FILE_TOL) -> np.ndarray:
    """Parse the 4-line ``a+bi`` text format and validate the result.

    Blank lines and ``#`` comments are ignored.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if len(rows) == 4:
            raise ParseError("more than 4 matrix rows", lineno)
        row = []
        for m in re.finditer(r"\S+", line):
            try:
                row.append(parse_complex(m.group()))
            except ValueError as exc:
                raise ParseError(str(exc), lineno, m.start() + 1) from None
        if len(row) != 4:
            raise ParseError(f"expected 4 entries, found {len(row)}", lineno)
        rows.append(row)
    if len(rows) != 4:
        raise ParseError(f"expected 4 matrix rows, found {len(rows)}")
    try:
        return density_matrix(np.array(rows), tol=tol)
    except ContractViolation as exc:
        raise ParseError(f"invalid density matrix: {exc}") from None


def format_density_matrix(rho) -> str:
    lines = []
    for row in np.asarray(rho, dtype=complex):
        lines.append(" ".join(f"{z.real:.17g}{z.imag:+.17g}i" for z in row))
    return "\n".join(lines) + "\n"
