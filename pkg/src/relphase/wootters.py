"""Entanglement-minimizing decompositions of two-qubit states.

The construction goes eigenvectors -> intermediate decomposition (via a
Takagi factorization of the spin-flip overlap matrix) -> sequential real
rotations of the members with largest and smallest preconcurrence until
every member carries the concurrence of the state.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ContractViolation, DomainError, InvariantBreach
from .linalg import takagi
from .states import (
    YY,
    concurrence,
    drop_null_members,
    mems_eigenvectors,
    mems_params,
    norms2,
    pure_concurrence,
    reconstruct,
    spectral_decomposition,
    spin_flip,
)

SEPARABLE_TOL = 1e-12
TIE_TOL = 1e-9
OVERLAP_TOL = 1e-9


@dataclass(frozen=True)
class IntermediateDecomposition:
    members: np.ndarray  # rows y_k
    tilde_overlaps: np.ndarray  # <y_k|y~_k>: +l_1, -l_2, ..., -l_n

    def overlap_matrix(self) -> np.ndarray:
        return tilde_overlap_matrix(self.members)


@dataclass(frozen=True)
class OptimalDecomposition:
    members: np.ndarray  # rows zeta_k
    concurrence: float
    trace: tuple = field(default=(), compare=False)  # preconcurrences before each rotation
    tied: bool = field(default=False, compare=False)  # a tie-break was needed

    def __len__(self) -> int:
        return len(self.members)


def tilde_overlap_matrix(dec) -> np.ndarray:
    """Matrix of ``<psi_i | psi~_j>``; complex symmetric."""
    dec = np.atleast_2d(np.asarray(dec, dtype=complex))
    return dec.conj() @ YY @ dec.conj().T


def _fix_phase(v: np.ndarray, free_phase: bool) -> np.ndarray:
    # Pivot on the first component of (near) maximal modulus. Takagi vectors
    # with nonzero singular value are fixed up to a sign; with zero singular
    # value up to an arbitrary phase.
    mags = np.abs(v)
    pivot = v[int(np.argmax(mags >= mags.max() - 1e-9))]
    if free_phase:
        return v * (abs(pivot) / pivot)
    key = pivot.real if abs(pivot.real) >= abs(pivot.imag) else pivot.imag
    return -v if key < 0 else v


def intermediate_decomposition(rho) -> IntermediateDecomposition:
    """Decomposition ``y_k`` with ``<y_i|y~_j>`` diagonal and signed (+l_1, -l_2, ...).

    Raises
    ------
    DomainError
        If ``rho`` is separable; those states never need this construction.
    """
    if concurrence(rho) <= SEPARABLE_TOL:
        raise DomainError("state is separable; no intermediate decomposition is needed")
    v = spectral_decomposition(rho)
    tak = takagi(tilde_overlap_matrix(v))
    x = tak.unitary.T @ v
    x = np.array([_fix_phase(row, d == 0.0) for row, d in zip(x, tak.singulars)])
    y = x.copy()
    y[1:] *= 1j  # flips the sign of <y|y~> because the spin flip is antilinear

    t = tilde_overlap_matrix(y)
    expected = np.concatenate([tak.singulars[:1], -tak.singulars[1:]])
    off = t - np.diag(np.diag(t))
    if np.max(np.abs(np.diag(t) - expected)) > OVERLAP_TOL or np.max(np.abs(off)) > OVERLAP_TOL:
        raise InvariantBreach("intermediate decomposition lost its diagonal overlap structure")
    return IntermediateDecomposition(y, np.diag(t).real.copy())


def preconcurrence(y) -> float:
    """``<y|y~> / <y|y>`` for a member whose spin-flip overlap is already real."""
    y = np.asarray(y, dtype=complex)
    n2 = np.vdot(y, y).real
    if n2 <= 1e-12:
        raise ContractViolation("preconcurrence of a (near) zero vector")
    ov = np.vdot(y, spin_flip(y))
    if abs(ov.imag) > 1e-9:
        raise ContractViolation(f"spin-flip overlap is not real (imaginary part {ov.imag:.3e})")
    return float(ov.real / n2)


def average_preconcurrence(dec) -> float:
    dec = np.atleast_2d(np.asarray(dec, dtype=complex))
    return float(sum(norms2(y)[0] * preconcurrence(y) for y in dec))


def _rotate(y: np.ndarray, i: int, j: int, t: float) -> None:
    c, s = np.cos(t), np.sin(t)
    yi, yj = y[i].copy(), y[j].copy()
    y[i] = c * yi + s * yj
    y[j] = -s * yi + c * yj


def _equalizing_angle(yi: np.ndarray, yj: np.ndarray, target: float) -> float:
    def excess(t):
        z = np.cos(t) * yi + np.sin(t) * yj
        return np.vdot(z, spin_flip(z)).real - target * np.vdot(z, z).real

    lo, hi = excess(0.0), excess(np.pi / 2)
    if lo <= 0.0:
        return 0.0
    if hi >= 0.0:
        return np.pi / 2
    return brentq(excess, 0.0, np.pi / 2, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def _equalize(y, active, target, trace, tied, enumerate_ties, out):
    c = {k: preconcurrence(y[k]) for k in active}
    vals = np.array([c[k] for k in active])
    trace = trace + (vals,)
    if len(active) <= 1 or np.max(np.abs(vals - target)) <= 1e-12:
        out.append((y, trace, tied))
        return
    hi, lo = vals.max(), vals.min()
    tops = [k for k in active if c[k] >= hi - TIE_TOL]
    bottoms = [k for k in active if c[k] <= lo + TIE_TOL]
    now_tied = tied or len(bottoms) > 1 or len(tops) > 1
    pairs = itertools.product(tops, bottoms) if enumerate_ties else [(tops[0], bottoms[0])]
    for i, j in pairs:
        if i == j:
            continue
        y2 = y.copy()
        _rotate(y2, i, j, _equalizing_angle(y2[i], y2[j], target))
        _equalize(y2, [k for k in active if k != i], target, trace, now_tied, enumerate_ties, out)


def _finish(rho, y, target, trace, tied) -> OptimalDecomposition:
    y = drop_null_members(y)
    if len(y) > 4:
        raise InvariantBreach("optimal decomposition has more than 4 members")
    if np.max(np.abs(reconstruct(y) - rho)) > 1e-9:
        raise InvariantBreach("optimal decomposition does not reconstruct the state")
    for k, m in enumerate(y):
        if abs(pure_concurrence(m) - target) > 1e-8:
            raise InvariantBreach(f"member {k} has concurrence {pure_concurrence(m)}, expected {target}")
    return OptimalDecomposition(y, target, trace, tied)


def optimal_decomposition(rho) -> OptimalDecomposition:
    """Decomposition whose members all have the concurrence of ``rho``.

    Ties among equal preconcurrences are broken by lowest member index, so
    the result is deterministic; ``tied`` reports whether that happened.
    """
    inter = intermediate_decomposition(rho)
    target = float(np.sum(inter.tilde_overlaps))
    out = []
    _equalize(inter.members.copy(), list(range(len(inter.members))), target, (), False, False, out)
    y, trace, tied = out[0]
    return _finish(rho, y, target, trace, tied)


def _same_ensemble(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    if len(a) != len(b):
        return False
    pb = [np.outer(v, v.conj()) for v in b]
    used = set()
    for v in a:
        p = np.outer(v, v.conj())
        hit = next((k for k, q in enumerate(pb) if k not in used and np.max(np.abs(p - q)) <= tol), None)
        if hit is None:
            return False
        used.add(hit)
    return True


def enumerate_tie_breaks(rho) -> list[OptimalDecomposition]:
    """All distinct outcomes over every admissible tie-break at every step."""
    inter = intermediate_decomposition(rho)
    target = float(np.sum(inter.tilde_overlaps))
    out = []
    _equalize(inter.members.copy(), list(range(len(inter.members))), target, (), False, True, out)
    results = []
    for y, trace, tied in out:
        dec = _finish(rho, y, target, trace, tied)
        if not any(_same_ensemble(dec.members, r.members) for r in results):
            results.append(dec)
    return results


# --- closed form for MEMS --------------------------------------------------------------


def mems_f(x: float) -> float:
    p = mems_params(x)
    return x / 2 + 1 / 3 - p.g


def mems_alpha(x: float) -> float:
    """Mixing angle in [0, pi/2] from its cosine-of-double-angle expression."""
    f = mems_f(x)
    return 0.5 * float(np.arccos(np.clip(f / (6 * f * f - 1), -1.0, 1.0)))


def mems_optimal_decomposition(x: float) -> OptimalDecomposition:
    """Closed-form optimal decomposition (zeta_1, zeta_2, zeta_3) of ``mems_state(x)``.

    On ``x >= 2/3`` the third member vanishes and is dropped.
    """
    if not 0.0 < x <= 1.0:
        raise DomainError(f"closed-form optimal decomposition needs 0 < x <= 1, got {x}")
    a = mems_alpha(x)
    plus, zero, minus = mems_eigenvectors(x)
    s, c = np.sin(a), np.cos(a)
    z1 = (s * plus - c * minus + zero) / np.sqrt(2)
    z2 = (-s * plus + c * minus + zero) / np.sqrt(2)
    z3 = c * plus + s * minus
    return OptimalDecomposition(drop_null_members(np.array([z1, z2, z3])), float(x))


def mems_member_weights(x: float) -> np.ndarray:
    """Unnormalized weights of zeta_1..zeta_3 in the entanglement-induced phase sum."""
    f2 = mems_f(x) ** 2
    return np.array([2 - 9 * f2, 2 - 9 * f2, 2 * (1 - 9 * f2)])
