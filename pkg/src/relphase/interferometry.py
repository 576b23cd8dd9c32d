"""Mach-Zehnder readout of decomposition-dependent geometric phases.

The decomposition is encoded in an ancilla, each branch is transported
along the loop with its own parallel-transport phase, and the post-selected
output trace gives visibility and phase. Operators act on
A (x) B (x) ancilla, ancilla index fastest.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, DomainError, UndefinedPhaseError
from .geophase import BlochLoop, connection_increments, phase_distribution, wrap
from .linalg import partial_trace, partial_trace_B
from .states import projector, reconstruct


@dataclass(frozen=True)
class AncillaExtendedState:
    matrix: np.ndarray  # (4n, 4n)
    n: int

    def trace_ancilla(self) -> np.ndarray:
        return partial_trace(self.matrix, (2, 2, self.n), traced=2)


@dataclass(frozen=True)
class ParallelTransportPhases:
    thetas: np.ndarray  # (n, N+1), thetas[:, 0] == 0

    @property
    def final(self) -> np.ndarray:
        return self.thetas[:, -1]


@dataclass(frozen=True)
class InterferenceResult:
    visibility: float
    phase: float


def extend_with_ancilla(dec) -> AncillaExtendedState:
    """``sum_k |psi_k><psi_k| (x) |e_k><e_k|``."""
    dec = np.atleast_2d(np.asarray(dec, dtype=complex))
    if dec.size == 0:
        raise DomainError("cannot extend an empty decomposition")
    n = len(dec)
    m = sum(np.kron(projector(psi), projector(np.eye(n)[k])) for k, psi in enumerate(dec))
    return AncillaExtendedState(m, n)


def loop_unitary_family(loop: BlochLoop) -> np.ndarray:
    """Unitaries ``u_s = diag(1, exp(2 pi i s))`` on the loop grid, ``u_s phi_0 = phi_s``."""
    if loop.theta is None:
        raise NotImplementedError("only constant-latitude loops have a unitary family implemented")
    u = np.zeros((loop.steps + 1, 2, 2), dtype=complex)
    u[:, 0, 0] = 1.0
    u[:, 1, 1] = loop.samples[:, 1] / loop.samples[0, 1]
    return u


def parallel_transport_phases(dec, loop: BlochLoop) -> ParallelTransportPhases:
    """Cumulative connection phases per member; same segment rule as the phase integrator."""
    dec = np.atleast_2d(np.asarray(dec, dtype=complex))
    rows = []
    for k, psi in enumerate(dec):
        inc = connection_increments(partial_trace_B(projector(psi)), loop, member=k)
        rows.append(np.concatenate([[0.0], np.cumsum(inc)]))
    return ParallelTransportPhases(np.array(rows))


def transport_unitary(thetas: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``sum_k exp(i theta_k) u^dagger (x) 1_B (x) |e_k><e_k|``."""
    return np.kron(np.kron(u.conj().T, np.eye(2)), np.diag(np.exp(1j * np.asarray(thetas))))


def interference_pattern(state: AncillaExtendedState, dec, loop: BlochLoop) -> InterferenceResult:
    """Evaluate ``Tr <phi_0| U_1 rho~ |phi_0>`` on the full extended space."""
    dec = np.atleast_2d(np.asarray(dec, dtype=complex))
    if len(dec) != state.n:
        raise ContractViolation("decomposition and extended state disagree on the ancilla size")
    if np.max(np.abs(state.trace_ancilla() - reconstruct(dec))) > 1e-10:
        raise ContractViolation("extended state does not belong to this decomposition")
    u1 = loop_unitary_family(loop)[-1]
    big_u = transport_unitary(parallel_transport_phases(dec, loop).final, u1)
    out = (big_u @ state.matrix).reshape(2, 2 * state.n, 2, 2 * state.n)
    phi0 = loop.samples[0]
    z = np.trace(np.einsum("i,ijkl,k->jl", phi0.conj(), out, phi0))
    if abs(z) < 1e-12:
        raise UndefinedPhaseError("zero visibility; the interference phase is undefined")
    return InterferenceResult(float(abs(z)), wrap(np.angle(z)))


def interferometric_phase_formula(dec, loop: BlochLoop) -> InterferenceResult:
    """``Phi(sum_k |<phi_1|rho_A;k|phi_0>| exp(i gamma_k))`` with its modulus as visibility."""
    dec = np.atleast_2d(np.asarray(dec, dtype=complex))
    dist = phase_distribution(dec, loop)
    phi0, phi1 = loop.samples[0], loop.samples[-1]
    w = np.array([abs(phi1.conj() @ partial_trace_B(projector(psi)) @ phi0) for psi in dec])
    z = np.sum(w * np.exp(1j * dist.gammas))
    if abs(z) < 1e-12:
        raise UndefinedPhaseError("weighted phase factors cancel; the phase is undefined")
    return InterferenceResult(float(abs(z)), wrap(np.angle(z)))
