"""Relative-state geometric phases along loops of A-subsystem states.

Loop integrals of the connection ``Im <phi|rho|dphi> / <phi|rho|phi>`` are
discretized segment by segment as ``arg <phi_j|rho|phi_{j+1}>``. This is
second-order accurate in the step and exactly invariant under a change of
gauge of the samples: the phases picked up by the segments telescope against
the endpoint overlap term.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, DomainError, UndefinedPhaseError
from .linalg import partial_trace_B
from .states import BELL_PLUS, concurrence, mems_params, norms2, projector, spectral_decomposition
from .wootters import SEPARABLE_TOL, mems_alpha, mems_member_weights, mems_optimal_decomposition, optimal_decomposition

NODAL_TOL = 1e-12
DEFAULT_STEPS = 4096


def wrap(angle):
    """Map angles to the principal branch (-pi, pi]."""
    a = np.mod(np.asarray(angle, dtype=float) + np.pi, 2 * np.pi) - np.pi
    a = np.where(a == -np.pi, np.pi, a)
    return float(a) if np.ndim(a) == 0 else a


@dataclass(frozen=True)
class BlochLoop:
    """Samples ``phi_j`` at ``s = j/N``, ``j = 0..N``; rows are unit 2-vectors."""

    samples: np.ndarray
    closed: bool = True
    theta: float | None = None  # polar angle when the loop is a constant-latitude circle

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 2 or s.shape[1] != 2 or len(s) < 3:
            raise ContractViolation("loop samples must be an (N+1, 2) array with N >= 2")
        if np.max(np.abs(np.linalg.norm(s, axis=1) - 1.0)) > 1e-12:
            raise ContractViolation("loop samples must be unit vectors")
        if self.closed and not np.array_equal(s[0], s[-1]):
            raise ContractViolation("closed loop must end on its starting representative")
        object.__setattr__(self, "samples", s)

    @property
    def steps(self) -> int:
        return len(self.samples) - 1

    @property
    def s(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, len(self.samples))

    def reversed(self) -> "BlochLoop":
        return BlochLoop(self.samples[::-1].copy(), self.closed, self.theta)

    def regauged(self, chi) -> "BlochLoop":
        """Multiply sample j by ``exp(i chi_j)``; keeps closure if ``chi_0 == chi_N``."""
        chi = np.asarray(chi, dtype=float)
        samples = self.samples * np.exp(1j * chi)[:, None]
        if self.closed:
            samples[-1] = samples[0]
        return BlochLoop(samples, self.closed, self.theta)


def bloch_vector(theta, azimuth) -> np.ndarray:
    theta, azimuth = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(azimuth, dtype=float))
    return np.stack([np.cos(theta / 2) + 0j, np.exp(1j * azimuth) * np.sin(theta / 2)], axis=-1)


def loop_constant_latitude(theta: float, steps: int = DEFAULT_STEPS) -> BlochLoop:
    """Circle at polar angle ``theta``, azimuth increasing from 0 to 2 pi."""
    if not 0.0 < theta < np.pi:
        raise DomainError(f"constant-latitude loop degenerates at theta={theta}")
    if steps < 8:
        raise ContractViolation("a loop needs at least 8 steps")
    samples = bloch_vector(theta, 2 * np.pi * np.arange(steps + 1) / steps)
    samples[-1] = samples[0]
    return BlochLoop(samples, True, float(theta))


def loop_from_angles(theta, azimuth) -> BlochLoop:
    """Closed loop through the given Bloch angles; the last point is snapped to the first."""
    samples = bloch_vector(theta, azimuth)
    samples[-1] = samples[0]
    return BlochLoop(samples, True)


# --- pure-state phases -----------------------------------------------------------------


def _reduced(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (4,):
        raise ContractViolation(f"expected a 4-component vector, got shape {psi.shape}")
    return partial_trace_B(projector(psi))


def _check_nodes(rho_a, loop: BlochLoop, member=None) -> None:
    phi = loop.samples
    diag = np.einsum("ji,ik,jk->j", phi.conj(), rho_a, phi).real
    if np.min(diag) < NODAL_TOL:
        raise UndefinedPhaseError(
            f"loop passes a node of the relative state (<phi|rho_A|phi> = {np.min(diag):.3e})", member
        )


def connection_increments(rho_a, loop: BlochLoop, member=None) -> np.ndarray:
    """Per-segment ``arg <phi_j|rho_A|phi_{j+1}>``, the discretized connection."""
    _check_nodes(rho_a, loop, member)
    phi = loop.samples
    return np.angle(np.einsum("ji,ik,jk->j", phi[:-1].conj(), rho_a, phi[1:]))


def reduced_state_phase(rho_a, loop: BlochLoop, member=None) -> float:
    """``arg <phi_1|rho_A|phi_0> + Im oint <phi|rho_A|dphi>/<phi|rho_A|phi>``, wrapped."""
    phi = loop.samples
    inc = connection_increments(rho_a, loop, member)
    end = np.angle(phi[-1].conj() @ rho_a @ phi[0])
    return wrap(end + np.sum(inc))


def pure_relative_phase(psi, loop: BlochLoop, member=None) -> float:
    """Geometric phase of the path of relative states of ``psi`` along ``loop``."""
    return reduced_state_phase(_reduced(psi), loop, member)


def pure_relative_phase_overlaps(psi, loop: BlochLoop) -> float:
    """Same phase, built from overlaps of the relative states themselves.

    ``arg <psi(phi_0)|psi(phi_1)> - Im oint <psi(phi)|d psi(phi)> / <psi(phi)|psi(phi)>``
    """
    psi = np.asarray(psi, dtype=complex).reshape(2, 2)
    rel = loop.samples.conj() @ psi  # row j: relative state of psi w.r.t. phi_j
    n2 = np.sum(np.abs(rel) ** 2, axis=1)
    if np.min(n2) < NODAL_TOL:
        raise UndefinedPhaseError("loop passes a node of the relative state")
    inc = np.angle(np.sum(rel[:-1].conj() * rel[1:], axis=1))
    end = np.angle(np.vdot(rel[0], rel[-1]))
    return wrap(end - np.sum(inc))


def base_loop_phase(loop: BlochLoop) -> float:
    """Geometric phase of the loop itself, minus the Bell-state relative phase."""
    return wrap(-pure_relative_phase(BELL_PLUS, loop))


# --- distributions and first moments ---------------------------------------------------


@dataclass(frozen=True)
class PhaseDistribution:
    gammas: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.gammas)

    def __iter__(self):
        return iter(zip(self.gammas, self.weights))


@dataclass(frozen=True)
class GeometricPhaseResult:
    phase: float
    modulus: float


def phase_distribution(dec, loop: BlochLoop) -> PhaseDistribution:
    dec = np.atleast_2d(np.asarray(dec, dtype=complex))
    gammas = np.array([pure_relative_phase(psi, loop, member=k) for k, psi in enumerate(dec)])
    return PhaseDistribution(gammas, norms2(dec))


def first_moment_phase(dist: PhaseDistribution) -> GeometricPhaseResult:
    z = np.sum(np.asarray(dist.weights) * np.exp(1j * np.asarray(dist.gammas)))
    if abs(z) < 1e-12:
        raise UndefinedPhaseError("weighted phase factors cancel; the phase is undefined")
    return GeometricPhaseResult(wrap(np.angle(z)), float(abs(z)))


def decomposition_phase(dec, loop: BlochLoop) -> GeometricPhaseResult:
    return first_moment_phase(phase_distribution(dec, loop))


def correlation_induced_phase(rho, loop: BlochLoop) -> GeometricPhaseResult:
    """First-moment phase over the spectral decomposition of ``rho``.

    With a degenerate spectrum the eigenbasis, and hence this phase, is not
    unique; the eigensolver's basis is used as is.
    """
    return decomposition_phase(spectral_decomposition(rho), loop)


def entanglement_induced_phase(rho, loop: BlochLoop) -> GeometricPhaseResult:
    """First-moment phase over the entanglement-minimizing decomposition.

    Separable states return phase 0 with unit modulus without decomposing.
    """
    if concurrence(rho) <= SEPARABLE_TOL:
        return GeometricPhaseResult(0.0, 1.0)
    return decomposition_phase(optimal_decomposition(rho).members, loop)


# --- MEMS closed forms -----------------------------------------------------------------


def mems_gamma_analytic(x: float, gamma_loop: float) -> GeometricPhaseResult:
    """Correlation-induced phase of ``mems_state(x)`` given the loop's own phase."""
    g = mems_params(x).g
    z = 1 - 2 * g + 2 * g * np.exp(-1j * gamma_loop)
    if abs(z) < 1e-12:
        raise UndefinedPhaseError("MEMS phase factors cancel; the phase is undefined")
    return GeometricPhaseResult(wrap(np.angle(z)), float(abs(z)))


def mems_gamma_E_closed_form(x: float, loop: BlochLoop, member_phases=None) -> GeometricPhaseResult:
    """Entanglement-induced MEMS phase from the closed-form member weights.

    ``member_phases`` defaults to integrating the closed-form members.
    """
    if x == 0.0:
        return GeometricPhaseResult(0.0, 1.0)
    w = mems_member_weights(x)
    if member_phases is None:
        zetas = mems_optimal_decomposition(x).members
        member_phases = [pure_relative_phase(z, loop, member=k) for k, z in enumerate(zetas)]
    w = w[: len(member_phases)] / np.sum(w)
    return first_moment_phase(PhaseDistribution(np.asarray(member_phases), w))


def mems_schmidt_ratio(x: float, k: int, reading: str = "literal") -> tuple[float, float]:
    """``(mu_k, nu_k)`` of the A-side Schmidt vector of closed-form member ``k`` (1-based).

    The closed-form ratio expression, evaluated with the |01> eigenvalue as
    its undefined population, equals ``tan(2 vartheta)`` where ``vartheta`` is
    the angle of the reduced state's dominant eigenvector. ``reading="literal"``
    takes the expression as ``nu/mu`` itself; ``reading="double-angle"`` takes
    it as ``tan(2 vartheta)`` and recovers ``nu/mu = tan(vartheta)``.
    """
    if k == 3:
        return 1.0, 0.0
    if k not in (1, 2):
        raise ContractViolation(f"member index must be 1, 2 or 3, got {k}")
    if reading not in ("literal", "double-angle"):
        raise ContractViolation(f"unknown reading {reading!r}")
    p = mems_params(x)
    a = mems_alpha(x)
    num = np.sqrt(2 * p.p_zero) * (np.sqrt(p.p_plus) * np.sin(a) + np.sqrt(max(p.p_minus, 0.0)) * np.cos(a))
    den = p.p_zero - np.sqrt(p.p_plus * max(p.p_minus, 0.0)) * np.sin(2 * a)
    if reading == "double-angle":
        angle = np.arctan2(num, den) / 2
    else:
        angle = np.arctan2(num, den) if den == 0.0 else np.arctan(num / den)
    if k == 2:
        angle = -angle
    return float(np.cos(angle)), float(np.sin(angle))


def mems_member_phase_closed_form(x: float, k: int, loop: BlochLoop, reading: str = "literal") -> float:
    """Phase of closed-form member ``k`` via the complex-plane contour integral.

    The loop is mapped to ``z_s = phi_s[1] / phi_s[0]`` and the integrand is
    ``Im [a P dP* + b Q dQ*] / (a|P|^2 + b|Q|^2)`` with
    ``P = mu + nu z*``, ``Q = -nu + mu z*`` and Schmidt weights
    ``a, b = 1 +- sqrt(1 - x^2)``; segments are discretized exactly as in
    :func:`pure_relative_phase`.
    """
    if not 0.0 < x < 1.0:
        raise DomainError(f"closed-form member phase needs 0 < x < 1, got {x}")
    phi = loop.samples
    if np.min(np.abs(phi[:, 0])) < 1e-9:
        raise DomainError("loop passes through the pole where z is infinite")
    z = phi[:, 1] / phi[:, 0]
    mu, nu = mems_schmidt_ratio(x, k, reading)
    r = np.sqrt(1 - x * x)
    a, b = 1 + r, 1 - r
    pp = mu + nu * z.conj()
    qq = -nu + mu * z.conj()
    if np.min(a * np.abs(pp) ** 2 + b * np.abs(qq) ** 2) < NODAL_TOL:
        raise UndefinedPhaseError("loop passes a node of the relative state", k)
    inc = np.angle(a * pp[:-1] * pp[1:].conj() + b * qq[:-1] * qq[1:].conj())
    end = 0.0 if loop.closed else np.angle(a * pp[0] * pp[-1].conj() + b * qq[0] * qq[-1].conj())
    return wrap(np.sum(inc) - end)
