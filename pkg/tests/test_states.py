import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bell_diagonal, random_density_matrix, random_unit, random_unitary
from relphase.errors import ContractViolation, DomainError, ParseError
from relphase.linalg import hermitian_eig, partial_trace_B
from relphase.states import (
    BELL_PLUS,
    concurrence,
    density_matrix,
    entanglement_of_formation,
    eof_from_concurrence,
    format_density_matrix,
    ket,
    mems_params,
    mems_spectral,
    mems_state,
    norms2,
    parse_density_matrix,
    projector,
    pure_concurrence,
    pure_entanglement,
    reconstruct,
    relative_operator,
    relative_state,
    spectral_decomposition,
    spin_flip,
)

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
PLUS = np.array([1, 1]) / np.sqrt(2)


def test_spin_flip_of_00_by_explicit_matrix():
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    expected = yy @ np.conj(ket(0, 0))
    assert np.allclose(expected, -ket(1, 1))
    assert np.allclose(spin_flip(ket(0, 0)), expected)


def test_spin_flip_bell_and_product():
    assert abs(abs(np.vdot(BELL_PLUS, spin_flip(BELL_PLUS))) - 1) <= 1e-15
    v = np.kron([1, 0], PLUS)
    assert abs(np.vdot(v, spin_flip(v))) <= 1e-15


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=8, max_size=8))
def test_spin_flip_involution_and_norm(parts):
    v = np.array(parts[:4]) + 1j * np.array(parts[4:])
    assert np.allclose(spin_flip(spin_flip(v)), v)
    assert np.isclose(np.linalg.norm(spin_flip(v)), np.linalg.norm(v))


@pytest.mark.parametrize("x", [0.0, 0.3, 2 / 3, 0.9, 1.0])
def test_concurrence_of_mems_is_x(x):
    assert abs(concurrence(mems_state(x)) - x) <= 1e-9


def test_concurrence_bell_diagonal():
    # entangled iff the top Bell weight exceeds 1/2; for Bell-diagonal states C = 2 w_max - 1
    assert abs(concurrence(bell_diagonal([0.7, 0.1, 0.1, 0.1])) - 0.4) <= 1e-12
    assert concurrence(bell_diagonal([0.5, 0.3, 0.1, 0.1])) <= 1e-12


def test_concurrence_pure_states(rng):
    for _ in range(1000):
        v = random_unit(rng, 4) * rng.uniform(0.2, 1.0)
        rho = projector(v) / np.vdot(v, v).real
        expected = abs(np.vdot(v, spin_flip(v))) / np.vdot(v, v).real
        assert abs(concurrence(rho) - expected) <= 1e-9
        assert abs(pure_concurrence(v) - expected) <= 1e-12


def test_concurrence_zero_for_products_and_separable_mixtures(rng):
    for _ in range(100):
        ps = rng.dirichlet(np.ones(4))
        rho = sum(p * projector(np.kron(random_unit(rng, 2), random_unit(rng, 2))) for p in ps)
        assert concurrence(rho) <= 1e-9


def test_concurrence_bounds(rng):
    for _ in range(300):
        c = concurrence(random_density_matrix(rng))
        assert 0.0 <= c <= 1.0


def test_eof_endpoints_and_monotone():
    assert eof_from_concurrence(0) == 0
    assert abs(eof_from_concurrence(1) - 1) <= 1e-15
    cs = np.linspace(0, 1, 101)
    assert np.all(np.diff([eof_from_concurrence(c) for c in cs]) >= 0)


def test_eof_closed_form_lower_bounds_sampled_decompositions(rng):
    rho = mems_state(0.6)
    closed = entanglement_of_formation(rho)
    spec = spectral_decomposition(rho)
    padded = np.vstack([spec, np.zeros((4 - len(spec), 4))])
    best = np.inf
    for _ in range(4000):
        dec = random_unitary(rng, 4).T @ padded
        w = norms2(dec)
        avg = sum(p * pure_entanglement(v) for p, v in zip(w, dec) if p > 1e-14)
        best = min(best, avg)
    assert best >= closed - 1e-3


def test_mems_state_endpoints():
    assert np.allclose(mems_state(0), np.diag([1 / 3, 1 / 3, 0, 1 / 3]))
    assert np.allclose(mems_state(1), projector(BELL_PLUS))
    assert mems_params(2 / 3).g == pytest.approx(1 / 3)
    eps = 1e-12
    assert np.allclose(mems_state(2 / 3 - eps), mems_state(2 / 3 + eps), atol=1e-11)


def test_mems_params_invariants():
    for x in np.linspace(0, 1, 101):
        p = mems_params(x)
        assert abs(p.p_plus + p.p_minus + p.p_zero - 1) <= 1e-14
        assert min(p.p_plus, p.p_minus, p.p_zero) >= -1e-14
        rho = mems_state(x)
        assert abs(np.trace(rho @ rho).real - (p.p_plus**2 + p.p_minus**2 + p.p_zero**2)) <= 1e-12
        density_matrix(rho)


def test_mems_state_domain():
    with pytest.raises(DomainError):
        mems_state(1.2)


def test_mems_spectral():
    one = mems_spectral(1.0)
    assert len(one) == 1 and np.allclose(one[0], 1j * BELL_PLUS)
    assert np.allclose(norms2(mems_spectral(0.0)), [1 / 3, 1 / 3, 1 / 3])
    for x in np.linspace(0, 1, 31):
        assert np.max(np.abs(reconstruct(mems_spectral(x)) - mems_state(x))) <= 1e-12


def test_spectral_decomposition_cases():
    v = np.array([0.6, 0, 0, 0.8j])
    assert len(spectral_decomposition(projector(v))) == 1
    dec = spectral_decomposition(mems_state(0.5))
    assert np.allclose(norms2(dec), [7 / 12, 1 / 3, 1 / 12])
    assert np.allclose(norms2(dec), hermitian_eig(mems_state(0.5)).eigenvalues[:3])
    mixed = spectral_decomposition(np.eye(4) / 4)
    assert len(mixed) == 4 and np.allclose(norms2(mixed), 0.25)


def test_spectral_decomposition_reconstructs(rng):
    for _ in range(100):
        rho = random_density_matrix(rng)
        assert np.max(np.abs(reconstruct(spectral_decomposition(rho)) - rho)) <= 1e-10


def _relative_operator_loops(rho, phi):
    out = np.zeros((2, 2), dtype=complex)
    for j in range(2):
        for l in range(2):
            for i in range(2):
                for k in range(2):
                    out[j, l] += np.conj(phi[i]) * rho[2 * i + j, 2 * k + l] * phi[k]
    return out


def test_relative_operator_cases(rng):
    ra, rb = random_density_matrix_2(rng), random_density_matrix_2(rng)
    phi = random_unit(rng, 2)
    got = relative_operator(np.kron(ra, rb), phi)
    assert np.allclose(got, (phi.conj() @ ra @ phi) * rb)
    assert np.allclose(relative_operator(projector(BELL_PLUS), [1, 0]), np.diag([0.5, 0]))
    rho = mems_state(0.5)
    assert np.allclose(relative_operator(rho, PLUS), _relative_operator_loops(rho, PLUS), atol=1e-15)
    with pytest.raises(ContractViolation):
        relative_operator(rho, [1, 1])


def random_density_matrix_2(rng):
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    r = g @ g.conj().T
    return r / np.trace(r).real


def test_relative_operator_is_sum_over_any_decomposition(rng):
    for _ in range(50):
        rho = random_density_matrix(rng)
        phi = random_unit(rng, 2)
        dec = random_unitary(rng, 4).T @ np.vstack(
            [spectral_decomposition(rho), np.zeros((4 - len(spectral_decomposition(rho)), 4))]
        )
        total = sum(projector(relative_state(psi, phi)) for psi in dec)
        assert np.max(np.abs(total - relative_operator(rho, phi))) <= 1e-10
        r = relative_operator(rho, phi)
        assert np.linalg.eigvalsh(r)[0] >= -1e-12 and np.trace(r).real <= 1 + 1e-12


def test_relative_state_cases(rng):
    chi = random_unit(rng, 2)
    assert np.allclose(relative_state(np.kron([1, 0], chi), [1, 0]), chi)
    a, b = random_unit(rng, 2)
    assert np.allclose(relative_state(BELL_PLUS, [a, b]), np.conj([a, b]) / np.sqrt(2))


def test_relative_state_antilinear_and_norm_identity(rng):
    for _ in range(200):
        psi = random_unit(rng, 4) * rng.uniform(0.1, 1)
        phi = random_unit(rng, 2)
        c = np.exp(1j * rng.uniform(0, 2 * np.pi))
        assert np.allclose(relative_state(psi, c * phi), np.conj(c) * relative_state(psi, phi))
        rel = relative_state(psi, phi)
        rho_a = partial_trace_B(projector(psi))
        assert abs(np.vdot(rel, rel) - phi.conj() @ rho_a @ phi) <= 1e-12


def test_text_format_round_trip():
    rho = mems_state(0.5)
    assert np.allclose(parse_density_matrix(format_density_matrix(rho)), rho, atol=1e-15)
    text = "# bell\n0.5+0i 0+0i 0+0i 0.5+0i\n0+0i 0+0i 0+0i 0+0i\n\n0+0i 0+0i 0+0i 0+0i\n0.5-0i 0+0i 0+0i 0.5+0i\n"
    assert np.allclose(parse_density_matrix(text), projector(BELL_PLUS))


def test_text_format_diagnostics():
    with pytest.raises(ParseError) as err:
        parse_density_matrix("0.5+0i 0+0i 0+0i 0.5+0i\n0+0i 0+x 0+0i 0+0i\n")
    assert err.value.line == 2 and err.value.column == 6
    with pytest.raises(ParseError, match="expected 4 entries"):
        parse_density_matrix("1+0i 0+0i 0+0i\n")
    with pytest.raises(ParseError, match="expected 4 matrix rows"):
        parse_density_matrix("1+0i 0+0i 0+0i 0+0i\n")
    not_hermitian = "0.5+0i 0.1+0i 0+0i 0+0i\n0+0i 0.5+0i 0+0i 0+0i\n" + "0+0i 0+0i 0+0i 0+0i\n" * 2
    with pytest.raises(ParseError, match="not Hermitian"):
        parse_density_matrix(not_hermitian)


def test_file_tolerance_admits_hand_typed_values():
    text = format_density_matrix(np.eye(4) / 4).replace("0.25+0i", "0.250000001+0i", 1)
    assert np.isclose(np.trace(parse_density_matrix(text)).real, 1.0)
