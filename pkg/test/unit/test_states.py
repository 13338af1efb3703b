import numpy as np
import pytest

from xyz_tradeoff.exception import InvalidInput, InvalidState, NotPositive,\
    NotHermitian
from xyz_tradeoff.matcore import hermitian_eigen
from xyz_tradeoff.states import DensityMatrix, PureState, partial_trace,\
    reduce_stack, spin_flip, purity, horodecki_state, random_density,\
    random_densities, random_pure, random_pures, make_rng, basis_state,\
    bell_psi_plus, maximally_mixed, validate_stack, projectors

from .conftest import max_abs


def _qubit(label):
    m = np.zeros((2, 2))
    m[int(label), int(label)] = 1.0
    return m


def test_partial_trace_of_bell_state():
    bell = bell_psi_plus().projector()
    for keep in ('A', 'B'):
        reduced = partial_trace(bell, keep)
        assert reduced.dim == 2
        assert max_abs(reduced.matrix, np.eye(2) / 2) < 1e-15


def test_partial_trace_of_product_state():
    rho = DensityMatrix(np.kron(_qubit('0'), _qubit('1')))
    assert max_abs(partial_trace(rho, 'A').matrix, _qubit('0')) == 0
    assert max_abs(partial_trace(rho, 'B').matrix, _qubit('1')) == 0


@pytest.mark.parametrize('p', [0.0, 0.25, 0.5, 1.0])
def test_partial_trace_of_horodecki(p):
    reduced = partial_trace(horodecki_state(p), 'A')
    assert max_abs(reduced.matrix, np.diag([p / 2, 1 - p / 2])) < 1e-15


def test_partial_trace_rejects_bad_input():
    with pytest.raises(InvalidInput):
        partial_trace(maximally_mixed(2), 'A')
    with pytest.raises(InvalidInput):
        partial_trace(maximally_mixed(4), 'C')


def test_spin_flip_examples():
    flipped = spin_flip(basis_state('00').projector())
    assert max_abs(flipped, basis_state('11').projector().matrix) < 1e-15
    bell = bell_psi_plus().projector()
    assert max_abs(spin_flip(bell), bell.matrix) < 1e-15


def test_spin_flip_properties(rng):
    states = np.concatenate([random_densities(rank, 250, rng)
                             for rank in (1, 2, 3, 4)])
    flipped = spin_flip(states)
    assert max_abs(spin_flip(flipped), states) < 1e-15
    validate_stack(flipped)
    traces = np.trace(flipped, axis1=-2, axis2=-1)
    assert max_abs(traces, np.ones(len(states))) < 1e-12


def test_reduced_states_are_states(rng):
    states = random_densities(4, 500, rng)
    for keep in ('A', 'B'):
        reduced = reduce_stack(states, keep)
        assert max_abs(np.trace(reduced, axis1=-2, axis2=-1),
                       np.ones(500)) < 1e-12
        assert hermitian_eigen(reduced).eigenvalues.min() > -1e-12


def test_purity():
    assert abs(purity(basis_state('01').projector()) - 1) < 1e-15
    assert abs(purity(maximally_mixed()) - 0.25) < 1e-15
    assert abs(purity(maximally_mixed(2)) - 0.5) < 1e-15
    for p in (0.0, 0.3, 0.5, 1.0):
        assert abs(purity(horodecki_state(p)) - (p ** 2 + (1 - p) ** 2)) \
            < 1e-15


def test_purity_of_reduced_states():
    bell = bell_psi_plus().projector()
    assert abs(purity(partial_trace(bell, 'A')) - 0.5) < 1e-15
    rho = DensityMatrix(np.kron(_qubit('1'), _qubit('0')))
    assert purity(partial_trace(rho, 'B')) == 1.0


def test_horodecki_entries():
    assert max_abs(horodecki_state(1).matrix,
                   bell_psi_plus().projector().matrix) < 1e-15
    assert max_abs(horodecki_state(0).matrix,
                   basis_state('11').projector().matrix) == 0
    expected = np.zeros((4, 4))
    expected[1, 1] = expected[2, 2] = expected[1, 2] = expected[2, 1] = 0.25
    expected[3, 3] = 0.5
    assert max_abs(horodecki_state(0.5).matrix, expected) == 0


@pytest.mark.parametrize('p', [0.1, 0.33, 0.66, 0.9])
def test_horodecki_has_rank_two(p):
    values = hermitian_eigen(horodecki_state(p).matrix).eigenvalues
    assert np.sum(values > 1e-12) == 2
    assert np.sum(np.abs(values) < 1e-12) == 2


@pytest.mark.parametrize('p', [-0.1, 1.5, float('nan'), '0.5'])
def test_horodecki_rejects_bad_p(p):
    with pytest.raises(InvalidInput):
        horodecki_state(p)


def test_density_matrix_validation():
    with pytest.raises(InvalidState):
        DensityMatrix(np.eye(4))
    with pytest.raises(NotHermitian):
        DensityMatrix(_skewed())
    with pytest.raises(NotPositive):
        DensityMatrix(np.diag([1.1, -0.1, 0.0, 0.0]))
    with pytest.raises(InvalidInput):
        DensityMatrix(np.eye(3) / 3)


def _skewed():
    m = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    m[0, 1] = 0.1
    return m


def test_relaxed_defers_positivity():
    m = np.diag([1.0 + 1e-6, -1e-6, 0.0, 0.0])
    assert DensityMatrix.relaxed(m).psd_checked is False
    with pytest.raises(NotPositive):
        DensityMatrix(m)


def test_density_matrix_is_read_only():
    rho = horodecki_state(0.5)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


@pytest.mark.parametrize('rank', [1, 2, 3, 4])
def test_random_density_rank(rank, rng):
    rho = random_density(rank, rng)
    values = hermitian_eigen(rho.matrix).eigenvalues
    assert np.all(values[:4 - rank] < 1e-12)
    assert np.all(values[4 - rank:] > 1e-12)
    if rank == 1:
        assert abs(purity(rho) - 1) < 1e-12


def test_random_density_is_deterministic():
    a = random_density(3, make_rng(42)).matrix
    b = random_density(3, make_rng(42)).matrix
    assert a.tobytes() == b.tobytes()
    c = random_density(3, make_rng(42, 1)).matrix
    assert a.tobytes() != c.tobytes()


@pytest.mark.parametrize('rank', [0, 5, 2.5])
def test_random_density_rejects_rank(rank, rng):
    with pytest.raises(InvalidInput):
        random_density(rank, rng)


def test_random_pure(rng):
    psi = random_pure(rng)
    assert abs(np.sum(np.abs(psi.amplitudes) ** 2) - 1) < 1e-12
    assert abs(purity(psi.projector()) - 1) < 1e-12
    a = random_pure(make_rng(7)).amplitudes
    b = random_pure(make_rng(7)).amplitudes
    assert a.tobytes() == b.tobytes()


def test_rank_one_densities_follow_the_pure_stream():
    amps = random_pures(10, make_rng(3))
    rhos = random_densities(1, 10, make_rng(3))
    assert max_abs(projectors(amps), rhos) < 1e-14


def test_pure_state_must_be_normalized():
    with pytest.raises(InvalidInput):
        PureState([1, 1, 0, 0])
    with pytest.raises(InvalidInput):
        PureState([1, 0])


@pytest.mark.parametrize('seed', [-1, 1.5, 'x'])
def test_make_rng_rejects_bad_seeds(seed):
    with pytest.raises(InvalidInput):
        make_rng(seed)


def test_basis_state_labels():
    assert list(basis_state('10').amplitudes) == [0, 0, 1, 0]
    with pytest.raises(InvalidInput):
        basis_state('2')
