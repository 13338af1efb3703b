"""
Two-qubit states in the |00>, |01>, |10>, |11> basis (qubit A is the left
tensor factor). Single states are wrapped in DensityMatrix / PureState;
the batch helpers work on plain numpy stacks of shape (..., 4, 4).
"""
import numbers

import numpy as np

from xyz_tradeoff.exception import InvalidInput, InvalidState, NotPositive,\
    NotHermitian
from xyz_tradeoff.matcore import as_matrix, hermitian_eigen,\
    hermitian_deviation, trace_product, HERMITIAN_TOL

TRACE_TOL = 1e-10
PSD_FLOOR = 1e-9
NORM_TOL = 1e-12
IMAG_TOL = 1e-12

BASIS_LABELS = ('00', '01', '10', '11')
SUBSYSTEMS = ('A', 'B')

IDENTITY2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)


def validate_stack(matrices, check_psd=True):
    """
    Check a matrix or stack of matrices against the density-matrix contract:
    Hermitian within 1e-10, unit trace within 1e-10 and, unless check_psd
    is False, smallest eigenvalue >= -1e-9.
    """
    m = as_matrix(matrices, 'density matrix')
    if m.shape[-1] not in (2, 4):
        raise InvalidInput("Density matrices must be 2x2 or 4x4, got %dx%d"
                           % m.shape[-2:])
    deviation = float(np.max(hermitian_deviation(m)))
    if deviation > HERMITIAN_TOL:
        raise NotHermitian(deviation, HERMITIAN_TOL)
    drift = float(np.max(np.abs(np.trace(m, axis1=-2, axis2=-1) - 1.0)))
    if drift > TRACE_TOL:
        raise InvalidState("Trace differs from 1 by %.3e" % drift)
    if check_psd:
        lowest = float(hermitian_eigen(m).eigenvalues.min())
        if lowest < -PSD_FLOOR:
            raise NotPositive(lowest, PSD_FLOOR)
    return m


class DensityMatrix(object):

    def __init__(self, matrix, check_psd=True):
        m = validate_stack(matrix, check_psd=check_psd)
        if m.ndim != 2:
            raise InvalidInput("DensityMatrix holds a single matrix; use "
                               "validate_stack for stacks")
        m = m.copy()
        m.setflags(write=False)
        self._matrix = m
        self.psd_checked = check_psd

    @classmethod
    def relaxed(cls, matrix):
        # Deferred PSD check, for integrator output between validations.
        return cls(matrix, check_psd=False)

    @property
    def matrix(self):
        return self._matrix

    @property
    def dim(self):
        return self._matrix.shape[0]

    def __getitem__(self, idx):
        return self._matrix[idx]

    def __repr__(self):
        return 'DensityMatrix(dim=%d, purity=%.6f)' % (self.dim,
                                                       purity(self))


class PureState(object):

    def __init__(self, amplitudes):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if amps.shape != (4,):
            raise InvalidInput("A two-qubit pure state has 4 amplitudes, "
                               "got shape %s" % (amps.shape,))
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidInput("State is not normalized: sum |a|^2 = %.15f"
                               % norm)
        amps.setflags(write=False)
        self._amplitudes = amps

    @property
    def amplitudes(self):
        return self._amplitudes

    def projector(self):
        return DensityMatrix(np.outer(self._amplitudes,
                                      np.conj(self._amplitudes)))

    def __repr__(self):
        return 'PureState(%s)' % ', '.join('%.6g%+.6gj' % (a.real, a.imag)
                                           for a in self._amplitudes)


def matrices_of(rho):
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return as_matrix(rho, 'density matrix')


def _check_subsystem(keep):
    if keep not in SUBSYSTEMS:
        raise InvalidInput("Subsystem must be 'A' or 'B', got %r" % (keep,))


def reduce_stack(matrices, keep):
    """Partial trace over a stack of 4x4 matrices, returning 2x2 matrices."""
    _check_subsystem(keep)
    m = matrices_of(matrices)
    if m.shape[-1] != 4:
        raise InvalidInput("Partial trace needs 4x4 input, got %dx%d" %
                           m.shape[-2:])
    t = m.reshape(m.shape[:-2] + (2, 2, 2, 2))
    if keep == 'A':
        return np.einsum('...abcb->...ac', t)
    return np.einsum('...abad->...bd', t)


def partial_trace(rho, keep):
    return DensityMatrix(reduce_stack(rho, keep),
                         check_psd=getattr(rho, 'psd_checked', True))


def spin_flip(rho):
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y), for one matrix or a stack."""
    m = matrices_of(rho)
    if m.shape[-1] != 4:
        raise InvalidInput("Spin flip needs 4x4 input, got %dx%d" %
                           m.shape[-2:])
    return np.matmul(np.matmul(SIGMA_YY, np.conj(m)), SIGMA_YY)


def purity(rho):
    m = matrices_of(rho)
    value = trace_product(m, m)
    leak = float(np.max(np.abs(value.imag)))
    if leak > IMAG_TOL:
        raise InvalidState("tr(rho^2) has imaginary part %.3e" % leak)
    if np.ndim(value) == 0:
        return float(value.real)
    return value.real


def basis_state(label):
    if label not in BASIS_LABELS:
        raise InvalidInput("Unknown basis label %r; expected one of %s" %
                           (label, ', '.join(BASIS_LABELS)))
    amps = np.zeros(4, dtype=np.complex128)
    amps[BASIS_LABELS.index(label)] = 1.0
    return PureState(amps)


def bell_psi_plus():
    return PureState(np.array([0, 1, 1, 0]) / np.sqrt(2.0))


def maximally_mixed(dim=4):
    if dim not in (2, 4):
        raise InvalidInput("dim must be 2 or 4, got %r" % (dim,))
    return DensityMatrix(np.eye(dim, dtype=np.complex128) / dim)


def check_probability(name, value):
    if not isinstance(value, numbers.Real) or not 0.0 <= value <= 1.0:
        raise InvalidInput("%s must lie in [0, 1], got %r" % (name, value))
    return float(value)


def horodecki_state(p):
    """
    p |Psi+><Psi+| + (1 - p) |11><11| with |Psi+> = (|01> + |10>)/sqrt(2).
    """
    p = check_probability('p', p)
    m = np.zeros((4, 4), dtype=np.complex128)
    m[1, 1] = m[2, 2] = m[1, 2] = m[2, 1] = p / 2.0
    m[3, 3] = 1.0 - p
    return DensityMatrix(m)


def make_rng(seed, index=None):
    """
    Counter-based Philox generator keyed by seed, or by (seed, index) for
    an independent task of a parallel job. index may be an integer or a
    tuple of integers.
    """
    if index is None:
        key = [seed]
    elif isinstance(index, tuple):
        key = [seed] + list(index)
    else:
        key = [seed, index]
    for k in key:
        if not isinstance(k, numbers.Integral) or k < 0:
            raise InvalidInput("Seeds must be non-negative integers, got %r"
                               % (k,))
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence([int(k) for k in key])))


def _complex_gaussian(rng, shape):
    return (rng.standard_normal(shape) +
            1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def check_rank(rank):
    if not isinstance(rank, numbers.Integral) or not 1 <= rank <= 4:
        raise InvalidInput("rank must be an integer in 1..4, got %r" %
                           (rank,))
    return int(rank)


def random_densities(rank, count, rng):
    """
    count Ginibre states G G^H / tr(G G^H), G 4 x rank, as a (count, 4, 4)
    stack.
    """
    rank = check_rank(rank)
    g = _complex_gaussian(rng, (count, 4, rank))
    m = np.matmul(g, np.conj(np.swapaxes(g, -1, -2)))
    m /= np.trace(m, axis1=-2, axis2=-1).real[:, None, None]
    return 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))


def random_density(rank, rng):
    return DensityMatrix(random_densities(rank, 1, rng)[0])


def random_pures(count, rng):
    """count normalized Gaussian amplitude vectors, shape (count, 4)."""
    amps = _complex_gaussian(rng, (count, 4))
    return amps / np.linalg.norm(amps, axis=-1, keepdims=True)


def random_pure(rng):
    return PureState(random_pures(1, rng)[0])


def projectors(amplitudes):
    amps = np.asarray(amplitudes, dtype=np.complex128)
    return amps[..., :, None] * np.conj(amps[..., None, :])
