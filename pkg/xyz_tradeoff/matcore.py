"""
Dense complex matrix kernel.

Every function accepts a single square matrix of shape (n, n) or a stack of
them with shape (..., n, n) and works elementwise over the leading axes.
Matrices are numpy complex128 arrays throughout.
"""
from collections import namedtuple

import numpy as np

from xyz_tradeoff.debug import debug
from xyz_tradeoff.exception import InvalidInput, NotHermitian, NotPositive,\
    EigenNonConvergence, InvariantViolation

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
JACOBI_TOL = 1e-13
SVD_TOL = 1e-14
MAX_SWEEPS = 100
# Off-diagonal magnitudes at or below this are treated as zero.
TINY = 1e-280

EigenDecomposition = namedtuple('EigenDecomposition',
                                ['eigenvalues', 'eigenvectors'])


def as_matrix(a, name='matrix'):
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2] or m.shape[-1] == 0:
        raise InvalidInput("%s must be square, got shape %s" %
                           (name, m.shape))
    if not np.all(np.isfinite(m)):
        raise InvalidInput("%s has non-finite entries" % name)
    return m


def _check_same_shape(a, b):
    if a.shape[-2:] != b.shape[-2:]:
        raise InvalidInput("Dimension mismatch: %dx%d vs %dx%d" %
                           (a.shape[-2], a.shape[-1],
                            b.shape[-2], b.shape[-1]))


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_deviation(a):
    """Max |a_ij - conj(a_ji)|, per matrix for stacks."""
    a = np.asarray(a)
    return np.abs(a - dagger(a)).max(axis=(-2, -1))


def multiply(a, b):
    a = as_matrix(a, 'left operand')
    b = as_matrix(b, 'right operand')
    _check_same_shape(a, b)
    return np.matmul(a, b)


def trace_product(a, b):
    """
    tr(a b) computed as sum_ij a_ij b_ji, without forming the product.
    """
    a = as_matrix(a, 'left operand')
    b = as_matrix(b, 'right operand')
    _check_same_shape(a, b)
    return np.einsum('...ij,...ji->...', a, b)


def _rotation(app, aqq, apq, live=None):
    # Complex Jacobi rotation W = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    # with apq = |apq| e^{i phi}; (W^H A W)_pq vanishes. Matrices outside
    # live, or with |apq| <= TINY, get the identity.
    mag = np.abs(apq)
    active = mag > TINY
    if live is not None:
        active &= live
    safe = np.where(active, mag, 1.0)
    phase = np.divide(apq, safe, out=np.ones_like(apq), where=active)
    tau = np.where(active, (aqq - app) / (2.0 * safe), 0.0)
    t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    return c, s, np.conj(phase), active


def _rotate_columns(m, p, q, c, s, conj_phase):
    col_p = m[:, :, p].copy()
    col_q = m[:, :, q].copy()
    m[:, :, p] = c[:, None] * col_p - (s * conj_phase)[:, None] * col_q
    m[:, :, q] = s[:, None] * col_p + (c * conj_phase)[:, None] * col_q


def _rotate_rows(m, p, q, c, s, conj_phase):
    row_p = m[:, p, :].copy()
    row_q = m[:, q, :].copy()
    phase = np.conj(conj_phase)
    m[:, p, :] = c[:, None] * row_p - (s * phase)[:, None] * row_q
    m[:, q, :] = s[:, None] * row_p + (c * phase)[:, None] * row_q


def _off_norm(m):
    n = m.shape[-1]
    off = m * (1.0 - np.eye(n))
    return np.sqrt((np.abs(off) ** 2).sum(axis=(-2, -1)))


def _jacobi(a):
    # a: (m, n, n) Hermitian. Returns eigenvalues (m, n), vectors (m, n, n).
    m, n = a.shape[0], a.shape[-1]
    work = a.copy()
    vectors = np.broadcast_to(np.eye(n, dtype=np.complex128),
                              (m, n, n)).copy()
    scale = np.maximum(1.0, np.sqrt((np.abs(a) ** 2).sum(axis=(-2, -1))))
    sweeps = 0
    residual = _off_norm(work)
    live = residual >= JACOBI_TOL * scale
    while np.any(live):
        if sweeps == MAX_SWEEPS:
            raise EigenNonConvergence(sweeps, float(residual.max()))
        for p in range(n - 1):
            for q in range(p + 1, n):
                c, s, conj_phase, active = _rotation(work[:, p, p].real,
                                                     work[:, q, q].real,
                                                     work[:, p, q], live)
                _rotate_columns(work, p, q, c, s, conj_phase)
                _rotate_rows(work, p, q, c, s, conj_phase)
                _rotate_columns(vectors, p, q, c, s, conj_phase)
                work[:, p, q] = np.where(active, 0.0, work[:, p, q])
                work[:, q, p] = np.where(active, 0.0, work[:, q, p])
        sweeps += 1
        residual = _off_norm(work)
        live = residual >= JACOBI_TOL * scale
    debug.eigen_log('jacobi: %d matrices of size %d, %d sweeps, '
                    'residual %.3e' % (m, n, sweeps,
                                       residual.max() if m else 0.0))
    return np.diagonal(work, axis1=-2, axis2=-1).real.copy(), vectors


def hermitian_eigen(a):
    """
    Eigendecomposition of a Hermitian matrix (or stack) by cyclic Jacobi
    rotations.

    Returns an EigenDecomposition with ascending real eigenvalues and
    orthonormal eigenvector columns. Raises NotHermitian when
    max |a_ij - conj(a_ji)| exceeds 1e-10 and EigenNonConvergence when the
    off-diagonal norm is still above tolerance after MAX_SWEEPS sweeps.
    """
    a = as_matrix(a)
    deviation = hermitian_deviation(a)
    worst = float(np.max(deviation)) if deviation.size else 0.0
    if worst > HERMITIAN_TOL:
        raise NotHermitian(worst, HERMITIAN_TOL)
    lead, n = a.shape[:-2], a.shape[-1]
    flat = (0.5 * (a + dagger(a))).reshape((-1, n, n))
    values, vectors = _jacobi(flat)
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
        raise InvariantViolation("Jacobi rotations produced non-finite "
                                 "eigenpairs")
    order = np.argsort(values, axis=-1, kind='stable')
    values = np.take_along_axis(values, order, axis=-1)
    vectors = np.take_along_axis(vectors, order[:, None, :], axis=-1)
    return EigenDecomposition(values.reshape(lead + (n,)),
                              vectors.reshape(lead + (n, n)))


def psd_sqrt(a):
    """
    Hermitian square root of a positive semidefinite matrix. Eigenvalues in
    [-1e-10, 1e-10] are treated as zero; anything more negative raises
    NotPositive.
    """
    values, vectors = hermitian_eigen(a)
    lowest = float(values.min())
    if lowest < -PSD_TOL:
        raise NotPositive(lowest, PSD_TOL)
    roots = np.sqrt(np.where(np.abs(values) <= PSD_TOL, 0.0, values))
    root = np.matmul(vectors * roots[..., None, :], dagger(vectors))
    return 0.5 * (root + dagger(root))


def singular_values(a):
    """
    Singular values in descending order by one-sided Jacobi (Hestenes)
    orthogonalization of the columns.
    """
    a = as_matrix(a)
    lead, n = a.shape[:-2], a.shape[-1]
    work = a.reshape((-1, n, n)).copy()
    m = work.shape[0]
    sweeps = 0
    while True:
        worst = np.zeros(m)
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = (np.abs(work[:, :, p]) ** 2).sum(axis=-1)
                beta = (np.abs(work[:, :, q]) ** 2).sum(axis=-1)
                gamma = (np.conj(work[:, :, p]) * work[:, :, q]).sum(axis=-1)
                norm = np.sqrt(alpha * beta)
                ratio = np.where(norm > 0,
                                 np.abs(gamma) / np.where(norm > 0, norm, 1.0),
                                 0.0)
                worst = np.maximum(worst, ratio)
                gamma = np.where(ratio > SVD_TOL, gamma, 0.0)
                c, s, conj_phase, _ = _rotation(alpha, beta, gamma)
                _rotate_columns(work, p, q, c, s, conj_phase)
        sweeps += 1
        if not np.any(worst > SVD_TOL):
            break
        if sweeps == MAX_SWEEPS:
            raise EigenNonConvergence(sweeps, float(worst.max()))
    debug.eigen_log('hestenes: %d matrices of size %d, %d sweeps' %
                    (m, n, sweeps))
    sigma = np.sqrt((np.abs(work) ** 2).sum(axis=-2))
    sigma = -np.sort(-sigma, axis=-1)
    return sigma.reshape(lead + (n,))
