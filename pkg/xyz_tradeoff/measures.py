"""
Resource quantifiers for two-qubit states: concurrence, intrinsic
concurrence, first-order coherence and purity, plus the quantities of the
IC/FOC trade-off (the upper bound on IC and the conservation residual).

Every function takes a DensityMatrix, a single 4x4 array or a stack of
them; stacked input yields arrays, single input yields floats.
"""
from collections import namedtuple

import numpy as np

from xyz_tradeoff.exception import InvalidInput, InvalidState,\
    InvariantViolation
from xyz_tradeoff.matcore import psd_sqrt, singular_values, trace_product
from xyz_tradeoff.states import PureState, matrices_of, reduce_stack,\
    spin_flip, purity, projectors, NORM_TOL

ROOT_TOL = 1e-12
BOUNDARY_TOL = 1e-12
IMAG_TOL = 1e-12
X_STATE_TOL = 1e-12
X_CROSSCHECK_TOL = 1e-7
# C at or below this value counts as zero (entanglement death).
DEATH_THRESHOLD = 1e-9

_X_MASK = np.eye(4, dtype=bool)
_X_MASK[0, 3] = _X_MASK[3, 0] = _X_MASK[1, 2] = _X_MASK[2, 1] = True

WoottersSpectrum = namedtuple('WoottersSpectrum', ['lambdas'])

MeasureRecord = namedtuple('MeasureRecord',
                           ['t', 'C', 'IC', 'F', 'F_A', 'F_B', 'purity',
                            'upper_bound', 'residual', 'branch'])


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _clamped_root(x, what):
    x = np.asarray(x, dtype=float)
    if np.any(x < -ROOT_TOL):
        raise InvalidState("Square root argument of %s is %.3e" %
                           (what, float(x.min())))
    return np.sqrt(np.maximum(x, 0.0))


def _clip_unit(x):
    x = np.asarray(x, dtype=float)
    x = np.where((x < 0.0) & (x >= -BOUNDARY_TOL), 0.0, x)
    return np.where((x > 1.0) & (x <= 1.0 + BOUNDARY_TOL), 1.0, x)


def _real_trace(value, what):
    leak = float(np.max(np.abs(np.imag(value))))
    if leak > IMAG_TOL:
        raise InvalidState("%s has imaginary part %.3e" % (what, leak))
    return np.real(value)


def _two_qubit(rho):
    m = matrices_of(rho)
    if m.shape[-1] != 4:
        raise InvalidInput("Two-qubit measures need 4x4 input, got %dx%d" %
                           m.shape[-2:])
    return m


def _wootters_roots(m):
    # Singular values of sqrt(rho) sqrt(rho~) are the square roots of the
    # eigenvalues of sqrt(rho) rho~ sqrt(rho), i.e. of rho rho~.
    root = psd_sqrt(m)
    return singular_values(np.matmul(root, spin_flip(root)))


def wootters_spectrum(rho):
    roots = _wootters_roots(_two_qubit(rho))
    return WoottersSpectrum(roots ** 2)


def _concurrence_from_roots(roots):
    c = roots[..., 0] - roots[..., 1] - roots[..., 2] - roots[..., 3]
    return _clip_unit(np.maximum(c, 0.0))


def concurrence(rho):
    return _scalar(_concurrence_from_roots(_wootters_roots(_two_qubit(rho))))


def concurrence_pure(psi):
    """
    sqrt(2 (1 - tr rho_A^2)) for a normalized pure state; both reduced
    states must give the same value.
    """
    if isinstance(psi, PureState):
        amps = psi.amplitudes
    else:
        amps = np.asarray(psi, dtype=np.complex128)
        if amps.shape[-1] != 4:
            raise InvalidInput("Pure states have 4 amplitudes, got %d" %
                               amps.shape[-1])
        norms = np.sum(np.abs(amps) ** 2, axis=-1)
        if np.any(np.abs(norms - 1.0) > NORM_TOL):
            raise InvalidInput("Pure state is not normalized")
    rho = projectors(amps)
    sides = [2.0 * (1.0 - purity(reduce_stack(rho, keep)))
             for keep in ('A', 'B')]
    gap = float(np.max(np.abs(sides[0] - sides[1])))
    if gap > 1e-12:
        raise InvariantViolation("Reduced states disagree on linear entropy "
                                 "by %.3e" % gap)
    return _scalar(_clip_unit(_clamped_root(sides[0],
                                            'pure-state concurrence')))


def _intrinsic_squared(m):
    return _real_trace(trace_product(m, spin_flip(m)), 'tr(rho rho~)')


def intrinsic_concurrence(rho):
    m = _two_qubit(rho)
    return _scalar(_clip_unit(_clamped_root(_intrinsic_squared(m),
                                            'intrinsic concurrence')))


def _coherences(m):
    per_qubit = [_clip_unit(_clamped_root(
                     2.0 * purity(reduce_stack(m, keep)) - 1.0,
                     'first-order coherence of qubit %s' % keep))
                 for keep in ('A', 'B')]
    f_a, f_b = per_qubit
    return np.sqrt(0.5 * (f_a ** 2 + f_b ** 2)), f_a, f_b


def first_order_coherence(rho):
    """Returns (F, F_A, F_B)."""
    return tuple(_scalar(x) for x in _coherences(_two_qubit(rho)))


def ic_upper_bound(c):
    c = np.asarray(c, dtype=float)
    if np.any(~np.isfinite(c)) or np.any(c < 0.0) or np.any(c > 1.0):
        raise InvalidInput("Concurrence must lie in [0, 1]")
    return _scalar(np.sqrt(0.5 * (1.0 + c ** 2)))


def conservation_residual(rho):
    """IC^2 + F^2 - tr(rho^2); zero for every two-qubit state."""
    m = _two_qubit(rho)
    ic = _clip_unit(_clamped_root(_intrinsic_squared(m),
                                  'intrinsic concurrence'))
    f = _coherences(m)[0]
    return _scalar(ic ** 2 + f ** 2 - purity(m))


def is_x_state(rho, tol=X_STATE_TOL):
    m = _two_qubit(rho)
    outside = np.where(_X_MASK, 0.0, np.abs(m)).max(axis=(-2, -1))
    inside = outside <= tol
    return bool(inside) if np.ndim(inside) == 0 else inside


def x_state_branches(rho):
    """
    The two candidate concurrences of an X-state,
    2(|rho_23| - sqrt(rho_11 rho_44)) and 2(|rho_14| - sqrt(rho_22 rho_33))
    (1-based indices). At most one of them is positive.
    """
    m = _two_qubit(rho)
    d = np.real(np.diagonal(m, axis1=-2, axis2=-1))
    inner = 2.0 * (np.abs(m[..., 1, 2]) -
                   np.sqrt(np.maximum(d[..., 0] * d[..., 3], 0.0)))
    outer = 2.0 * (np.abs(m[..., 0, 3]) -
                   np.sqrt(np.maximum(d[..., 1] * d[..., 2], 0.0)))
    return inner, outer


def x_state_concurrence(rho):
    if not np.all(is_x_state(rho)):
        raise InvalidInput("Matrix is not an X-state")
    inner, outer = x_state_branches(rho)
    return _scalar(_clip_unit(np.maximum(0.0, np.maximum(inner, outer))))


def measure_states(times, matrices, crosscheck=True):
    """
    MeasureRecords for a (N, 4, 4) stack of states at the given times.

    For X-states the spectral concurrence is cross-checked against the
    closed form and each record's branch tells which coherence carries the
    entanglement: +1 for rho_23, -1 for rho_14, 0 when C is zero or the
    state is not an X-state.
    """
    m = _two_qubit(matrices)
    times = np.asarray(times, dtype=float)
    if m.ndim != 3 or times.shape != (m.shape[0],):
        raise InvalidInput("Need one time per state: %d times, stack of "
                           "shape %s" % (times.size, m.shape))
    c = _concurrence_from_roots(_wootters_roots(m))
    ic = _clip_unit(_clamped_root(_intrinsic_squared(m),
                                  'intrinsic concurrence'))
    f, f_a, f_b = _coherences(m)
    p = purity(m)
    bound = np.sqrt(0.5 * (1.0 + c ** 2))
    residual = ic ** 2 + f ** 2 - p

    branch = np.zeros(m.shape[0], dtype=int)
    x_like = is_x_state(m)
    if np.any(x_like):
        inner, outer = x_state_branches(m[x_like])
        if crosscheck:
            closed = np.maximum(0.0, np.maximum(inner, outer))
            gap = np.abs(_clip_unit(closed) - c[x_like])
            if gap.size and gap.max() > X_CROSSCHECK_TOL:
                worst = int(np.argmax(gap))
                raise InvariantViolation(
                    "X-state concurrence %.12f disagrees with the spectral "
                    "value %.12f at t=%.6g" %
                    (closed[worst], c[x_like][worst],
                     times[x_like][worst]))
        branch[x_like] = np.where(inner > DEATH_THRESHOLD, 1,
                                  np.where(outer > DEATH_THRESHOLD, -1, 0))

    return [MeasureRecord(float(times[i]), float(c[i]), float(ic[i]),
                          float(f[i]), float(f_a[i]), float(f_b[i]),
                          float(p[i]), float(bound[i]), float(residual[i]),
                          int(branch[i]))
            for i in range(m.shape[0])]
