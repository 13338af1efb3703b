"""
Phase-damping master equation

    d rho / dt = -i [H, rho] + gamma sum_i (L_i rho L_i - {L_i, rho} / 2)

with L_i = |1><1| acting on qubit i (equal rates on both qubits), and a
fixed-step RK4 integrator that serves as numerical ground truth.
"""
import math
import numbers

import numpy as np

from xyz_tradeoff.debug import debug
from xyz_tradeoff.exception import InvalidInput, IntegratorFailure,\
    NotPositive
from xyz_tradeoff.matcore import hermitian_eigen, hermitian_deviation
from xyz_tradeoff.model import hamiltonian, derived_constants
from xyz_tradeoff.states import DensityMatrix, IDENTITY2, PSD_FLOOR,\
    matrices_of, validate_stack
from xyz_tradeoff.tradeoff_config import DEFAULT_DT

ROUTES = ('analytic', 'integrator', 'propagator')

TRACE_DRIFT_LIMIT = 1e-8
HERMITIAN_DRIFT_LIMIT = 1e-10

_PROJECTOR_ONE = np.array([[0, 0], [0, 1]], dtype=np.complex128)
JUMP_OPERATORS = (np.kron(_PROJECTOR_ONE, IDENTITY2),
                  np.kron(IDENTITY2, _PROJECTOR_ONE))


class Trajectory(object):
    """
    Time-ordered states of one evolution, tagged with the route that
    produced them. times start at 0 and increase strictly; states is a
    read-only (N, 4, 4) stack.
    """

    def __init__(self, times, states, route, params):
        if route not in ROUTES:
            raise InvalidInput("Unknown route %r; expected one of %s" %
                               (route, ', '.join(ROUTES)))
        times = np.array(times, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise InvalidInput("A trajectory needs a non-empty 1-d time grid")
        if times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise InvalidInput("Trajectory times must start at 0 and "
                               "increase strictly")
        states = np.array(validate_stack(states, check_psd=False))
        if states.shape != (times.size, 4, 4):
            raise InvalidInput("Expected %d 4x4 states, got shape %s" %
                               (times.size, states.shape))
        times.setflags(write=False)
        states.setflags(write=False)
        self.times = times
        self.states = states
        self.route = route
        self.params = params

    def __len__(self):
        return self.times.size

    def state(self, idx):
        return DensityMatrix.relaxed(self.states[idx])

    @property
    def final(self):
        return self.state(-1)

    def trace_drift(self):
        return float(np.abs(np.trace(self.states, axis1=-2, axis2=-1)
                            - 1.0).max())

    def min_eigenvalue(self):
        return float(hermitian_eigen(self.states).eigenvalues.min())

    def check_positive(self):
        lowest = self.min_eigenvalue()
        if lowest < -PSD_FLOOR:
            raise NotPositive(lowest, PSD_FLOOR)
        return lowest

    def __repr__(self):
        return 'Trajectory(route=%s, nodes=%d, t_end=%g)' % \
            (self.route, len(self), self.times[-1])


def master_rhs(rho, params, h=None):
    """
    Right-hand side of the master equation for one 4x4 matrix or a stack.
    A precomputed Hamiltonian may be passed as h.
    """
    m = matrices_of(rho)
    if m.shape[-1] != 4:
        raise InvalidInput("master_rhs needs 4x4 input, got %dx%d" %
                           m.shape[-2:])
    if h is None:
        h = hamiltonian(params)
    out = -1j * (np.matmul(h, m) - np.matmul(m, h))
    if params.gamma:
        for jump in JUMP_OPERATORS:
            out += params.gamma * (np.matmul(np.matmul(jump, m), jump) -
                                   0.5 * (np.matmul(jump, m) +
                                          np.matmul(m, jump)))
    return out


def generator_matrix(params):
    """
    16x16 matrix G with vec(master_rhs(rho)) = G vec(rho), vec being the
    row-major flattening.
    """
    h = hamiltonian(params)
    units = np.eye(16, dtype=np.complex128).reshape(16, 4, 4)
    return master_rhs(units, params, h=h).reshape(16, 16).T


def _output_grid(t_end, dt, times):
    if times is not None:
        grid = np.array(times, dtype=float)
        if grid.ndim != 1 or grid.size == 0 or grid[0] != 0.0 or \
                np.any(np.diff(grid) <= 0) or not np.all(np.isfinite(grid)):
            raise InvalidInput("times must be finite, start at 0 and "
                               "increase strictly")
        if t_end is not None and abs(grid[-1] - t_end) > 0:
            raise InvalidInput("times end at %g but t_end is %g" %
                               (grid[-1], t_end))
        return grid
    if t_end is None or not math.isfinite(t_end) or t_end < 0:
        raise InvalidInput("t_end must be finite and non-negative, got %r" %
                           (t_end,))
    steps = int(math.floor(t_end / dt + 1e-9))
    grid = dt * np.arange(steps + 1)
    if t_end - grid[-1] > 1e-12 * max(1.0, t_end):
        grid = np.append(grid, t_end)
    else:
        grid[-1] = t_end if steps else 0.0
    return grid


def integrate(rho0, params, t_end=None, dt=DEFAULT_DT, times=None):
    """
    Classical RK4 with a fixed step of at most dt.

    Parameters
    ----------
    rho0 : DensityMatrix or array
        Initial two-qubit state.
    params : ModelParams
        Model couplings and dephasing rate.
    t_end : float
        Final time. Without times the nodes are k * dt plus t_end.
    dt : float
        Step size.
    times : array, optional
        Explicit output grid starting at 0. Each interval is split into
        equal substeps no longer than dt so every node is hit exactly.

    Returns
    -------
    Trajectory with route 'integrator'.
    """
    if not isinstance(dt, numbers.Real) or not math.isfinite(dt) or dt <= 0:
        raise InvalidInput("dt must be a positive number, got %r" % (dt,))
    grid = _output_grid(t_end, dt, times)
    rho = np.array(matrices_of(rho0), dtype=np.complex128)
    if rho.shape != (4, 4):
        raise InvalidInput("Initial state must be 4x4")

    scale = max(1.0, derived_constants(params).beta, params.gamma)
    if dt > 0.01 / scale:
        debug.integrator_log('dt=%g is above the recommended %g' %
                             (dt, 0.01 / scale))

    gen = generator_matrix(params)
    vec = rho.reshape(16)
    out = np.empty((grid.size, 4, 4), dtype=np.complex128)
    out[0] = rho
    substeps_total = 0
    for idx in range(1, grid.size):
        span = grid[idx] - grid[idx - 1]
        substeps = max(1, int(math.ceil(span / dt - 1e-9)))
        h = span / substeps
        for _ in range(substeps):
            k1 = gen.dot(vec)
            k2 = gen.dot(vec + 0.5 * h * k1)
            k3 = gen.dot(vec + 0.5 * h * k2)
            k4 = gen.dot(vec + h * k3)
            vec = vec + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        substeps_total += substeps
        vec = _checked_node(vec, grid[idx])
        out[idx] = vec.reshape(4, 4)

    debug.integrator_log('rk4: %d nodes, %d steps, final trace drift %.3e'
                         % (grid.size, substeps_total,
                            abs(np.trace(out[-1]) - 1.0)))
    return Trajectory(grid, out, 'integrator', params)


def _checked_node(vec, t):
    if not np.all(np.isfinite(vec)):
        raise IntegratorFailure('state has non-finite entries', t)
    m = vec.reshape(4, 4)
    drift = abs(np.trace(m) - 1.0)
    if drift > TRACE_DRIFT_LIMIT:
        raise IntegratorFailure('trace drifted by %.3e; reduce dt' % drift,
                                t)
    skew = float(hermitian_deviation(m))
    if skew > HERMITIAN_DRIFT_LIMIT:
        raise IntegratorFailure('Hermiticity drifted by %.3e' % skew, t)
    return (0.5 * (m + np.conj(m.T))).reshape(16)
