"""
Two-qubit Heisenberg XYZ model with a z-axis Dzyaloshinsky-Moriya term:

    H = Jx XX + Jy YY + Jz ZZ + chi (XY - YX)

Units have hbar = 1, so times are in inverse energy units.
"""
import math
import numbers
from collections import namedtuple

import numpy as np

from xyz_tradeoff.exception import InvalidInput, InvariantViolation
from xyz_tradeoff.states import DensityMatrix, PureState, SIGMA_X, SIGMA_Y,\
    SIGMA_Z, check_probability, matrices_of
from xyz_tradeoff.tradeoff_config import DEFAULT_JX, DEFAULT_JY, DEFAULT_JZ

EIGEN_RESIDUAL_TOL = 1e-10

_PARAM_FIELDS = ['Jx', 'Jy', 'Jz', 'chi', 'gamma', 'p']


class ModelParams(namedtuple('ModelParams', _PARAM_FIELDS)):
    """
    Couplings Jx, Jy, Jz, DM strength chi, dephasing rate gamma (>= 0) and
    the Horodecki purity parameter p of the initial state (in [0, 1]).
    """
    __slots__ = ()

    def __new__(cls, Jx=DEFAULT_JX, Jy=DEFAULT_JY, Jz=DEFAULT_JZ, chi=0.0,
                gamma=0.0, p=1.0):
        values = dict(Jx=Jx, Jy=Jy, Jz=Jz, chi=chi, gamma=gamma, p=p)
        for name in _PARAM_FIELDS:
            value = values[name]
            if not isinstance(value, numbers.Real) or \
                    not math.isfinite(value):
                raise InvalidInput("%s must be a finite number, got %r" %
                                   (name, value))
            values[name] = float(value)
        if values['gamma'] < 0:
            raise InvalidInput("gamma must be non-negative, got %r" % gamma)
        check_probability('p', values['p'])
        return super(ModelParams, cls).__new__(
            cls, *[values[name] for name in _PARAM_FIELDS])

    def replace(self, **kwargs):
        # _replace bypasses __new__, so validate through the constructor
        fields = self._asdict()
        fields.update(kwargs)
        return ModelParams(**fields)


DerivedConstants = namedtuple('DerivedConstants', ['beta', 'u', 'v', 'xi'])

EigenSystem = namedtuple('EigenSystem',
                         ['energies', 'eigenvectors', 'degenerate'])


def derived_constants(params):
    """
    beta = sqrt(4 chi^2 + (Jx + Jy)^2), u = (Jx + Jy)/beta, v = 2 chi/beta
    and xi = u + iv. With beta = 0 the inner block is degenerate and
    (u, v) is taken as (1, 0).
    """
    beta = math.hypot(2.0 * params.chi, params.Jx + params.Jy)
    if beta == 0.0:
        return DerivedConstants(0.0, 1.0, 0.0, 1.0 + 0.0j)
    u = (params.Jx + params.Jy) / beta
    v = 2.0 * params.chi / beta
    return DerivedConstants(beta, u, v, complex(u, v))


def hamiltonian(params):
    xx = np.kron(SIGMA_X, SIGMA_X)
    yy = np.kron(SIGMA_Y, SIGMA_Y)
    zz = np.kron(SIGMA_Z, SIGMA_Z)
    dm = np.kron(SIGMA_X, SIGMA_Y) - np.kron(SIGMA_Y, SIGMA_X)
    h = params.Jx * xx + params.Jy * yy + params.Jz * zz + params.chi * dm
    return 0.5 * (h + np.conj(h.T))


def eigensystem(params):
    """
    Closed-form eigenpairs, checked by residual against hamiltonian().

    The outer block gives (|00> +- |11>)/sqrt(2) with energies
    Jz +- (Jx - Jy); the inner block gives (|01> +- xi*|10>)/sqrt(2) with
    energies -Jz +- beta. Returns (EigenSystem, DerivedConstants).
    """
    consts = derived_constants(params)
    r = 1.0 / math.sqrt(2.0)
    xi_c = np.conj(consts.xi)
    vectors = [np.array([r, 0, 0, r], dtype=np.complex128),
               np.array([0, r, r * xi_c, 0], dtype=np.complex128),
               np.array([0, r, -r * xi_c, 0], dtype=np.complex128),
               np.array([r, 0, 0, -r], dtype=np.complex128)]
    delta = params.Jx - params.Jy
    energies = np.array([params.Jz + delta,
                         -params.Jz + consts.beta,
                         -params.Jz - consts.beta,
                         params.Jz - delta])

    h = hamiltonian(params)
    for energy, vec in zip(energies, vectors):
        residual = float(np.abs(h.dot(vec) - energy * vec).max())
        if residual > EIGEN_RESIDUAL_TOL:
            raise InvariantViolation("Eigenpair E=%.12g has residual %.3e"
                                     % (energy, residual))
    system = EigenSystem(energies,
                         [PureState(vec) for vec in vectors],
                         consts.beta == 0.0)
    return system, consts


def _eigenbasis(params):
    system, _ = eigensystem(params)
    basis = np.stack([psi.amplitudes for psi in system.eigenvectors], axis=1)
    return system.energies, basis


def propagator(params, t):
    """
    U(t) = sum_c exp(-i E_c t) |psi_c><psi_c|. A 1-d array of times gives a
    (len(t), 4, 4) stack.
    """
    energies, basis = _eigenbasis(params)
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise InvalidInput("Times must be finite")
    phases = np.exp(-1j * np.multiply.outer(t, energies))
    return np.matmul(basis * phases[..., None, :], np.conj(basis.T))


def _analytic_matrices(params, t):
    t = np.asarray(t, dtype=float)
    consts = derived_constants(params)
    p = params.p
    q = 1.0 - p
    envelope = np.exp(-0.5 * params.gamma * t)
    outer_angle = 2.0 * (params.Jx - params.Jy) * t
    inner_angle = 2.0 * consts.beta * t

    m = np.zeros(t.shape + (4, 4), dtype=np.complex128)
    m[..., 0, 0] = 0.5 * q * (1.0 - envelope * np.cos(outer_angle))
    m[..., 3, 3] = 0.5 * q * (1.0 + envelope * np.cos(outer_angle))
    m[..., 0, 3] = -0.5j * q * envelope * np.sin(outer_angle)
    m[..., 3, 0] = np.conj(m[..., 0, 3])
    swing = 0.5 * p * consts.v * envelope * np.sin(inner_angle)
    m[..., 1, 1] = 0.5 * p + swing
    m[..., 2, 2] = 0.5 * p - swing
    m[..., 1, 2] = 0.5 * p * consts.xi * envelope *\
        (consts.u - 1j * consts.v * np.cos(inner_angle))
    m[..., 2, 1] = np.conj(m[..., 1, 2])
    return m


def analytic_state(params, t):
    """
    Closed-form X-state evolved from horodecki_state(p) for time t >= 0.

    Coherences carry the exp(-gamma t / 2) envelope of the closed-form
    solution; at gamma = 0 the state equals the exact unitary evolution.
    """
    if not math.isfinite(t) or t < 0:
        raise InvalidInput("t must be finite and non-negative, got %r" % t)
    return DensityMatrix(_analytic_matrices(params, float(t)))


def time_grid(t_end, nodes):
    """nodes uniform times on [0, t_end]; a single node means t = 0."""
    if not isinstance(nodes, numbers.Integral) or nodes < 1:
        raise InvalidInput("nodes must be a positive integer, got %r" %
                           (nodes,))
    if not math.isfinite(t_end) or t_end < 0:
        raise InvalidInput("t_end must be finite and non-negative, got %r"
                           % (t_end,))
    if nodes == 1:
        return np.zeros(1)
    if t_end == 0:
        raise InvalidInput("A grid of %d nodes needs t_end > 0" % nodes)
    return np.linspace(0.0, t_end, nodes)


def analytic_trajectory(params, times):
    from xyz_tradeoff.lindblad import Trajectory
    times = np.asarray(times, dtype=float)
    return Trajectory(times, _analytic_matrices(params, times),
                      'analytic', params)


def propagate(rho0, params, times):
    """
    Unitary evolution U(t) rho0 U(t)^H on the given times. The dephasing
    rate is ignored.
    """
    from xyz_tradeoff.lindblad import Trajectory
    times = np.asarray(times, dtype=float)
    u = propagator(params, times)
    m = np.matmul(np.matmul(u, matrices_of(rho0)), np.conj(
        np.swapaxes(u, -1, -2)))
    return Trajectory(times, m, 'propagator', params)
