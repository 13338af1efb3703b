"""
From trajectories to findings: measure records, upper-bound violations,
entanglement death intervals, route comparisons, parameter sweeps and
randomized audits of the universal identities.
"""
import math
import numbers
from collections import namedtuple
from itertools import product

import numpy as np

from xyz_tradeoff.debug import debug
from xyz_tradeoff.exception import InvalidInput
from xyz_tradeoff.lindblad import integrate
from xyz_tradeoff.measures import measure_states, concurrence_pure,\
    DEATH_THRESHOLD
from xyz_tradeoff.model import ModelParams, analytic_trajectory, propagate,\
    time_grid
from xyz_tradeoff.states import horodecki_state, make_rng, random_pures,\
    random_densities, projectors, check_rank
from xyz_tradeoff.tradeoff_config import DEFAULT_JX, DEFAULT_JY,\
    DEFAULT_JZ, DEFAULT_T_END, DEFAULT_NODES, DEFAULT_DT, DEFAULT_SEED,\
    AUDIT_CHUNK
from xyz_tradeoff.workers import parallel_map

VIOLATION_THRESHOLD = 1e-9
RESIDUAL_LIMIT = 1e-10
LOWER_BOUND_SLACK = 1e-12
COMPLEMENTARITY_LIMIT = 1e-10
PURE_ROUTE_LIMIT = 1e-9

SWEEP_ROUTES = ('analytic', 'integrator', 'propagator', 'both')

ViolationInterval = namedtuple('ViolationInterval',
                               ['t_start', 't_end', 'max_excess', 'params'])

SweepRow = namedtuple('SweepRow', ['params', 'route', 'record'])

RouteComparison = namedtuple('RouteComparison',
                             ['times', 'max_deviation', 'deviations',
                              'element_deviation', 'propagator_deviation'])

BoundScan = namedtuple('BoundScan',
                       ['violations', 'max_excess', 'argmax_p', 'argmax_t',
                        'points'])

AuditReport = namedtuple('AuditReport',
                         ['seed', 'samples', 'chunk', 'ranks', 'passed'])


def _grid(values, name):
    if isinstance(values, numbers.Real):
        values = [values]
    values = tuple(float(v) for v in values)
    if not values:
        raise InvalidInput("%s grid must not be empty" % name)
    return values


class SweepConfig(namedtuple('SweepConfig',
                             ['p_values', 'chi_values', 'gamma_values',
                              'Jx', 'Jy', 'Jz', 't_end', 'nodes', 'dt',
                              'seed', 'route'])):
    __slots__ = ()

    def __new__(cls, p_values=(1.0,), chi_values=(0.0,), gamma_values=(0.0,),
                Jx=DEFAULT_JX, Jy=DEFAULT_JY, Jz=DEFAULT_JZ,
                t_end=DEFAULT_T_END, nodes=DEFAULT_NODES, dt=DEFAULT_DT,
                seed=DEFAULT_SEED, route='analytic'):
        if route not in SWEEP_ROUTES:
            raise InvalidInput("route must be one of %s, got %r" %
                               (', '.join(SWEEP_ROUTES), route))
        if not isinstance(dt, numbers.Real) or not dt > 0:
            raise InvalidInput("dt must be positive, got %r" % (dt,))
        config = super(SweepConfig, cls).__new__(
            cls, _grid(p_values, 'p'), _grid(chi_values, 'chi'),
            _grid(gamma_values, 'gamma'), float(Jx), float(Jy), float(Jz),
            float(t_end), nodes, float(dt), seed, route)
        # validates the time grid and every parameter combination
        time_grid(config.t_end, config.nodes)
        config.points()
        return config

    def times(self):
        return time_grid(self.t_end, self.nodes)

    def routes(self):
        if self.route == 'both':
            return ('analytic', 'integrator')
        return (self.route,)

    def points(self):
        """ModelParams for every grid point, ordered by (gamma, chi, p)."""
        return [ModelParams(self.Jx, self.Jy, self.Jz, chi, gamma, p)
                for gamma, chi, p in product(sorted(self.gamma_values),
                                             sorted(self.chi_values),
                                             sorted(self.p_values))]


def trajectory_for(params, route, times, dt=DEFAULT_DT):
    if route == 'analytic':
        return analytic_trajectory(params, times)
    if route == 'propagator':
        return propagate(horodecki_state(params.p), params, times)
    if route == 'integrator':
        return integrate(horodecki_state(params.p), params, dt=dt,
                         times=times)
    raise InvalidInput("Unknown route %r" % (route,))


def measure_trajectory(traj):
    return measure_states(traj.times, traj.states)


def find_violations(records, params=None, threshold=VIOLATION_THRESHOLD):
    """
    Maximal runs of nodes where IC exceeds sqrt((1 + C^2)/2) by more than
    threshold. Runs separated by a single non-violating node are merged.
    """
    flags = [r.IC - r.upper_bound > threshold for r in records]
    runs = []
    for idx, flag in enumerate(flags):
        if not flag:
            continue
        if runs and idx - runs[-1][1] <= 2:
            runs[-1][1] = idx
        else:
            runs.append([idx, idx])
    return [ViolationInterval(records[start].t, records[end].t,
                              max(r.IC - r.upper_bound
                                  for r in records[start:end + 1]),
                              params)
            for start, end in runs]


def death_intervals(records, threshold=DEATH_THRESHOLD):
    """
    Intervals where the concurrence vanishes.

    Maximal runs of nodes with C <= threshold are reported by their first
    and last node times. Between two live nodes of an X-state trajectory
    whose concurrence is carried by different coherences (opposite
    branch), C must pass through zero; such an instantaneous death is
    reported as the interval between the two nodes.
    """
    found = []
    start = None
    for idx, rec in enumerate(records):
        dead = rec.C <= threshold
        if dead and start is None:
            start = idx
        if not dead and start is not None:
            found.append((records[start].t, records[idx - 1].t))
            start = None
    if start is not None:
        found.append((records[start].t, records[-1].t))

    for prev, cur in zip(records, records[1:]):
        if prev.C > threshold and cur.C > threshold and \
                prev.branch * cur.branch == -1:
            found.append((prev.t, cur.t))
    return sorted(found)


def zero_crossings(times, values):
    """Times where values changes sign, linearly interpolated."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    crossings = []
    for idx in range(values.size):
        if values[idx] == 0.0:
            crossings.append(float(times[idx]))
        elif idx + 1 < values.size and values[idx] * values[idx + 1] < 0:
            frac = values[idx] / (values[idx] - values[idx + 1])
            crossings.append(float(times[idx] +
                                   frac * (times[idx + 1] - times[idx])))
    return crossings


def compare_routes(params, t_end, dt=DEFAULT_DT, nodes=DEFAULT_NODES):
    """
    Max element deviation between the closed-form and RK4 trajectories on
    a common grid; with gamma = 0 the closed form is also compared with
    the exact propagator.
    """
    times = time_grid(t_end, nodes if t_end > 0 else 1)
    analytic = analytic_trajectory(params, times)
    numeric = trajectory_for(params, 'integrator', times, dt=dt)
    diff = np.abs(analytic.states - numeric.states)
    against_propagator = None
    if params.gamma == 0:
        exact = trajectory_for(params, 'propagator', times)
        against_propagator = float(np.abs(analytic.states -
                                          exact.states).max())
    return RouteComparison(times, float(diff.max()),
                           diff.max(axis=(-2, -1)), diff.max(axis=0),
                           against_propagator)


def _sweep_point(config, times):
    def evaluate(params):
        debug.sweep_log('sweep point %s' % (params,))
        per_route = [(route, measure_trajectory(
                          trajectory_for(params, route, times, config.dt)))
                     for route in config.routes()]
        rows = []
        for idx in range(times.size):
            for route, records in per_route:
                rows.append(SweepRow(params, route, records[idx]))
        return rows
    return evaluate


def run_sweep(config, max_parallel=None):
    """
    Measure records over the full (gamma, chi, p) cross product. Rows are
    ordered by (gamma, chi, p, t, route) whatever the worker count.
    """
    times = config.times()
    chunks = parallel_map(_sweep_point(config, times), config.points(),
                          max_parallel=max_parallel)
    return [row for chunk in chunks for row in chunk]


def route_deviations(config, max_parallel=None):
    """
    compare_routes at every (gamma, chi, p) point of a sweep, in the same
    order as SweepConfig.points().
    """
    def compare(params):
        return compare_routes(params, config.t_end, config.dt, config.nodes)
    return parallel_map(compare, config.points(), max_parallel=max_parallel)


def bound_scan(params, p_values, times, route='analytic', dt=DEFAULT_DT,
               max_parallel=None):
    """
    Upper-bound scan over the (t, p) grid at fixed couplings, chi and
    gamma. Reports every violation interval and the largest excess
    IC - sqrt((1 + C^2)/2) found anywhere, violating or not.
    """
    p_values = sorted(_grid(p_values, 'p'))

    def scan(p):
        point = params.replace(p=p)
        records = measure_trajectory(trajectory_for(point, route, times, dt))
        excess = [r.IC - r.upper_bound for r in records]
        best = int(np.argmax(excess))
        return (find_violations(records, point), excess[best],
                records[best].t)

    results = parallel_map(scan, p_values, max_parallel=max_parallel)
    violations = [v for found, _, _ in results for v in found]
    best = int(np.argmax([excess for _, excess, _ in results]))
    return BoundScan(violations, results[best][1], p_values[best],
                     results[best][2], len(p_values) * len(times))


def _audit_chunk(seed, chunk):
    def audit(task):
        rank, index, count = task
        debug.audit_log('rank %d chunk %d: %d samples' % (rank, index,
                                                           count))
        rng = make_rng(seed, (rank, index))
        if rank == 1:
            amps = random_pures(count, rng)
            matrices = projectors(amps)
        else:
            matrices = random_densities(rank, count, rng)
        records = measure_states(np.arange(count, dtype=float), matrices)
        c = np.array([r.C for r in records])
        ic = np.array([r.IC for r in records])
        f = np.array([r.F for r in records])
        excess = ic - np.array([r.upper_bound for r in records])
        summary = {
            'samples': count,
            'max_residual': float(max(abs(r.residual) for r in records)),
            'max_c_minus_ic': float((c - ic).max()),
            'upper_bound_violations': int((excess > VIOLATION_THRESHOLD)
                                          .sum()),
            'max_upper_bound_excess': float(excess.max()),
            'violating': [[index * chunk + int(i), float(excess[i])]
                          for i in np.flatnonzero(excess >
                                                  VIOLATION_THRESHOLD)],
        }
        if rank == 1:
            summary['max_complementarity_gap'] = \
                float(np.abs(c ** 2 + f ** 2 - 1.0).max())
            summary['max_pure_route_gap'] = \
                float(np.abs(concurrence_pure(amps) - c).max())
        return rank, summary
    return audit


def _merge(rank, parts):
    merged = {'rank': rank, 'samples': sum(p['samples'] for p in parts)}
    for key in parts[0]:
        if key == 'samples':
            continue
        if key == 'upper_bound_violations':
            merged[key] = sum(p[key] for p in parts)
        elif key == 'violating':
            merged[key] = [v for p in parts for v in p[key]]
        else:
            merged[key] = max(p[key] for p in parts)
    passed = merged['max_residual'] <= RESIDUAL_LIMIT and \
        merged['max_c_minus_ic'] <= LOWER_BOUND_SLACK
    if rank == 1:
        passed = passed and \
            merged['max_complementarity_gap'] <= COMPLEMENTARITY_LIMIT and \
            merged['max_pure_route_gap'] <= PURE_ROUTE_LIMIT
    merged['passed'] = passed
    return merged


def random_audit(samples, ranks=(1, 2, 3, 4), seed=DEFAULT_SEED,
                 chunk=AUDIT_CHUNK, max_parallel=None):
    """
    Check the conservation identity, the lower bound C <= IC and, for
    rank 1, the pure-state complementarity C^2 + F^2 = 1 on random
    Ginibre states; count upper-bound violations per rank.

    Samples are drawn in chunks whose generators are keyed by
    (seed, rank, chunk index), so the report does not depend on the
    number of workers.
    """
    if not isinstance(samples, numbers.Integral) or samples < 1:
        raise InvalidInput("samples must be a positive integer, got %r" %
                           (samples,))
    if not isinstance(chunk, numbers.Integral) or chunk < 1:
        raise InvalidInput("chunk must be a positive integer, got %r" %
                           (chunk,))
    ranks = sorted(set(check_rank(r) for r in ranks))
    # rejects bad seeds before any worker is forked
    make_rng(seed)
    tasks = [(rank, index, min(chunk, samples - index * chunk))
             for rank in ranks
             for index in range(int(math.ceil(samples / float(chunk))))]
    results = parallel_map(_audit_chunk(seed, chunk), tasks,
                           max_parallel=max_parallel)
    per_rank = [_merge(rank, [s for r, s in results if r == rank])
                for rank in ranks]
    return AuditReport(seed, samples, chunk, per_rank,
                       all(r['passed'] for r in per_rank))
