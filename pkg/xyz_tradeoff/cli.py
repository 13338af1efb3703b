import os
import sys
import traceback

import click

from xyz_tradeoff import __version__
from xyz_tradeoff.analysis import SweepConfig, run_sweep, bound_scan,\
    random_audit, trajectory_for, measure_trajectory, find_violations,\
    death_intervals, route_deviations
from xyz_tradeoff.exception import TradeoffException, InvalidInput,\
    ConfigurationError
from xyz_tradeoff.formats import SCHEMA_VERSION, output_row, csv_lines,\
    write_csv_file, to_json, write_json_file, rows_as_dicts
from xyz_tradeoff.model import ModelParams, time_grid
from xyz_tradeoff.tradeoff_config import DEFAULT_JX, DEFAULT_JY,\
    DEFAULT_JZ, DEFAULT_T_END, DEFAULT_NODES, DEFAULT_DT, DEFAULT_SEED,\
    AUDIT_CHUNK, THREADS

ERASE_TO_EOL = '\033[K'
HIGHLIGHT = 'red'
INDENT = ' ' * 4

FIGURE_P_VALUES = (0.0, 0.33, 0.66, 1.0)
FIGURE_CHI_VALUES = (0.0, 0.5, 1.0)
FIGURE_GAMMAS = {'fig2': (0.0, 0.25), 'fig3': (0.0,), 'fig4': (0.25,)}
FIG2_CHI = 1.0


def echo_dev_null(*args, **kwargs):
    pass


def echo_always(line, **kwargs):
    kwargs['err'] = kwargs.get('err', True)
    if kwargs.pop('indent', None):
        line = '\n'.join(INDENT + x for x in line.splitlines())
    if 'nl' not in kwargs or kwargs['nl']:
        line += ERASE_TO_EOL
    highlight = kwargs.pop('highlight', HIGHLIGHT)
    hl_bold = kwargs.pop('highlight_bold', True)
    nl = kwargs.pop('nl', True)
    fg = kwargs.pop('fg', None)
    bold = kwargs.pop('bold', False)
    kwargs['nl'] = False
    hl = True
    for span in line.split('*'):
        if hl:
            hl = False
            kwargs['fg'] = fg
            kwargs['bold'] = bold
        else:
            hl = True
            kwargs['fg'] = highlight
            kwargs['bold'] = hl_bold
        click.secho(span, **kwargs)
    if nl:
        kwargs['nl'] = True
        click.secho('', **kwargs)


echo = echo_always


def emit(text):
    # payloads go to stdout untouched
    click.echo(text, nl=False)


def read_flat_config(path):
    """
    Parse a flat key=value file. Blank lines and '#' comments are skipped;
    keys are flag names, with or without leading dashes.
    """
    values = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigurationError("Expected key=value, got %r" % line,
                                         lineno=lineno)
            key, value = (x.strip() for x in line.split('=', 1))
            key = key.lstrip('-').replace('-', '_').lower()
            if not key:
                raise ConfigurationError("Empty key", lineno=lineno)
            values[key] = value
    return values


def _apply_config_file(ctx, param, path):
    if not path:
        return path
    try:
        values = read_flat_config(path)
    except (ConfigurationError, IOError) as ex:
        raise click.BadParameter(str(ex), ctx=ctx, param=param)
    default_map = {}
    for name, command in ctx.command.commands.items():
        known = set(p.name for p in command.params)
        default_map[name] = dict((k, v) for k, v in values.items()
                                 if k in known)
    ctx.default_map = default_map
    return path


def _usage_guard(func, *args, **kwargs):
    # invalid flag values are usage errors (exit status 2)
    try:
        return func(*args, **kwargs)
    except InvalidInput as ex:
        raise click.UsageError(str(ex))


def model_options(chi=0.0, gamma=0.0, p=1.0):
    def wrapper(cmd):
        options = [
            click.option('--jx', default=DEFAULT_JX, show_default=True,
                         type=float, help='Coupling along x.'),
            click.option('--jy', default=DEFAULT_JY, show_default=True,
                         type=float, help='Coupling along y.'),
            click.option('--jz', default=DEFAULT_JZ, show_default=True,
                         type=float, help='Coupling along z.'),
            click.option('--chi', default=chi, show_default=True,
                         type=float,
                         help='Dzyaloshinsky-Moriya strength along z.'),
            click.option('--gamma', default=gamma, show_default=True,
                         type=float, help='Dephasing rate on both qubits.'),
            click.option('--p', default=p, show_default=True, type=float,
                         help='Purity parameter of the initial Horodecki '
                              'state.'),
        ]
        for option in reversed(options):
            cmd = option(cmd)
        return cmd
    return wrapper


def grid_options(cmd):
    options = [
        click.option('--t-end', default=DEFAULT_T_END, show_default=True,
                     type=float, help='Last time of the output grid.'),
        click.option('--nodes', default=DEFAULT_NODES, show_default=True,
                     type=int, help='Number of uniform time nodes.'),
        click.option('--dt', default=DEFAULT_DT, show_default=True,
                     type=float, help='RK4 step for the integrator route.'),
        click.option('--seed', default=DEFAULT_SEED, show_default=True,
                     type=click.IntRange(min=0),
                     help='Seed recorded in the output.'),
    ]
    for option in reversed(options):
        cmd = option(cmd)
    return cmd


class CliState(object):
    def __init__(self, max_workers=None):
        self.max_workers = max_workers


@click.group()
@click.option('--quiet/--not-quiet',
              show_default=True,
              default=False,
              help='Suppress progress messages on stderr.')
@click.option('--config',
              'config_file',
              type=click.Path(exists=True, dir_okay=False),
              is_eager=True,
              expose_value=True,
              callback=_apply_config_file,
              help='Flat key=value file whose values become flag defaults.')
@click.option('--max-workers',
              default=THREADS,
              show_default=True,
              type=click.IntRange(min=1),
              help='Maximum number of forked workers.')
@click.pass_context
def cli(ctx, quiet=False, config_file=None, max_workers=None):
    global echo
    if quiet:
        echo = echo_dev_null
    else:
        echo = echo_always
    if ctx.obj is None:
        ctx.obj = CliState()
    ctx.obj.max_workers = max_workers


@cli.command(help='Show the version.')
def version():
    click.echo(__version__)


@cli.command(help='Evolve one Horodecki state and print its measures.')
@model_options()
@grid_options
@click.option('--route',
              default='analytic',
              show_default=True,
              type=click.Choice(['analytic', 'integrator', 'propagator']),
              help='How the trajectory is produced.')
@click.option('--format',
              'fmt',
              default='csv',
              show_default=True,
              type=click.Choice(['csv', 'json']),
              help='Output format.')
@click.pass_obj
def evolve(obj, jx, jy, jz, chi, gamma, p, t_end, nodes, dt, seed, route,
           fmt):
    params = _usage_guard(ModelParams, jx, jy, jz, chi, gamma, p)
    times = _usage_guard(time_grid, t_end, nodes)
    if dt <= 0:
        raise click.BadParameter('must be positive', param_hint='--dt')
    echo('Evolving *%d* nodes on the *%s* route' % (len(times), route))
    records = measure_trajectory(trajectory_for(params, route, times, dt))
    rows = [output_row(params, route, r) for r in records]
    if fmt == 'csv':
        emit(''.join(csv_lines(rows)))
    else:
        deaths = death_intervals(records)
        emit(to_json({'schema': SCHEMA_VERSION,
                      'seed': seed,
                      'params': params._asdict(),
                      'route': route,
                      'dt': dt,
                      'rows': rows_as_dicts(rows),
                      'deaths': [list(d) for d in deaths],
                      'violations': [[v.t_start, v.t_end, v.max_excess]
                                     for v in find_violations(records)]}))


def _fmt(value):
    return '%g' % value


def panel_name(figure, p, chi, gamma):
    return '%s_p%s_chi%s_gamma%s.csv' % (figure, _fmt(p), _fmt(chi),
                                         _fmt(gamma))


def surface_name(figure, chi, gamma):
    return '%s_chi%s_gamma%s.csv' % (figure, _fmt(chi), _fmt(gamma))


def route_deviation_block(config, comparisons):
    points = []
    for params, comparison in zip(config.points(), comparisons):
        points.append({'p': params.p,
                       'chi': params.chi,
                       'gamma': params.gamma,
                       'max_deviation': comparison.max_deviation,
                       'propagator_deviation':
                           comparison.propagator_deviation,
                       'deviations': [float(x) for x in
                                      comparison.deviations]})
    return {'max_deviation': max(pt['max_deviation'] for pt in points),
            'times': [float(t) for t in config.times()],
            'points': points}


@cli.command(help='Regenerate the data behind one figure.')
@click.argument('name', type=click.Choice(sorted(FIGURE_GAMMAS)))
@click.option('--out',
              required=True,
              type=click.Path(file_okay=False),
              help='Directory that receives the CSV files and manifest.')
@click.option('--jx', default=DEFAULT_JX, show_default=True, type=float)
@click.option('--jy', default=DEFAULT_JY, show_default=True, type=float)
@click.option('--jz', default=DEFAULT_JZ, show_default=True, type=float)
@grid_options
@click.option('--p-nodes',
              default=101,
              show_default=True,
              type=click.IntRange(min=2),
              help='Number of p values on [0, 1] for fig2.')
@click.option('--route',
              default='analytic',
              show_default=True,
              type=click.Choice(['analytic', 'integrator', 'both']),
              help='Closed-form data, RK4 ground truth or both.')
@click.pass_obj
def figure(obj, name, out, jx, jy, jz, t_end, nodes, dt, seed, p_nodes,
           route):
    try:
        if not os.path.isdir(out):
            os.makedirs(out)
        if not os.access(out, os.W_OK):
            raise OSError('directory is not writable')
    except OSError as ex:
        raise click.BadParameter('%s: %s' % (out, ex), param_hint='--out')

    if name == 'fig2':
        p_values = [k / float(p_nodes - 1) for k in range(p_nodes)]
        chi_values = (FIG2_CHI,)
    else:
        p_values = FIGURE_P_VALUES
        chi_values = FIGURE_CHI_VALUES
    config = _usage_guard(SweepConfig, p_values, chi_values,
                          FIGURE_GAMMAS[name], jx, jy, jz, t_end, nodes, dt,
                          seed, route)
    echo('Computing *%s*: %d grid points x %d nodes' %
         (name, len(config.points()), config.nodes))
    rows = run_sweep(config, max_parallel=obj.max_workers)

    panels = {}
    for row in rows:
        params = row.params
        if name == 'fig2':
            fname = surface_name(name, params.chi, params.gamma)
        else:
            fname = panel_name(name, params.p, params.chi, params.gamma)
        panels.setdefault(fname, []).append(
            output_row(params, row.route, row.record))
    for fname in sorted(panels):
        write_csv_file(panels[fname], os.path.join(out, fname))
        echo('Wrote *%s*' % fname, indent=True)

    config_dict = dict(config._asdict())
    for key in ('p_values', 'chi_values', 'gamma_values'):
        config_dict[key] = list(config_dict[key])
    manifest = {'schema': SCHEMA_VERSION,
                'figure': name,
                'version': __version__,
                'config': config_dict,
                'files': sorted(panels)}
    if route == 'both':
        manifest['route_deviation'] = route_deviation_block(
            config, route_deviations(config, max_parallel=obj.max_workers))
        echo('Largest analytic/integrator deviation: *%.3e*' %
             manifest['route_deviation']['max_deviation'], indent=True)
    write_json_file(manifest, os.path.join(out, 'manifest.json'))


@cli.command(name='check-bounds',
             help='Search for violations of IC <= sqrt((1 + C^2)/2).')
@model_options(chi=1.0)
@grid_options
@click.option('--p-nodes',
              default=101,
              show_default=True,
              type=click.IntRange(min=1),
              help='Number of p values on [0, 1]; 1 means --p only.')
@click.option('--route',
              default='analytic',
              show_default=True,
              type=click.Choice(['analytic', 'integrator']),
              help='How trajectories are produced.')
@click.option('--random-rank',
              default=None,
              type=click.IntRange(1, 4),
              help='Audit random states of this rank instead of the grid.')
@click.option('--samples',
              default=10000,
              show_default=True,
              type=click.IntRange(min=1),
              help='Random states for --random-rank.')
@click.pass_obj
def check_bounds(obj, jx, jy, jz, chi, gamma, p, t_end, nodes, dt, seed,
                 p_nodes, route, random_rank, samples):
    params = _usage_guard(ModelParams, jx, jy, jz, chi, gamma, p)
    if random_rank is not None:
        echo('Auditing *%d* random states of rank *%d*' %
             (samples, random_rank))
        report = random_audit(samples, [random_rank], seed,
                              max_parallel=obj.max_workers)
        summary = report.ranks[0]
        emit(to_json({'schema': SCHEMA_VERSION,
                      'mode': 'random',
                      'seed': seed,
                      'rank': random_rank,
                      'samples': samples,
                      'max_excess': summary['max_upper_bound_excess'],
                      'violations': [{'sample': idx, 'excess': excess}
                                     for idx, excess
                                     in summary['violating']]}))
        return

    times = _usage_guard(time_grid, t_end, nodes)
    if p_nodes == 1:
        p_values = [params.p]
    else:
        p_values = [k / float(p_nodes - 1) for k in range(p_nodes)]
    echo('Scanning *%d* p values x *%d* nodes' % (len(p_values), len(times)))
    scan = bound_scan(params, p_values, times, route=route, dt=dt,
                      max_parallel=obj.max_workers)
    if scan.violations:
        echo('Found *%d* violation intervals' % len(scan.violations))
    else:
        echo('No violations; largest excess is *%.3e*' % scan.max_excess)
    emit(to_json({'schema': SCHEMA_VERSION,
                  'mode': 'grid',
                  'seed': seed,
                  'params': params._asdict(),
                  'route': route,
                  'grid': {'t_end': float(times[-1]),
                           'nodes': len(times),
                           'p_values': p_values},
                  'points': scan.points,
                  'max_excess': scan.max_excess,
                  'argmax': {'p': scan.argmax_p, 't': scan.argmax_t},
                  'violations': [{'p': v.params.p,
                                  't_start': v.t_start,
                                  't_end': v.t_end,
                                  'max_excess': v.max_excess}
                                 for v in scan.violations]}))


@cli.command(name='random-audit',
             help='Check the trade-off identities on random states.')
@click.option('--samples',
              default=10000,
              show_default=True,
              type=click.IntRange(min=1),
              help='Random states per rank.')
@click.option('--rank',
              'ranks',
              multiple=True,
              type=click.IntRange(1, 4),
              help='Rank to audit; repeat for several (default: 1 to 4).')
@click.option('--seed',
              default=DEFAULT_SEED,
              show_default=True,
              type=click.IntRange(min=0),
              help='Seed of the random stream.')
@click.option('--chunk',
              default=AUDIT_CHUNK,
              show_default=True,
              type=click.IntRange(min=1),
              help='Samples per task.')
@click.pass_obj
def random_audit_cmd(obj, samples, ranks, seed, chunk):
    ranks = sorted(set(ranks)) or [1, 2, 3, 4]
    echo('Auditing *%d* states per rank for ranks %s' %
         (samples, ', '.join(str(r) for r in ranks)))
    report = random_audit(samples, ranks, seed, chunk=chunk,
                          max_parallel=obj.max_workers)
    summaries = []
    for summary in report.ranks:
        summary = dict(summary)
        summary.pop('violating')
        summaries.append(summary)
    emit(to_json({'schema': SCHEMA_VERSION,
                  'seed': report.seed,
                  'samples': report.samples,
                  'chunk': report.chunk,
                  'ranks': summaries,
                  'passed': report.passed}))
    if not report.passed:
        echo('A universal identity *failed*', err=True)
        sys.exit(1)


def print_tradeoff_exception(ex):
    echo_always(ex.headline, indent=True, nl=False, bold=True)
    if ex.line_no is None:
        echo_always(':')
    else:
        echo_always(' on line %d:' % ex.line_no, bold=True)
    echo_always(ex.message, indent=True, bold=False)


def print_unknown_exception(ex):
    echo_always('Internal error', indent=True, bold=True)
    echo_always(traceback.format_exc(), highlight=None, highlight_bold=False)


def main(args=None, handle_exceptions=True):
    state = CliState()
    try:
        if args is None:
            cli(auto_envvar_prefix='XYZ_TRADEOFF',
                obj=state,
                prog_name='xyz-tradeoff')
        else:
            try:
                cli.main(args=args,
                         obj=state,
                         prog_name='xyz-tradeoff',
                         auto_envvar_prefix='XYZ_TRADEOFF')
            except SystemExit as e:
                return e.code
    except TradeoffException as x:
        if handle_exceptions:
            print_tradeoff_exception(x)
            sys.exit(1)
        else:
            raise
    except Exception as x:
        if handle_exceptions:
            print_unknown_exception(x)
            sys.exit(1)
        else:
            raise


if __name__ == '__main__':
    main()
