import json
import os

import pytest
from click.testing import CliRunner

from xyz_tradeoff import __version__
from xyz_tradeoff.cli import cli, main, read_flat_config, panel_name,\
    surface_name
from xyz_tradeoff.exception import ConfigurationError, InvariantViolation
from xyz_tradeoff.formats import HEADER, OUTPUT_FIELDS

SMALL_GRID = ['--t-end', '1', '--nodes', '5']


def invoke(*args):
    # --quiet keeps stderr out of the captured output
    result = CliRunner().invoke(cli, ['--quiet', '--max-workers', '1'] +
                                list(args))
    return result


def csv_table(text):
    lines = text.splitlines()
    return lines[0], [dict(zip(OUTPUT_FIELDS, line.split(',')))
                      for line in lines[1:]]


def test_version():
    result = CliRunner().invoke(cli, ['version'])
    assert result.exit_code == 0
    assert result.output.strip() == __version__


def test_evolve_csv():
    result = invoke('evolve', *SMALL_GRID)
    assert result.exit_code == 0, result.output
    header, rows = csv_table(result.output)
    assert header == HEADER
    assert len(rows) == 5
    assert [float(r['t']) for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert set(r['route'] for r in rows) == {'analytic'}
    # default initial state is the Bell state |Psi+>
    assert float(rows[0]['C']) == pytest.approx(1.0, abs=1e-10)
    assert rows[0]['C'] == '%.16e' % float(rows[0]['C'])


@pytest.mark.parametrize('route', ['analytic', 'integrator', 'propagator'])
def test_evolve_routes_agree_without_damping(route):
    result = invoke('evolve', '--route', route, '--p', '0.66', '--chi', '1',
                    '--dt', '0.001', *SMALL_GRID)
    assert result.exit_code == 0, result.output
    _, rows = csv_table(result.output)
    reference = csv_table(invoke('evolve', '--p', '0.66', '--chi', '1',
                                 *SMALL_GRID).output)[1]
    for row, ref in zip(rows, reference):
        assert row['route'] == route
        assert float(row['C']) == pytest.approx(float(ref['C']), abs=1e-8)


def test_evolve_separable_line():
    result = invoke('evolve', '--jy', '0.5', '--p', '0', '--gamma', '0.25',
                    *SMALL_GRID)
    assert result.exit_code == 0, result.output
    _, rows = csv_table(result.output)
    assert all(float(r['C']) <= 1e-9 for r in rows)


def test_evolve_single_node_horodecki():
    result = invoke('evolve', '--t-end', '0', '--nodes', '1', '--p', '0.5')
    assert result.exit_code == 0, result.output
    _, rows = csv_table(result.output)
    assert len(rows) == 1
    for field in ('C', 'IC', 'F', 'purity'):
        assert float(rows[0][field]) == pytest.approx(0.5, abs=1e-7)


def test_evolve_bell_line():
    result = invoke('evolve', '--p', '1', '--chi', '1', '--nodes', '101')
    _, rows = csv_table(result.output)
    assert len(rows) == 101
    assert all(abs(float(r['C']) - float(r['IC'])) <= 1e-9 for r in rows)


def test_evolve_json():
    result = invoke('evolve', '--format', 'json', '--p', '0.33', '--chi',
                    '1', '--seed', '3', '--t-end', '10', '--nodes', '1001')
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload['schema'] == 1
    assert payload['seed'] == 3
    assert payload['route'] == 'analytic'
    assert payload['params']['p'] == 0.33
    assert len(payload['rows']) == 1001
    assert payload['rows'][-1]['t'] == 10.0
    assert payload['deaths']
    assert payload['violations'] == []


@pytest.mark.parametrize('args', [['--p', '1.5'], ['--gamma', '-1'],
                                  ['--nodes', '0'], ['--dt', '0'],
                                  ['--route', 'euler'],
                                  ['--format', 'xml'], ['--seed', '-1'],
                                  ['--t-end', '0', '--nodes', '5']])
def test_evolve_usage_errors(args):
    assert invoke('evolve', *args).exit_code == 2


def _figure(tmp_path, name, *args, **kwargs):
    out = str(tmp_path / kwargs.get('sub', name))
    result = CliRunner().invoke(cli, ['--quiet', '--max-workers',
                                      str(kwargs.get('workers', 1)),
                                      'figure', name, '--out', out] +
                                list(args))
    assert result.exit_code == 0, result.output
    return out


@pytest.mark.parametrize('name,gamma', [('fig3', 0.0), ('fig4', 0.25)])
def test_figure_panels(tmp_path, name, gamma):
    out = _figure(tmp_path, name, *SMALL_GRID)
    expected = sorted(panel_name(name, p, chi, gamma)
                      for p in (0.0, 0.33, 0.66, 1.0)
                      for chi in (0.0, 0.5, 1.0))
    assert sorted(os.listdir(out)) == sorted(expected + ['manifest.json'])
    assert '%s_p0.33_chi0.5_gamma%g.csv' % (name, gamma) in expected
    with open(os.path.join(out, 'manifest.json')) as f:
        manifest = json.load(f)
    assert manifest['figure'] == name
    assert manifest['files'] == expected
    assert manifest['config']['gamma_values'] == [gamma]
    with open(os.path.join(out, expected[0])) as f:
        header, rows = csv_table(f.read())
    assert header == HEADER
    assert len(rows) == 5


@pytest.mark.parametrize('name', ['fig3', 'fig4'])
def test_figure_is_deterministic(tmp_path, name):
    first = _figure(tmp_path, name, *SMALL_GRID, sub='one', workers=1)
    second = _figure(tmp_path, name, *SMALL_GRID, sub='two', workers=3)
    assert sorted(os.listdir(first)) == sorted(os.listdir(second))
    for fname in os.listdir(first):
        with open(os.path.join(first, fname), 'rb') as a, \
                open(os.path.join(second, fname), 'rb') as b:
            assert a.read() == b.read()


def test_figure_both_routes(tmp_path):
    out = _figure(tmp_path, 'fig3', '--route', 'both', '--dt', '0.01',
                  *SMALL_GRID)
    with open(os.path.join(out, panel_name('fig3', 1.0, 1.0, 0.0))) as f:
        _, rows = csv_table(f.read())
    assert [r['route'] for r in rows[:2]] == ['analytic', 'integrator']
    assert len(rows) == 10


@pytest.mark.parametrize('name, gamma', [('fig3', 0.0), ('fig4', 0.25)])
def test_figure_archives_route_deviation(tmp_path, name, gamma):
    out = _figure(tmp_path, name, '--route', 'both', '--dt', '0.001',
                  *SMALL_GRID)
    with open(os.path.join(out, 'manifest.json')) as f:
        block = json.load(f)['route_deviation']
    assert block['times'] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert len(block['points']) == 12
    keys = [(pt['gamma'], pt['chi'], pt['p']) for pt in block['points']]
    assert keys == sorted((gamma, chi, p) for chi in (0.0, 0.5, 1.0)
                          for p in (0.0, 0.33, 0.66, 1.0))
    worst = max(pt['max_deviation'] for pt in block['points'])
    assert block['max_deviation'] == worst
    for pt in block['points']:
        assert len(pt['deviations']) == 5
        assert pt['deviations'][0] <= 1e-15
        assert max(pt['deviations']) == pt['max_deviation']
    if gamma == 0:
        assert worst <= 1e-8
        assert all(pt['propagator_deviation'] <= 1e-12
                   for pt in block['points'])
    else:
        assert worst > 1e-3
        assert all(pt['propagator_deviation'] is None
                   for pt in block['points'])


def test_figure_single_route_has_no_deviation_block(tmp_path):
    out = _figure(tmp_path, 'fig3', *SMALL_GRID)
    with open(os.path.join(out, 'manifest.json')) as f:
        assert 'route_deviation' not in json.load(f)


def test_figure_surface(tmp_path):
    out = _figure(tmp_path, 'fig2', '--p-nodes', '3', '--t-end', '1',
                  '--nodes', '4')
    files = [surface_name('fig2', 1.0, 0.0), surface_name('fig2', 1.0, 0.25)]
    assert files == ['fig2_chi1_gamma0.csv', 'fig2_chi1_gamma0.25.csv']
    assert sorted(os.listdir(out)) == sorted(files + ['manifest.json'])
    with open(os.path.join(out, files[1])) as f:
        _, rows = csv_table(f.read())
    assert len(rows) == 12
    assert [float(r['p']) for r in rows[::4]] == [0.0, 0.5, 1.0]
    assert set(float(r['gamma']) for r in rows) == {0.25}


def test_figure_unwritable_out(tmp_path):
    blocker = tmp_path / 'blocker'
    blocker.write_text('not a directory')
    result = invoke('figure', 'fig3', '--out', str(blocker / 'sub'),
                    *SMALL_GRID)
    assert result.exit_code == 2


def test_figure_unknown_name(tmp_path):
    assert invoke('figure', 'fig9', '--out', str(tmp_path)).exit_code == 2


def test_check_bounds_grid():
    result = invoke('check-bounds', '--p-nodes', '3', '--t-end', '10',
                    '--nodes', '21', '--gamma', '0.25')
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload['mode'] == 'grid'
    assert payload['params']['chi'] == 1.0
    assert payload['grid']['p_values'] == [0.0, 0.5, 1.0]
    assert payload['points'] == 63
    assert payload['violations'] == []
    assert payload['max_excess'] <= 1e-9


def test_check_bounds_single_p():
    result = invoke('check-bounds', '--p-nodes', '1', '--p', '1',
                    *SMALL_GRID)
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload['grid']['p_values'] == [1.0]
    assert payload['argmax']['p'] == 1.0


def test_check_bounds_random_rank():
    result = invoke('check-bounds', '--random-rank', '2', '--samples', '500',
                    '--seed', '11')
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload['mode'] == 'random'
    assert payload['rank'] == 2
    assert payload['samples'] == 500
    assert payload['violations'] == []


def test_random_audit_command():
    args = ['random-audit', '--samples', '200', '--rank', '3', '--rank',
            '1', '--seed', '7', '--chunk', '64']
    result = invoke(*args)
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload['passed'] is True
    assert [r['rank'] for r in payload['ranks']] == [1, 3]
    assert all('violating' not in r for r in payload['ranks'])
    assert payload['ranks'][0]['max_complementarity_gap'] <= 1e-10
    again = CliRunner().invoke(cli, ['--quiet', '--max-workers', '2'] + args)
    assert again.output == result.output


def test_random_audit_rejects_bad_rank():
    assert invoke('random-audit', '--rank', '5').exit_code == 2


def test_config_file(tmp_path):
    config = tmp_path / 'run.cfg'
    config.write_text('# evolve settings\nchi = 1\n--nodes=3\n'
                      't-end = 1  # short\nunknown = 4\n')
    result = CliRunner().invoke(cli, ['--quiet', '--config', str(config),
                                      'evolve'])
    assert result.exit_code == 0, result.output
    _, rows = csv_table(result.output)
    assert len(rows) == 3
    assert all(float(r['chi']) == 1.0 for r in rows)
    override = CliRunner().invoke(cli, ['--quiet', '--config', str(config),
                                        'evolve', '--nodes', '2'])
    assert len(csv_table(override.output)[1]) == 2


def test_bad_config_file(tmp_path):
    config = tmp_path / 'bad.cfg'
    config.write_text('chi = 1\njust some words\n')
    result = CliRunner().invoke(cli, ['--config', str(config), 'evolve'])
    assert result.exit_code == 2
    with pytest.raises(ConfigurationError) as err:
        read_flat_config(str(config))
    assert err.value.line_no == 2


def test_main_returns_usage_status():
    assert main(['--quiet', 'evolve', '--p', '2']) == 2


def test_main_reports_failures(monkeypatch, capsys):
    def broken(traj):
        raise InvariantViolation('broken on purpose')
    monkeypatch.setattr('xyz_tradeoff.cli.measure_trajectory', broken)
    with pytest.raises(SystemExit) as exit_info:
        main(['--quiet', 'evolve', '--nodes', '3', '--t-end', '1'])
    assert exit_info.value.code == 1
    err = capsys.readouterr().err
    assert 'Invariant violated' in err
    assert 'broken on purpose' in err
    with pytest.raises(InvariantViolation):
        main(['--quiet', 'evolve', '--nodes', '3', '--t-end', '1'],
             handle_exceptions=False)


def test_main_reports_internal_errors(monkeypatch, capsys):
    def broken(traj):
        raise RuntimeError('unexpected')
    monkeypatch.setattr('xyz_tradeoff.cli.measure_trajectory', broken)
    with pytest.raises(SystemExit) as exit_info:
        main(['--quiet', 'evolve', '--nodes', '3', '--t-end', '1'])
    assert exit_info.value.code == 1
    err = capsys.readouterr().err
    assert 'Internal error' in err
    assert 'RuntimeError: unexpected' in err
