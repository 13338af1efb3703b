import json
import math
from collections import namedtuple

from xyz_tradeoff.exception import InvariantViolation
from xyz_tradeoff.lindblad import ROUTES

SCHEMA_VERSION = 1

OUTPUT_FIELDS = ['t', 'p', 'chi', 'gamma', 'Jx', 'Jy', 'Jz', 'route', 'C',
                 'IC', 'F', 'F_A', 'F_B', 'purity', 'upper_bound',
                 'residual']

HEADER = ','.join(OUTPUT_FIELDS)

OutputRow = namedtuple('OutputRow', OUTPUT_FIELDS)


def output_row(params, route, record):
    """Flatten ModelParams and a MeasureRecord into one OutputRow."""
    row = OutputRow(record.t, params.p, params.chi, params.gamma, params.Jx,
                    params.Jy, params.Jz, route, record.C, record.IC,
                    record.F, record.F_A, record.F_B, record.purity,
                    record.upper_bound, record.residual)
    if route not in ROUTES:
        raise InvariantViolation("Unknown route %r in output" % (route,))
    for name, value in zip(OUTPUT_FIELDS, row):
        if name != 'route' and not math.isfinite(value):
            raise InvariantViolation("Field %s is not finite at t=%g" %
                                     (name, record.t))
    return row


def format_value(value):
    # 17 significant digits, independent of locale
    if isinstance(value, str):
        return value
    return '%.16e' % value


def csv_lines(rows):
    yield HEADER + '\n'
    for row in rows:
        yield ','.join(format_value(v) for v in row) + '\n'


def write_csv(rows, stream):
    for line in csv_lines(rows):
        stream.write(line)


def write_csv_file(rows, path):
    # newline='' keeps LF line endings on every platform
    with open(path, 'w', newline='', encoding='utf-8') as f:
        write_csv(rows, f)


def to_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + '\n'


def write_json_file(obj, path):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        f.write(to_json(obj))


def rows_as_dicts(rows):
    return [row._asdict() for row in rows]
