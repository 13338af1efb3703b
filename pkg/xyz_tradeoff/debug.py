from __future__ import print_function
import sys

from functools import partial

# Set
#
# - XYZ_TRADEOFF_DEBUG_EIGEN=1
#   to see sweep counts and residuals of the Jacobi solvers
# - XYZ_TRADEOFF_DEBUG_INTEGRATOR=1
#   to see step sizes and per-node drift of the RK4 integrator
# - XYZ_TRADEOFF_DEBUG_SWEEP=1
#   to see the grid points dispatched by parameter sweeps
# - XYZ_TRADEOFF_DEBUG_AUDIT=1
#   to see the chunks drawn by randomized audits


class Debug(object):
    def __init__(self):
        import xyz_tradeoff.tradeoff_config as config
        for typ in config.DEBUG_OPTIONS:
            if getattr(config, 'XYZ_TRADEOFF_DEBUG_%s' % typ.upper()):
                op = partial(self.log, typ)
            else:
                op = self.noop
            # use debug.$type_log(msg) to emit a diagnostic for $type
            setattr(self, '%s_log' % typ, op)
            # use the debug.$type flag to check if logging is enabled for $type
            setattr(self, typ, op != self.noop)

    def log(self, typ, msg):
        if not isinstance(msg, str):
            msg = ' '.join(str(x) for x in msg)
        print('debug[%s]: %s' % (typ, msg), file=sys.stderr)

    def noop(self, msg):
        pass


debug = Debug()
