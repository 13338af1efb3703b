import sys
import traceback


class TradeoffException(Exception):
    headline = 'Computation failed'

    def __init__(self, msg='', lineno=None):
        self.message = msg
        self.line_no = lineno
        super(TradeoffException, self).__init__()

    def __str__(self):
        prefix = 'line %d: ' % self.line_no if self.line_no else ''
        return '%s%s' % (prefix, self.message)


class InvalidInput(TradeoffException):
    headline = 'Invalid input'


class NotHermitian(InvalidInput):
    headline = 'Matrix is not Hermitian'

    def __init__(self, deviation, tolerance):
        msg = "Max |a_ij - conj(a_ji)| is %.3e, above the tolerance "\
              "%.1e." % (deviation, tolerance)
        super(NotHermitian, self).__init__(msg)
        self.deviation = deviation


class NotPositive(InvalidInput):
    headline = 'Matrix is not positive semidefinite'

    def __init__(self, min_eigenvalue, tolerance):
        msg = "Smallest eigenvalue is %.3e, below the tolerance "\
              "-%.1e." % (min_eigenvalue, tolerance)
        super(NotPositive, self).__init__(msg)
        self.min_eigenvalue = min_eigenvalue


class InvalidState(TradeoffException):
    headline = 'Invalid quantum state'


class EigenNonConvergence(TradeoffException):
    headline = 'Eigensolver did not converge'

    def __init__(self, sweeps, residual):
        msg = "Jacobi iteration stopped after %d sweeps with an "\
              "off-diagonal residual of %.3e." % (sweeps, residual)
        super(EigenNonConvergence, self).__init__(msg)
        self.sweeps = sweeps
        self.residual = residual


class IntegratorFailure(TradeoffException):
    headline = 'Integrator failed'

    def __init__(self, msg, t):
        super(IntegratorFailure, self).__init__('t=%.6g: %s' % (t, msg))
        self.t = t


class InvariantViolation(TradeoffException):
    headline = 'Invariant violated'


class ConfigurationError(TradeoffException):
    headline = 'Invalid configuration'


class WorkerFailure(TradeoffException):
    headline = 'Worker failed'


class TradeoffExceptionWrapper(Exception):
    # Carries an exception raised in a forked worker back to the parent
    # as plain strings, so that it survives pickling.
    def __init__(self, exc=None):
        if exc is not None:
            self.exception = str(exc)
            self.type = '%s.%s' % (exc.__class__.__module__,
                                   exc.__class__.__name__)
            if sys.exc_info()[0] is None:
                self.stacktrace = None
            else:
                self.stacktrace = traceback.format_exc()

    def __reduce__(self):
        return TradeoffExceptionWrapper, (None,), self.__dict__

    def __getstate__(self):
        return self.__dict__

    def __setstate__(self, state):
        self.__dict__ = state

    def __repr__(self):
        return str(self)

    def __str__(self):
        if self.stacktrace:
            return self.stacktrace
        else:
            return '[no stacktrace]\n%s: %s' % (self.type, self.exception)
