import os
import json
from multiprocessing import cpu_count

from xyz_tradeoff.exception import ConfigurationError


def init_config():
    # Read configuration from $XYZ_TRADEOFF_HOME/config_<profile>.json.
    home = os.environ.get('XYZ_TRADEOFF_HOME', '~/.xyz_tradeoff')
    profile = os.environ.get('XYZ_TRADEOFF_PROFILE')
    path_to_config = os.path.join(home, 'config.json')
    if profile:
        path_to_config = os.path.join(home, 'config_%s.json' % profile)
    path_to_config = os.path.expanduser(path_to_config)
    config = {}
    if os.path.exists(path_to_config):
        with open(path_to_config) as f:
            try:
                return json.load(f)
            except ValueError as ex:
                raise ConfigurationError("Cannot parse '%s': %s" %
                                         (path_to_config, ex))
    elif profile:
        raise ConfigurationError("Unable to locate XYZ_TRADEOFF_PROFILE "
                                 "'%s' in '%s'" % (profile, home))
    return config


# Initialize defaults required to setup environment variables.
TRADEOFF_CONFIG = init_config()


def from_conf(name, default=None):
    return os.environ.get(name, TRADEOFF_CONFIG.get(name, default))


###
# Model defaults (the coupling triple used throughout the figures)
###
DEFAULT_JX = float(from_conf('XYZ_TRADEOFF_DEFAULT_JX', 0.5))
DEFAULT_JY = float(from_conf('XYZ_TRADEOFF_DEFAULT_JY', 0.3))
DEFAULT_JZ = float(from_conf('XYZ_TRADEOFF_DEFAULT_JZ', 0.8))

###
# Time grid and integrator defaults
###
DEFAULT_T_END = float(from_conf('XYZ_TRADEOFF_DEFAULT_T_END', 10.0))
DEFAULT_NODES = int(from_conf('XYZ_TRADEOFF_DEFAULT_NODES', 1000))
DEFAULT_DT = float(from_conf('XYZ_TRADEOFF_DEFAULT_DT', 1e-3))

###
# Randomized audits
###
DEFAULT_SEED = int(from_conf('XYZ_TRADEOFF_DEFAULT_SEED', 0))
# Samples per audit task. Part of the random stream layout: changing it
# changes which states a given seed produces.
AUDIT_CHUNK = int(from_conf('XYZ_TRADEOFF_AUDIT_CHUNK', 1000))

###
# Parallelism
###
# Upper bound on forked workers for sweeps and audits.
THREADS = int(from_conf('XYZ_TRADEOFF_THREADS', cpu_count()))

###
# Debug configuration
###
DEBUG_OPTIONS = ['eigen', 'integrator', 'sweep', 'audit']

for typ in DEBUG_OPTIONS:
    vars()['XYZ_TRADEOFF_DEBUG_%s' % typ.upper()] =\
        from_conf('XYZ_TRADEOFF_DEBUG_%s' % typ.upper())
del typ
