__version__ = '1.0.0'

from .exception import TradeoffException
from .states import DensityMatrix, PureState, horodecki_state, make_rng
from .model import ModelParams
from .lindblad import Trajectory, integrate
from .analysis import SweepConfig, run_sweep, random_audit
