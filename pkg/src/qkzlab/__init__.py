"""Numerical laboratory for hypergeometric solutions of the trigonometric qKZ equation
for U_q(sl_n) with |q| = 1: double sine functions, weight functions, contour
integrals of the hypergeometric pairing and its closed-form determinant."""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .combinatorics import JTuple, NuVector, enumerate_z  # noqa: E402
from .errors import *  # noqa: E402,F401,F403
from .params import Params, default_params  # noqa: E402
from .special_functions import Periods, log_s2, s2  # noqa: E402
from .integration import QuadratureConfig, pairing, pairing_matrix  # noqa: E402
from .qkz_operators import rhs_theorem  # noqa: E402

__all__ = [
    "BACKEND", "JTuple", "NuVector", "enumerate_z", "Params", "default_params", "Periods",
    "log_s2", "s2", "QuadratureConfig", "pairing", "pairing_matrix", "rhs_theorem",
    "__version__",
]
