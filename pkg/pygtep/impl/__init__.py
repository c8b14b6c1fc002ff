"""Solver backends."""
import os
import pprint
from typing import Callable, Dict, Optional

from pygtep.core import SolverBackend
from pygtep.lp import SolverOptions

BACKEND_ENV_VAR = "GTEP_SOLVER_BACKEND"
DEFAULT_BACKEND = "builtin"


def _builtin(options: SolverOptions) -> SolverBackend:
    from pygtep.impl.builtin import BuiltinBackend

    return BuiltinBackend(options)


def _highs(options: SolverOptions) -> SolverBackend:
    from pygtep.impl.highs import HighsBackend

    return HighsBackend(options)


_REGISTRY = {
    "builtin": _builtin,
    "highs": _highs,
}  # type: Dict[str, Callable[[SolverOptions], SolverBackend]]


def available_backends():
    """Names of the registered backends."""
    return sorted(_REGISTRY)


def get_backend(name: Optional[str] = None, options: Optional[SolverOptions] = None) -> SolverBackend:
    """
    Instantiate a backend by name.

    :param name: the backend name; None reads GTEP_SOLVER_BACKEND, then falls back to builtin.
    :param options: tolerances and limits.
    :return: the backend.
    :raise ValueError: if the name is unknown.
    """
    if name is None:
        name = os.environ.get(BACKEND_ENV_VAR, DEFAULT_BACKEND)
    if name not in _REGISTRY:
        raise ValueError(
            "Unknown solver backend {}. Available: {}.".format(
                pprint.pformat(name), pprint.pformat(available_backends())
            )
        )
    return _REGISTRY[name](options or SolverOptions())
