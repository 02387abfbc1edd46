"""Gap eigenvalues of Dirac-Coulomb operators and checks of the accompanying inequalities."""

import json

from . import _diracgap
from ._diracgap import DiracGapError, channels, kato_constant, legendre_q, run_cli

__all__ = [
    "DiracGapError",
    "certificate",
    "channels",
    "core_check",
    "eigenvalues",
    "hardy_check",
    "kato_constant",
    "kernel_check",
    "legendre_q",
    "run_cli",
    "sweep",
]


def _call(fn, kw):
    return json.loads(fn(kw))


def eigenvalues(**kw):
    """k-th gap eigenvalue; keywords are the config keys (dim, nu, k, method, nodes, ...)."""
    return _call(_diracgap._eigenvalues, kw)


def hardy_check(**kw):
    return _call(_diracgap._hardy_check, kw)


def kernel_check(**kw):
    return _call(_diracgap._kernel_check, kw)


def core_check(**kw):
    return _call(_diracgap._core_check, kw)


def certificate(**kw):
    return _call(_diracgap._certificate, kw)


def sweep(**kw):
    return _call(_diracgap._sweep, kw)
