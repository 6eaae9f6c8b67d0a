"""Finite-volume laboratory for trimmed Anderson models."""

import json

from ._core import (
    InvalidArgument,
    NumericError,
    box_sites,
    chi,
    compact_eigenfunctions,
    decoupling_constant,
    eigvalsh,
    free_hamiltonian,
    gamma1_eigenfunction,
    green,
    green_general,
    hamiltonian,
    in_gamma,
    relative_density,
    resolvent_identity_residual,
    s2w_identity_check,
    schur_green,
    u_sharp,
)
from ._core import run as _run

__version__ = "0.1.0"


def run(config):
    """Run an experiment. `config` is a dict (or JSON text); returns (record dict, csv text)."""
    text = config if isinstance(config, str) else json.dumps(config)
    record, csv = _run(text)
    return json.loads(record), csv
