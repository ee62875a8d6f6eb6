"""Dilations, spectral calculus and transference checks on finite Lp spaces."""

import json as _json
import os as _os

from . import _core
from ._core import (
    ContractionError,
    ConvergenceError,
    DomainError,
    Error,
    InputError,
    complex_gamma,
    convolver_upper,
    extremal_vector,
    imaginary_power,
    khinchin_constants,
    mellin_residual,
    norm2_mu,
    positive_norm,
    semigroup,
    suite_names,
    transfer_operator,
    verify_dilation,
    von_neumann,
)

__version__ = "0.1.0"

EXIT_CODES = {
    "pass": 0,
    "check_failure": 2,
    "input": 3,
    "convergence": 4,
    "domain": 5,
    "contraction": 6,
}


def run_suite(suite, config=None, *, seed=None, tol=None, base_dir=None):
    """Run a named suite and return its report as a dict.

    `config` is a dict or a path to a JSON document; relative file references
    inside a document resolve against its directory unless `base_dir` is given.
    """
    if config is None:
        config = {}
    if isinstance(config, (str, _os.PathLike)):
        path = _os.fspath(config)
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        if base_dir is None:
            base_dir = _os.path.dirname(path)
    else:
        text = _json.dumps(config)
    return _json.loads(_core.run_suite_json(suite, text, seed, tol, base_dir or ""))


__all__ = [
    "ContractionError",
    "ConvergenceError",
    "DomainError",
    "EXIT_CODES",
    "Error",
    "InputError",
    "complex_gamma",
    "convolver_upper",
    "extremal_vector",
    "imaginary_power",
    "khinchin_constants",
    "mellin_residual",
    "norm2_mu",
    "positive_norm",
    "run_suite",
    "semigroup",
    "suite_names",
    "transfer_operator",
    "verify_dilation",
    "von_neumann",
]
