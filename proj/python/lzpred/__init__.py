"""LZW coding rates and Fano predictability bounds for road-network trajectories.

The heavy lifting happens in the C++ extension; this module adds thin
wrappers that parse the JSON reports into dictionaries.
"""

import json

from ._lzpred import (
    CodecError,
    ConfigError,
    DomainError,
    Error,
    ParseError,
    ValidationError,
    __version__,
    binary_entropy,
    code_width,
    fano_hf,
    group_predictability,
    invert_fano,
    lzw_decode,
    lzw_encode,
    lzw_rate,
)
from . import _lzpred


def run(**settings):
    """Run the raw / labeled / fused experiment and return the report as a dict."""
    return json.loads(_lzpred.run_json(**settings))


def demonstrate_bias(**settings):
    """Compare the coding estimate with the analytic optimum; returns a dict."""
    return json.loads(_lzpred.demonstrate_bias_json(**settings))


def analytic_truth(network="builtin:grid:20x20", source="dirichlet:0.2", length_law="uniform:30:40", seed=1):
    """Exact per-length entropies and optimal accuracies of a synthetic source."""
    return json.loads(_lzpred.analytic_truth(network, source, length_law, seed))


__all__ = [
    "CodecError",
    "ConfigError",
    "DomainError",
    "Error",
    "ParseError",
    "ValidationError",
    "__version__",
    "analytic_truth",
    "binary_entropy",
    "code_width",
    "demonstrate_bias",
    "fano_hf",
    "group_predictability",
    "invert_fano",
    "lzw_decode",
    "lzw_encode",
    "lzw_rate",
    "run",
]
