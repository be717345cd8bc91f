# xdiff_lab/levy/__init__.py
from xdiff_lab.levy.models import RngStream, StableParams, StreamPurpose
from xdiff_lab.levy.sampler import (
    apply_jump_cap,
    draw_increments,
    positive_stable,
    sample_increment,
    sample_increments,
    symmetric_stable,
)
from xdiff_lab.levy.validation import (
    CharFunctionEstimate,
    empirical_char_function,
    semigroup_check,
    tail_slope,
    validate_sampler,
)

__all__ = [
    "CharFunctionEstimate",
    "RngStream",
    "StableParams",
    "StreamPurpose",
    "apply_jump_cap",
    "draw_increments",
    "empirical_char_function",
    "positive_stable",
    "sample_increment",
    "sample_increments",
    "semigroup_check",
    "symmetric_stable",
    "tail_slope",
    "validate_sampler",
]
