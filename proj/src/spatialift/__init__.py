# Copyright 2026 The spatialift Authors
# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the spatialift C++ library."""

import json

from ._core import (
    ConfigError,
    DegenerateDecode,
    Error,
    InvalidArgument,
    IoError,
    ParseError,
    SchemaError,
    Scheme,
    decode_bbox,
    decode_point,
    encode_bbox,
    encode_point,
    keyword_stats,
    meteor_detail,
    nearest_anchor,
    numeric_token_cost,
    quantization_error_bound,
    run_cli,
    score_meteor,
    spatial_correct,
    spatiotemporal_pool,
)
from . import _core


def build_spatial_bench(coco, seed=0, icl=True):
    """Spatial benchmark items for a COCO-style annotation dict or JSON string."""
    text = coco if isinstance(coco, str) else json.dumps(coco)
    return [json.loads(s) for s in _core._build_spatial_bench(text, seed, icl)]


__all__ = [
    "ConfigError",
    "DegenerateDecode",
    "Error",
    "InvalidArgument",
    "IoError",
    "ParseError",
    "SchemaError",
    "Scheme",
    "build_spatial_bench",
    "decode_bbox",
    "decode_point",
    "encode_bbox",
    "encode_point",
    "keyword_stats",
    "meteor_detail",
    "nearest_anchor",
    "numeric_token_cost",
    "quantization_error_bound",
    "run_cli",
    "score_meteor",
    "spatial_correct",
    "spatiotemporal_pool",
]
