# -*- coding: utf-8 -*-
"""Internal utility functions, not supposed to be used by the users."""
import hashlib
import json
import math
from typing import Any

import numpy as np


def relative_gap(lower: float, upper: float) -> float:
    """
    Relative distance between two bounds, (upper - lower) / |upper|.

    Equal (or crossed) bounds give 0; a positive gap on a zero upper bound is infinite.
    """
    difference = upper - lower
    if difference <= 0.0:
        return 0.0
    if upper == 0.0 or math.isinf(difference):
        return math.inf
    return difference / abs(upper)


def discount_factor(rate: float, year: int, base_year: int) -> float:
    """Get 1 / (1 + r)^(y - y0)."""
    return 1.0 / (1.0 + rate) ** (year - base_year)


def fractionality(values: np.ndarray) -> np.ndarray:
    """Distance of each value from its nearest integer."""
    return np.abs(values - np.round(values))


def content_digest(*documents: Any) -> str:
    """Hash a sequence of JSON-serializable documents, independent of key order."""
    digest = hashlib.sha256()
    for document in documents:
        digest.update(
            json.dumps(document, sort_keys=True, separators=(",", ":")).encode("utf-8")
        )
        digest.update(b"\x00")
    return digest.hexdigest()
