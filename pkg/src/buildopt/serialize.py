"""Canonical serialization shared by exports, caching and the service.

Floats are rendered with six significant digits and keys sorted, so equal
results serialize to identical bytes; fingerprints and golden tests rely on
that.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any


def canonical_float(x: float) -> float:
    """Round to six significant digits (keeps JSON small and stable)."""
    if x == 0 or not math.isfinite(x):
        return x
    return float(f"{x:.6g}")


def _canonize(obj: Any) -> Any:
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return repr(obj)  # "inf"/"-inf"/"nan" as stable string tokens
        x = canonical_float(obj)
        # integral values serialize without a trailing ".0" so the JSON
        # literal matches how JavaScript prints the same number
        if x == int(x) and abs(x) < 1e15:
            return int(x)
        return x
    if isinstance(obj, dict):
        return {k: _canonize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonize(v) for v in obj]
    return obj


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, canonical floats, no whitespace."""
    return json.dumps(_canonize(obj), sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def sha_fingerprint(text: str, length: int = 16) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:length]
