"""Engine configuration: every tunable constant in one place.

All matching, creation and interaction code reads its constants from an
EngineConfig instance so that documents, the CLI and tests can override
them uniformly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields

from .errors import DocumentError

# Serialized key -> dataclass field.  "lambda" is a Python keyword, hence
# the one rename; the rest match their field names.
_KEY_TO_FIELD = {
    "lambda": "lam",
    "epsilon": "epsilon",
    "threshold": "threshold_frac",
    "hold_ms": "hold_ms",
    "resample_n": "resample_n",
    "smooth_iterations": "smooth_iterations",
    "hold_radius": "hold_radius",
    "corner_samples": "corner_samples",
    "corner_window": "corner_window",
    "corner_ratio": "corner_ratio",
    "solve_window_frac": "solve_window_frac",
    "solve_tol_frac": "solve_tol_frac",
    "shape_only_default": "shape_only_default",
}
_FIELD_TO_KEY = {v: k for k, v in _KEY_TO_FIELD.items()}


@dataclass
class EngineConfig:
    resample_n: int = 30          # control points for squidget curves and strokes
    smooth_iterations: int = 2    # corner-cutting passes before resampling a new curve
    lam: float = 0.7              # implicit score blend between shape distance and move size
    epsilon: float = 1e-9         # keeps 1/distance and 1/dev finite at exact matches
    threshold_frac: float = 0.25  # no selection beyond (frac * stroke bbox diagonal)^2 per point
    hold_ms: int = 300            # stillness required at stroke end to enter drag mode
    hold_radius: float = 4.0      # screen units the pen may wander while holding
    corner_samples: int = 64      # dense resampling used by corner detection
    corner_window: int = 3        # straw half-window
    corner_ratio: float = 0.95    # corner threshold as a fraction of the median straw
    solve_window_frac: float = 0.25   # scalar search window as a fraction of the range
    solve_tol_frac: float = 1e-4      # scalar search tolerance as a fraction of the range
    shape_only_default: bool = False  # center curves during single-stroke selection

    def to_dict(self) -> dict:
        d = asdict(self)
        return {_FIELD_TO_KEY[f.name]: d[f.name] for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        kwargs = {}
        for key, value in data.items():
            field = _KEY_TO_FIELD.get(key)
            if field is None:
                raise DocumentError(f"unknown config key: {key}")
            kwargs[field] = value
        return cls(**kwargs)

    def override(self, key: str, raw: str) -> None:
        """Apply a CLI-style "key=value" override; key may use either spelling."""
        field = _KEY_TO_FIELD.get(key, key if key in {f.name for f in fields(self)} else None)
        if field is None:
            raise DocumentError(f"unknown config key: {key}")
        current = getattr(self, field)
        if isinstance(current, bool):
            value = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(current, int):
            value = int(raw)
        else:
            value = float(raw)
        setattr(self, field, value)

    def sha256(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()
