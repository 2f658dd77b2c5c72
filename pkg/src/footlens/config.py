"""Pipeline configuration: defaults, config files, and flag overrides.

Config files are plain KEY=VALUE lines ('#' comments allowed) using the
long flag names with underscores, e.g. ``grid_res=256``. Command-line flags
always win over file values.
"""

import os
from dataclasses import dataclass, fields

from .errors import InputError


@dataclass
class PipelineConfig:
    footprint: str = None
    data: str = None
    facades: str = None
    out: str = "out"
    crs: str = "meters"
    ribbons: int = 4
    grid_res: int = 512
    quad_order: int = 8
    max_vertices: int = 32
    rays: int = 720
    order: str = "chrono"
    filter: str = None
    two_tone: bool = False
    glyphs: bool = False
    cyclic: bool = False
    time_direction: str = "inner-earliest"
    debug_dumps: bool = False
    use_cache: bool = False
    threads: int = 1

    def validate(self):
        if self.footprint is None:
            raise InputError("a footprint file is required")
        if self.data is None:
            raise InputError("a series CSV is required")
        if self.ribbons < 1:
            raise InputError("ribbons must be positive")
        if self.grid_res < 32:
            raise InputError("grid_res below 32 cannot resolve a skeleton")
        if self.quad_order < 2:
            raise InputError("quad_order must be at least 2")
        if self.threads < 1:
            raise InputError("threads must be positive")
        if self.time_direction not in ("inner-earliest", "outer-earliest"):
            raise InputError(f"unknown time direction "
                             f"{self.time_direction!r}")
        if self.crs not in ("meters", "wgs84"):
            raise InputError(f"unknown crs {self.crs!r}")
        _parse_order(self.order)
        if self.filter is not None:
            parse_filter(self.filter)
        return self


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(name, kind, text):
    if kind is bool:
        low = text.strip().lower()
        if low in _BOOL_TRUE:
            return True
        if low in _BOOL_FALSE:
            return False
        raise InputError(f"config key {name}: not a boolean: {text!r}")
    if kind is int:
        try:
            return int(text)
        except ValueError as exc:
            raise InputError(f"config key {name}: not an integer: "
                             f"{text!r}") from exc
    return text.strip()


def load_config_file(path):
    """Parse a KEY=VALUE config file into a plain dict."""
    if not os.path.exists(path):
        raise InputError(f"config file not found: {path}")
    known = {f.name: f.type for f in fields(PipelineConfig)}
    types = {"int": int, "str": str, "bool": bool}
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise InputError(f"{path}:{lineno}: expected KEY=VALUE")
            key, value = text.split("=", 1)
            key = key.strip().lower()
            if key not in known:
                raise InputError(f"{path}:{lineno}: unknown key {key!r}")
            kind = known[key]
            if isinstance(kind, str):
                kind = types.get(kind, str)
            out[key] = _coerce(key, kind, value)
    return out


def merge_config(file_values, flag_values):
    """Layer defaults, file values, then explicit flags."""
    cfg = PipelineConfig()
    for key, value in file_values.items():
        setattr(cfg, key, value)
    for key, value in flag_values.items():
        if value is not None:
            setattr(cfg, key, value)
    return cfg.validate()


def parse_filter(spec):
    """LO:HI:P filter spec -> (lo, hi, p)."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError(f"filter must be LO:HI:P, got {spec!r}")
    try:
        lo, hi, p = (float(t) for t in parts)
    except ValueError as exc:
        raise InputError(f"filter must be numeric LO:HI:P, got "
                         f"{spec!r}") from exc
    if hi < lo:
        raise InputError("filter range is inverted")
    if not 0.0 <= p <= 1.0:
        raise InputError("filter saturation factor must lie in [0, 1]")
    return lo, hi, p


def _parse_order(spec):
    if spec == "chrono":
        return
    if spec.startswith("attribute:"):
        if spec.split(":", 1)[1] not in ("mean", "max", "min"):
            raise InputError(f"unknown attribute aggregate in {spec!r}")
        return
    if spec.startswith("wrap:"):
        try:
            int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise InputError(f"bad wrap amount in {spec!r}") from exc
        return
    raise InputError(f"unknown ordering {spec!r}")
