"""
Run configuration: defaults, key=value files and command-line overrides.

Precedence is defaults < config file < flags. A config file holds one
`key = value` per line; `#` starts a comment and list values are comma
separated.
"""

import logging
from dataclasses import asdict, dataclass, fields
from dataclasses import field as dc_field
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)

# Output formats understood by every command
FORMATS = ("text", "json", "csv", "dot")


def get_default_config() -> Dict[str, Any]:
    """Return a dict of all run configuration parameters."""
    return {
        # Field and level
        "field": "Q",                 # 'Q' or a squarefree integer m
        "conductor": "1",             # integer n or HNF triple 'a,c,d'
        "bound": 10,                  # ideal-norm bound B

        # KMS and functoriality
        "betas": ["2"],
        "extensions": [-1],

        # Artifacts
        "cache_dir": ".dr_cache",
        "format": "text",
        "select": ["*"],

        # Verification grid
        "seed": 0,
        "max_conductor_norm": 12,
        "strict": False,
    }


@dataclass
class RunConfig:
    field: str = "Q"
    conductor: str = "1"
    bound: int = 10
    betas: List[str] = dc_field(default_factory=lambda: ["2"])
    extensions: List[int] = dc_field(default_factory=lambda: [-1])
    cache_dir: str = ".dr_cache"
    format: str = "text"
    select: List[str] = dc_field(default_factory=lambda: ["*"])
    seed: int = 0
    max_conductor_norm: int = 12
    strict: bool = False

    def __post_init__(self):
        if self.bound <= 0 or self.max_conductor_norm <= 0:
            raise ValueError(f"bounds must be positive (bound={self.bound}, "
                             f"max_conductor_norm={self.max_conductor_norm})")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ValueError(f"unknown configuration keys: {', '.join(unknown)}")
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _coerce(name: str, raw: str) -> Any:
    """Convert a config-file string to the type of the RunConfig field."""
    defaults = get_default_config()
    if name not in defaults:
        raise ValueError(f"unknown configuration key {name!r}")
    default = defaults[name]
    if isinstance(default, bool):
        lowered = raw.strip().lower()
        if lowered not in ("true", "false", "yes", "no", "1", "0"):
            raise ValueError(f"{name} expects a boolean, got {raw!r}")
        return lowered in ("true", "yes", "1")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, list):
        items = [item.strip() for item in raw.split(",") if item.strip()]
        if default and isinstance(default[0], int):
            return [int(item) for item in items]
        return items
    return raw.strip()


def load_config_file(path: str) -> Dict[str, Any]:
    """Parse `key = value` lines into typed values."""
    values: Dict[str, Any] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, raw = (part.strip() for part in line.split("=", 1))
            try:
                values[key] = _coerce(key, raw)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    logger.debug("loaded %d keys from %s", len(values), path)
    return values


def resolve_config(overrides: Optional[Dict[str, Any]] = None, path: Optional[str] = None) -> RunConfig:
    """Merge defaults, the optional file and non-None overrides."""
    merged = get_default_config()
    if path:
        merged.update(load_config_file(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    return RunConfig.from_dict(merged)


__all__ = [
    "FORMATS",
    "RunConfig",
    "get_default_config",
    "load_config_file",
    "resolve_config",
]
