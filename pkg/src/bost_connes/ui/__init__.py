"""
Command-line components: the dr console script, run configuration and the disk cache
"""

from .app import main as run_app
from .config import RunConfig, resolve_config

__all__ = [
    "RunConfig",
    "resolve_config",
    "run_app",
]
