"""
Per-field memo of DR levels, Y levels and other per-conductor artifacts.

One LevelTower exists per number field in a module-level registry. Builders
stay pure; the tower only decides whether to call them. The disk cache seeds
towers through `put`.
"""

import logging
from typing import Any, Callable, Dict, List, Tuple

from ..nfield.fields import NumberField
from ..nfield.ideals import IntegralIdeal
from ..nfield.types import HNFKey

logger = logging.getLogger(__name__)


class LevelTower:
    """Memo of artifacts keyed by (kind, conductor HNF key, extra)."""

    def __init__(self, field: NumberField):
        self.field = field
        self._memo: Dict[Tuple[str, HNFKey, Any], Any] = {}
        self.hits = 0
        self.misses = 0

    def get(self, kind: str, level: IntegralIdeal, factory: Callable[[], Any], extra: Any = None) -> Any:
        key = (kind, level.key, extra)
        if key in self._memo:
            self.hits += 1
            return self._memo[key]
        self.misses += 1
        logger.debug("tower %s: building %s at %s", self.field.tag, kind, level)
        value = factory()
        self._memo[key] = value
        return value

    def put(self, kind: str, level: IntegralIdeal, value: Any, extra: Any = None) -> None:
        self._memo[(kind, level.key, extra)] = value

    def has(self, kind: str, level: IntegralIdeal, extra: Any = None) -> bool:
        return (kind, level.key, extra) in self._memo

    def levels(self, kind: str) -> List[HNFKey]:
        return sorted({k[1] for k in self._memo if k[0] == kind}, key=lambda t: (t[0] * t[2], t))

    def clear(self) -> None:
        self._memo.clear()


# Module-level registry
_TOWERS: Dict[NumberField, LevelTower] = {}


def get_tower(K: NumberField) -> LevelTower:
    if K not in _TOWERS:
        _TOWERS[K] = LevelTower(K)
    return _TOWERS[K]


def clear_towers() -> None:
    _TOWERS.clear()
