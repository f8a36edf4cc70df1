"""
JSON disk cache of DR monoids and ray class group summaries.

Artifacts live at <cache_dir>/<field tag>/<a>_<c>_<d>.json, keyed by the
conductor's HNF. A reload re-runs the triple-agreement check and compares
the cached table with a fresh build before the monoid seeds the level tower.
"""

import json
import logging
import os
import re
from typing import Optional, Tuple

from ..classgroups.rayclass import strict_ray_class_group
from ..core.checks import Report, check
from ..core.drmonoid import DRMonoid, dr_level, triple_agreement
from ..core.tower import get_tower
from ..nfield.fields import NumberField
from ..nfield.ideals import IntegralIdeal

logger = logging.getLogger(__name__)

# Bumped whenever the stored layout changes
CACHE_VERSION = 1


def _field_dir(cache_dir: str, K: NumberField) -> str:
    return os.path.join(cache_dir, re.sub(r"[^A-Za-z0-9_-]+", "_", K.tag).strip("_"))


def cache_path(cache_dir: str, K: NumberField, f: IntegralIdeal) -> str:
    return os.path.join(_field_dir(cache_dir, K), "_".join(str(v) for v in f.key) + ".json")


def save_level(cache_dir: str, M: DRMonoid) -> str:
    """Write M and its unit group summary; returns the file path."""
    path = cache_path(cache_dir, M.field, M.level)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    payload = {
        "version": CACHE_VERSION,
        "monoid": M.to_dict(),
        "ray_class_group": strict_ray_class_group(M.field, M.level).to_dict(),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    logger.info("cached %s at %s", M, path)
    return path


def load_level(cache_dir: str, K: NumberField, f: IntegralIdeal) -> Optional[Tuple[DRMonoid, Report]]:
    """The cached DR_f with its reload report, or None when nothing is cached."""
    path = cache_path(cache_dir, K, f)
    if not os.path.exists(path):
        logger.debug("cache miss %s", path)
        return None
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("version") != CACHE_VERSION:
        logger.warning("ignoring %s: cache version %s", path, payload.get("version"))
        return None
    M = DRMonoid.from_dict(K, payload["monoid"])

    report = Report(f"cache reload {K.tag} f={f}")
    report.add(check("cli.cache.conductor", M.level == f,
                     f"stored conductor {M.level.key} for requested {f.key}"))
    report.extend(triple_agreement(K, f))
    fresh = dr_level(K, f)
    bad = None
    if M.size != fresh.size:
        bad = {"cached": M.size, "fresh": fresh.size}
    else:
        to_fresh = {x.index: fresh.index_of_key(x.key) for x in M.elements}
        for i in range(M.size):
            for j in range(M.size):
                if to_fresh[M.mul(i, j)] != fresh.mul(to_fresh[i], to_fresh[j]):
                    bad = {"i": i, "j": j}
                    break
            if bad:
                break
    report.add(check("cli.cache.table", bad is None,
                     "cached multiplication table matches a fresh build", witness=bad))
    if report.passed:
        get_tower(K).put("dr", f, M)
    return M, report


__all__ = [
    "CACHE_VERSION",
    "cache_path",
    "load_level",
    "save_level",
]
