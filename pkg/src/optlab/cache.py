"""On-disk report cache keyed by theory content and the requested check.

Entries are written to a temporary file in the cache directory and moved into
place with ``os.replace``, so concurrent processes never observe a partial
file.  I/O failures raise :class:`CacheError`.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Optional

ENV_VAR = "OPTLAB_CACHE_DIR"


class CacheError(OSError):
    pass


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "optlab"


def cache_key(theory_hash: str, prop: str, options: Optional[dict] = None) -> str:
    doc = {"theory": theory_hash, "property": prop, "options": options or {}}
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class ReportCache:
    def __init__(self, directory=None):
        self.dir = Path(directory) if directory is not None else default_cache_dir()

    def path(self, key: str) -> Path:
        return self.dir / f"{key}.json"

    def load(self, key: str, theory_hash: str) -> Optional[str]:
        """Cached report text, or None on a miss or a stale entry."""
        p = self.path(key)
        try:
            text = p.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None
        except OSError as exc:
            raise CacheError(f"cannot read cache entry {p}: {exc}") from exc
        try:
            stored = json.loads(text)["theory"]["hash"]
        except (ValueError, KeyError, TypeError):
            return None
        if stored != theory_hash:
            return None
        return text

    def store(self, key: str, text: str) -> Path:
        p = self.path(key)
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".json", dir=self.dir)
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    fh.write(text)
                os.replace(tmp, p)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        except OSError as exc:
            raise CacheError(f"cannot write cache entry {p}: {exc}") from exc
        return p
