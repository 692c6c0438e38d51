#!/usr/bin/env python3
"""
Result Cache
Persists verdicts, tables and polynomials with joblib under operation-scoped hashed keys
"""

import hashlib
import json
import logging
import os
import tempfile
import threading
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

import joblib

from .config import TransverseConfig


@dataclass
class CacheEntry:
    key: Dict[str, Any]
    value: Any
    created_at: str = field(default_factory=lambda: datetime.now().isoformat())
    updated_at: str = field(default_factory=lambda: datetime.now().isoformat())


class ResultCache:
    """File-backed cache of engine results"""

    def __init__(self, cache_dir: Union[str, Path], config: Optional[TransverseConfig] = None):
        self.config = config or TransverseConfig()
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.logger = self._setup_logging()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def _setup_logging(self) -> logging.Logger:
        """Setup logging configuration"""
        logger = logging.getLogger(__name__)
        logger.setLevel(getattr(logging, self.config.LOG_LEVEL.upper()))

        if not logger.handlers:
            handler = logging.StreamHandler()
            handler.setFormatter(logging.Formatter(self.config.LOG_FORMAT))
            logger.addHandler(handler)

        return logger

    def make_key(self, operation: str, **parts: Any) -> Dict[str, Any]:
        """Key dictionary for an operation, always carrying the engine version"""
        key = {'operation': operation, 'engine_version': self.config.ENGINE_VERSION}
        key.update({name: value for name, value in parts.items() if value is not None})
        return key

    @staticmethod
    def digest(key: Dict[str, Any]) -> str:
        return hashlib.sha256(json.dumps(key, sort_keys=True, default=str).encode('utf-8')).hexdigest()

    def path_for(self, key: Dict[str, Any]) -> Path:
        return self.cache_dir / key['operation'] / f"{self.digest(key)}.joblib"

    def get(self, key: Dict[str, Any]) -> Optional[CacheEntry]:
        path = self.path_for(key)
        if not path.exists():
            self.misses += 1
            return None
        try:
            entry = joblib.load(path)
        except Exception as e:
            self.logger.warning(f"⚠️ Unreadable cache entry {path.name}: {e}")
            self.misses += 1
            return None
        if not isinstance(entry, CacheEntry) or entry.key != key:
            self.logger.warning(f"⚠️ Cache entry {path.name} does not match its key, ignoring")
            self.misses += 1
            return None
        self.hits += 1
        self.logger.debug(f"📊 Cache hit for {key['operation']} ({path.name[:12]})")
        return entry

    def put(self, key: Dict[str, Any], value: Any) -> Path:
        """Write an entry atomically: temporary file in the target directory, then rename"""
        path = self.path_for(key)
        with self._lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            previous = None
            if path.exists():
                try:
                    previous = joblib.load(path)
                except Exception:
                    previous = None
            entry = CacheEntry(key, value)
            if isinstance(previous, CacheEntry):
                entry.created_at = previous.created_at
            fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix='.tmp')
            os.close(fd)
            try:
                joblib.dump(entry, tmp_name)
                os.replace(tmp_name, path)
            finally:
                if os.path.exists(tmp_name):
                    os.remove(tmp_name)
        self.logger.debug(f"📊 Cached {key['operation']} result at {path}")
        return path

    def delete(self, key: Dict[str, Any]) -> bool:
        path = self.path_for(key)
        with self._lock:
            if path.exists():
                path.unlink()
                return True
        return False

    def stats(self) -> Dict[str, Any]:
        return {'cache_dir': str(self.cache_dir), 'hits': self.hits, 'misses': self.misses}
