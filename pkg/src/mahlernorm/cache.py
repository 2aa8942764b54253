"""Append-only JSON-lines result cache.

Each line is ``{"key", "op", "value", "timestamp"}`` where the key is a
SHA-256 of the operation name, its inputs, the precision and the package
version, and ``value`` is the serialized result string exactly as it was
first emitted.  A hit therefore reproduces the original output byte for
byte.  Later lines win if a key was ever written twice.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from typing import Dict, Optional

from . import __version__

CACHE_FILE = "results.jsonl"


def cache_key(op: str, inputs, prec: int, version: str = __version__) -> str:
    blob = json.dumps({"op": op, "inputs": inputs, "prec": prec, "version": version},
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class ResultCache:
    def __init__(self, directory):
        self.directory = str(directory)
        os.makedirs(self.directory, exist_ok=True)
        self.path = os.path.join(self.directory, CACHE_FILE)
        self._lock = threading.Lock()
        self._index: Dict[str, str] = {}
        self._load()

    def _load(self) -> None:
        if not os.path.exists(self.path):
            return
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    # a torn final line from an interrupted run
                    continue
                self._index[rec["key"]] = rec["value"]

    def __len__(self) -> int:
        return len(self._index)

    def get(self, key: str) -> Optional[str]:
        return self._index.get(key)

    def put(self, key: str, op: str, value: str) -> None:
        with self._lock:
            if self._index.get(key) == value:
                return
            rec = {"key": key, "op": op, "value": value, "timestamp": time.time()}
            with open(self.path, "a") as fh:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
            self._index[key] = value
