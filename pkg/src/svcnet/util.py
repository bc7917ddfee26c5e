"""Seeding and worker-count helpers."""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def derive_seed(seed: int, label: str) -> int:
    """Independent 64-bit seed for a named pipeline stage."""
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def worker_count() -> int:
    """Worker cap from ``SVCNET_THREADS`` (unset or 0: one per CPU)."""
    raw = os.environ.get("SVCNET_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"SVCNET_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("SVCNET_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``list(map(fn, items))``, possibly threaded; result order never depends on scheduling."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
