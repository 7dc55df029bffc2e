"""General utilities shared by the harness and the CLI."""

from __future__ import annotations

import asyncio
import math
from typing import Any, Callable, List, Sequence, TypeVar

T = TypeVar("T")

FLOAT_FORMAT = "%.17g"


def ensure_event_loop() -> asyncio.AbstractEventLoop:
    try:
        loop = asyncio.get_event_loop()
        if loop.is_closed():
            raise RuntimeError
    except RuntimeError:
        loop = asyncio.new_event_loop()
        asyncio.set_event_loop(loop)
    return loop


async def gather_with_concurrency(limit: int, *tasks: Any) -> Any:
    """Wrapper around :func:`asyncio.gather` enforcing concurrency limits."""

    semaphore = asyncio.Semaphore(max(1, int(limit)))

    async def sem_task(task):
        async with semaphore:
            return await task

    return await asyncio.gather(*(sem_task(t) for t in tasks))


def run_parallel(calls: Sequence[Callable[[], T]], *, limit: int = 1) -> List[T]:
    """Run blocking callables in worker threads; results keep submission order."""

    if not calls:
        return []
    if limit <= 1:
        return [call() for call in calls]

    async def runner() -> List[T]:
        return await gather_with_concurrency(limit, *(asyncio.to_thread(call) for call in calls))

    loop = ensure_event_loop()
    return list(loop.run_until_complete(runner()))


def format_float(value: float) -> str:
    """Shortest text that reads back as the same double (``inf``/``nan`` included)."""

    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def finite_or_none(value: float) -> Any:
    """JSON-friendly float: non-finite numbers become ``None``."""

    value = float(value)
    return value if math.isfinite(value) else None


__all__ = [
    "FLOAT_FORMAT",
    "ensure_event_loop",
    "finite_or_none",
    "format_float",
    "gather_with_concurrency",
    "run_parallel",
]
