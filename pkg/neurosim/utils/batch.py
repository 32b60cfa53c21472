import asyncio
import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import Any, TypeVar

from neurosim.settings import settings

_logger = logging.getLogger(__name__)

T = TypeVar('T')


async def _gather(fn: Callable[[Any], T], jobs: Sequence[Any], workers: int) -> list[T]:
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        tasks = [loop.run_in_executor(pool, fn, job) for job in jobs]
        # gather 按提交顺序返回，和完成顺序无关
        return list(await asyncio.gather(*tasks))


def run_batch(fn: Callable[[Any], T], jobs: Sequence[Any], threads: int | None = None) -> list[T]:
    """
    并行跑一批互相独立的任务
    :param fn: 模块顶层函数（要能被 pickle）
    :param jobs: 每个任务的参数
    :param threads: 并行上限，None 时取 NEUROSIM_THREADS，0 表示 CPU 核数
    :return: 按 jobs 顺序排列的结果
    """
    workers = min(settings.worker_count(threads), len(jobs))
    if workers <= 1:
        return [fn(job) for job in jobs]
    _logger.info('running %d jobs on %d workers', len(jobs), workers)
    return asyncio.run(_gather(fn, jobs, workers))
