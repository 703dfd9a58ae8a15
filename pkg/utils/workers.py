"""
utils/workers.py
功能：CPU 密集任务的进程池分发。结果按任务顺序返回；进程池不可用时退回单进程。
fn 必须是模块级函数，参数可 pickle。
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from typing import Any, Callable, List, Sequence

logger = logging.getLogger(__name__)


def run_jobs(fn: Callable[..., Any], jobs: Sequence[tuple], max_workers: int) -> List[Any]:
    if max_workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    try:
        with ProcessPoolExecutor(max_workers=min(max_workers, len(jobs))) as executor:
            futures = [executor.submit(fn, *job) for job in jobs]
            return [future.result() for future in futures]
    except (OSError, BrokenProcessPool) as e:
        logger.warning(f"⚠️ 进程池不可用 ({e})，改为单进程执行")
        return [fn(*job) for job in jobs]
