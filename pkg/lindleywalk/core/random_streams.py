import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Tuple, TypeVar

import numpy as np

from lindleywalk.core.common import StreamPurpose

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

RngStream = np.random.Generator


# Stream of block k for one purpose. Depends only on (master_seed, purpose, k), never on the worker
def block_stream(master_seed: int, purpose: StreamPurpose, block_index: int) -> RngStream:
    seed_sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(purpose.value, block_index))
    return np.random.Generator(np.random.PCG64(seed_sequence))


def single_stream(seed: int) -> RngStream:
    return block_stream(seed, StreamPurpose.SINGLE_PATH, 0)


# Splits paths into (block_index, count) pairs of at most block_size paths
def block_layout(paths: int, block_size: int) -> List[Tuple[int, int]]:
    if block_size < 1:
        raise ValueError("block_size must be positive, got " + str(block_size))
    layout = []
    start = 0
    block_index = 0
    while start < paths:
        count = min(block_size, paths - start)
        layout.append((block_index, count))
        start += count
        block_index += 1
    return layout


# Runs fn over tasks, in task order. fn and tasks must be picklable when workers > 1
def map_blocks(fn: Callable[[T], R], tasks: List[T], workers: int) -> List[R]:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    logger.debug("Mapping %d blocks over %d workers", len(tasks), workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, tasks))


# A fresh 64-bit master seed for the index-th independent sub-experiment of a run
def derived_seed(master_seed: int, purpose: StreamPurpose, index: int) -> int:
    seed_sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(purpose.value, index))
    return int(seed_sequence.generate_state(1, np.uint64)[0])
