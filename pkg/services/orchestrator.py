import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List

from celery import group

from .bounds import evaluate_bounds_chunk, summarize_chunks
from .config import CELERY_CONFIG, SAMPLING_CONFIG
from .errors import ParamOutOfRange
from .models import SamplerSpec

logger = logging.getLogger(__name__)


class BoundsScanOrchestrator:
    """Split a bound-containment scan into index chunks and fan them out."""

    def __init__(
        self,
        sampler: str,
        seed: int,
        samples: int,
        chunk_size: int = None,
        workers: int = 1,
        failure_threshold: float = 1e-6,
        hierarchy_tolerance: float = 1e-9,
        distributed: bool = False,
    ):
        if samples < 1:
            raise ParamOutOfRange(f"samples must be at least 1, got {samples}")
        if workers < 1:
            raise ParamOutOfRange(f"workers must be at least 1, got {workers}")
        chunk_size = SAMPLING_CONFIG['CHUNK_SIZE'] if chunk_size is None else chunk_size
        if chunk_size < 1:
            raise ParamOutOfRange(f"chunk size must be at least 1, got {chunk_size}")
        # Validates the sampler name and seed before any work is queued.
        SamplerSpec.from_name(sampler, seed)

        self.sampler = sampler
        self.seed = seed
        self.samples = samples
        self.chunk_size = chunk_size
        self.workers = workers
        self.failure_threshold = failure_threshold
        self.hierarchy_tolerance = hierarchy_tolerance
        self.distributed = distributed and not CELERY_CONFIG['task_always_eager']

    def chunks(self) -> List[dict]:
        return [
            {
                'sampler': self.sampler,
                'seed': self.seed,
                'start': start,
                'stop': min(start + self.chunk_size, self.samples),
                'failure_threshold': self.failure_threshold,
                'hierarchy_tolerance': self.hierarchy_tolerance,
            }
            for start in range(0, self.samples, self.chunk_size)
        ]

    def run(self) -> Dict:
        """Evaluate every chunk and merge the results in index order"""
        chunks = self.chunks()
        logger.info(
            "scanning %d %s states (seed %d) in %d chunks",
            self.samples, self.sampler, self.seed, len(chunks),
        )

        if self.distributed:
            workflow = group(evaluate_bounds_chunk.s(chunk) for chunk in chunks)
            results = workflow.apply_async().get()
        elif self.workers == 1:
            results = [evaluate_bounds_chunk.apply(args=[chunk]).get() for chunk in chunks]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                results = list(executor.map(lambda chunk: evaluate_bounds_chunk.apply(args=[chunk]).get(), chunks))

        summary = summarize_chunks(results, self.failure_threshold)
        summary.update({'sampler': self.sampler, 'seed': self.seed, 'chunks': len(chunks)})
        return summary
