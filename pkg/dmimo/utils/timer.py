import time

from loguru import logger


class Timer:
    """Wall-clock stopwatch, usable as a context manager."""

    def __init__(self):
        self.start_time = None
        self.end_time = None
        self.note = None

    def start(self, note: str = ""):
        self.start_time = time.perf_counter()
        self.end_time = None
        self.note = note
        return self

    def end(self) -> float:
        """Stop and return the elapsed seconds."""
        if self.start_time is None:
            raise ValueError("call start() before end()")
        self.end_time = time.perf_counter()
        duration = self.end_time - self.start_time
        if self.note:
            logger.trace(f"{self.note}: {duration:.4f} s")
        return duration

    @property
    def elapsed(self) -> float:
        if self.start_time is None:
            return 0.0
        stop = self.end_time if self.end_time is not None else time.perf_counter()
        return stop - self.start_time

    def __enter__(self):
        return self.start(self.note or "")

    def __exit__(self, exc_type, exc, tb):
        self.end()
        return False
