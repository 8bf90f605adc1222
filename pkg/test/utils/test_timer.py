import pytest

from dmimo.utils import Timer


class TestTimer:

    def test_start_end(self):
        timer = Timer().start("block")
        sum(range(1000))
        elapsed = timer.end()
        assert elapsed >= 0.0
        assert timer.elapsed == elapsed

    def test_context_manager(self):
        with Timer() as timer:
            sum(range(1000))
        assert timer.end_time is not None
        assert timer.elapsed >= 0.0

    def test_end_before_start(self):
        with pytest.raises(ValueError):
            Timer().end()

    def test_elapsed_before_start(self):
        assert Timer().elapsed == 0.0
