import pytest

import workers
from errors import ConfigError


def test_thread_count_from_environment(monkeypatch):
    monkeypatch.setenv(workers.THREADS_ENV, "3")
    assert workers.thread_count() == 3


@pytest.mark.parametrize("value", ["x", "0", "-2"])
def test_thread_count_rejects_bad_values(monkeypatch, value):
    monkeypatch.setenv(workers.THREADS_ENV, value)
    with pytest.raises(ConfigError):
        workers.thread_count()


def test_thread_count_defaults_to_cores(monkeypatch):
    monkeypatch.delenv(workers.THREADS_ENV, raising=False)
    assert workers.thread_count() >= 1


def test_parallel_map_keeps_order(monkeypatch):
    items = [-3, 1, -4, 1, -5, 9]
    assert workers.parallel_map(abs, items) == [3, 1, 4, 1, 5, 9]
    monkeypatch.setenv(workers.THREADS_ENV, "2")
    assert workers.parallel_map(abs, items) == [3, 1, 4, 1, 5, 9]
