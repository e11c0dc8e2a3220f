import pytest

import workers


@pytest.fixture(autouse=True)
def single_process(monkeypatch):
    # sweeps run in-process so monkeypatched functions are seen
    monkeypatch.setenv(workers.THREADS_ENV, "1")
