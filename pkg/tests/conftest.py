import os

import pytest

from bridgelaw import kernel

WORKERS = min(4, os.cpu_count() or 1)

requires_compiled = pytest.mark.skipif(
    kernel.backend_name() != "compiled",
    reason="needs the compiled kernel (pure-Python fallback is too slow at this scale)",
)


@pytest.fixture(scope="session")
def workers() -> int:
    return WORKERS
