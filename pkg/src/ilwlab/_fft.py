"""FFT worker-count plumbing shared by every transform call."""

import os

_override: int | None = None


def workers() -> int:
    if _override is not None:
        return _override
    env = os.environ.get("ILWLAB_FFT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def set_workers(n: int | None) -> None:
    global _override
    _override = None if n is None else max(1, int(n))
