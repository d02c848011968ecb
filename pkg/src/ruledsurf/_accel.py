"""Numba toggle.

Set ``RULED_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when numba
is importable. The numba variants are still compiled lazily on first call, so
benchmarks can compare both paths in one process.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional accelerator
    numba = None

_FLAG = os.environ.get("RULED_DISABLE_NUMBA", "").strip().lower()

NUMBA_AVAILABLE = numba is not None
NUMBA_ENABLED = NUMBA_AVAILABLE and _FLAG not in {"1", "true", "yes", "on"}


def njit(fn):
    """Compile ``fn`` with numba when available, else return it unchanged."""
    if numba is None:
        return fn
    return numba.njit(cache=True)(fn)


def num_workers(default=1):
    raw = os.environ.get("RULED_NUM_WORKERS", "").strip()
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        return default
    return max(1, n)
