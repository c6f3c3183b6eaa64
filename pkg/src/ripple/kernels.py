"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. Set ``RIPPLE_PURE=1`` to force the fallback and
``RIPPLE_THREADS`` to cap the number of threads used by batched kernels
and by the FFT.
"""
import logging
import os

from . import _fallback

log = logging.getLogger(__name__)

compiled = None
if os.environ.get("RIPPLE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        log.debug("compiled kernels unavailable, using numpy fallback")

BACKEND = "compiled" if compiled is not None else "python"
_impl = compiled if compiled is not None else _fallback

# largest N for which the compiled direct sum beats the padded FFT,
# for a single vector and for batches (see benchmarks/bench_kernels.py)
DIRECT_MAX_N = 64
DIRECT_MAX_N_BATCH = 12


def threads():
    try:
        n = int(os.environ.get("RIPPLE_THREADS", "1"))
    except ValueError:
        return 1
    return max(1, n)


def conv_direct(a, b):
    return _impl.conv_direct(a, b, threads())


def weighted_sq_sum(c, power):
    return _impl.weighted_sq_sum(c, power)
