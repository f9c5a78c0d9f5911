"""chartlab: a desk-scale chart summarization laboratory.

Subpackages: chartgen (synthetic corpus), numcore (tensors/autodiff/optim),
model (image-conditioned decoder), train (fine-tuning loop), metrics
(from-scratch evaluation), cli (command-line entry point).
"""

# Single-threaded BLAS is the reproducibility reference for this package,
# and threaded kernels are slower at these matrix sizes anyway. The limiter
# object must stay referenced: dropping it would restore the old pool size.
import numpy as _np  # noqa: F401  (loads the BLAS runtime before limiting)

try:
    from threadpoolctl import threadpool_limits as _threadpool_limits

    _BLAS_SINGLE_THREAD = _threadpool_limits(limits=1)
except ImportError:  # pragma: no cover - fallback when threadpoolctl absent
    import os as _os

    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, "1")

__version__ = "0.1.0"
