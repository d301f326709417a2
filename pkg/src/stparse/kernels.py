"""Numeric kernel backend, chosen at import time.

The compiled extension ``stparse._ckernels`` is used when it is importable
and ``STPARSE_PURE_PYTHON`` is unset or empty; otherwise the numpy
fallback in ``stparse._pykernels`` is used.  Both expose the same
functions.
"""

import os

from . import _pykernels

if os.environ.get("STPARSE_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

viterbi = _impl.viterbi
forward_backward = _impl.forward_backward
log_partition = _impl.log_partition
sgd_epoch = _impl.sgd_epoch
data_loss = _pykernels.data_loss

LOSS_LOGISTIC = _pykernels.LOSS_LOGISTIC
LOSS_SQUARED_HINGE = _pykernels.LOSS_SQUARED_HINGE
REG_L2 = _pykernels.REG_L2
REG_L1 = _pykernels.REG_L1


def available_backends():
    """Map of backend name -> module for every importable backend."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
