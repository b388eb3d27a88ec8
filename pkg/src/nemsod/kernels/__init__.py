"""Kernel dispatch: numba when available and enabled, numpy otherwise."""

from .._accel import USE_NUMBA
from . import _numpy

if USE_NUMBA:
    from . import _numba as _impl
else:
    _impl = _numpy

edt_sq = _impl.edt_sq
conv2d = _impl.conv2d
threshold_hist = _impl.threshold_hist

__all__ = ["edt_sq", "conv2d", "threshold_hist", "USE_NUMBA"]
