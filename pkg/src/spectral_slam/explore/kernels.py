"""Kernel backend selection: compiled extension when built, pure Python
otherwise. Both produce bit-identical outputs (see tests/test_kernels.py).
"""

try:
    from spectral_slam.explore import _gridkernels as _impl
    KERNEL_BACKEND = "cython"
except ImportError:
    from spectral_slam.explore import _kernels_py as _impl
    KERNEL_BACKEND = "python"

cast_rays = _impl.cast_rays
dijkstra_field = _impl.dijkstra_field
