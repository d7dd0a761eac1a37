"""Build script: compiles the grid-kernel extension when Cython is available.

The package works without the extension (a pure-Python fallback is selected
at import time); the build therefore tolerates a missing compiler or Cython.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/spectral_slam/explore/_gridkernels.pyx",
        language_level=3,
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
except ImportError:
    pass

setup(ext_modules=ext_modules)
