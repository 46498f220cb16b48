from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("rcbir._ckernels", ["src/rcbir/_ckernels.pyx"])],
        language_level=3,
    )
except ImportError:
    # no Cython at build time: install without the native kernels,
    # rcbir.kernels falls back to the numpy implementation
    ext_modules = []

setup(ext_modules=ext_modules)
