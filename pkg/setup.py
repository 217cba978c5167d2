"""Build the optional Cython kernels; the package falls back to pure Python without them."""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("STATCONV_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("statconv._ckernels", ["src/statconv/_ckernels.pyx"], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
        )

setup(ext_modules=ext_modules)
