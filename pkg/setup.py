"""Build script for the optional compiled kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile downgrades to a pure-Python install
instead of aborting.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "lpflats._gridkern",
                ["src/lpflats/_gridkern.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
