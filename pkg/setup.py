"""Build script: compiles the optional Cython advection kernel.

If Cython or a C compiler is unavailable the package still installs;
`ecsldg.kernels` falls back to the numpy implementation at import time.
"""
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "ecsldg._ext",
                sources=["src/ecsldg/_ext.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(f"ecsldg: building without compiled kernel ({exc})\n")

setup(ext_modules=ext_modules)
