"""Build script: compiles the optional Cython sweep kernel.

The package is fully functional without the extension (a pure-numpy
fallback is selected at import time); the extension is what makes
full-resolution propagation runs fast.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mbx4.kernels._csweep",
                ["src/mbx4/kernels/_csweep.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-fopenmp", "-fcx-limited-range", "-march=native", "-funroll-loops"],
                extra_link_args=["-fopenmp"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
