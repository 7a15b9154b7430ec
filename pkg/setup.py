"""Build script for the optional compiled fixed-point kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile should not block installation.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "graphdep._kernels._fixed_point",
                ["src/graphdep/_kernels/_fixed_point.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
