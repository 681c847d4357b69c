import numpy as np
from setuptools import setup

# The compiled kernels are optional: the package falls back to the pure
# Python implementations in multirat._kernels._pure when the extension is
# absent, so a failed build must not block installation.
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "multirat._kernels._core",
                ["src/multirat/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
