"""Build shim: compiles the optional Cython kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so build failures here should not block installation from
source on exotic platforms; remove the ext_modules line to skip.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "footlens._kernels._core",
        ["src/footlens/_kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level="3"))
