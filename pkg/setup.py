import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "randsplit._kernels._scalar_pdmp",
                ["src/randsplit/_kernels/_scalar_pdmp.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # pure-Python fallback in randsplit._kernels covers the missing extension
    extensions = []

setup(ext_modules=extensions)
