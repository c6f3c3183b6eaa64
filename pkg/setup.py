import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

openmp = [] if os.environ.get("RIPPLE_NO_OPENMP") else ["-fopenmp"]

extensions = [
    Extension(
        "ripple._kernels",
        ["src/ripple/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"] + openmp,
        extra_link_args=openmp,
        # a failed compile leaves the numpy fallback in place
        optional=True,
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": 3}))
