"""Build the optional compiled solver; the package falls back to numpy without it."""

import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("EVACSIM_NO_EXT") != "1":
    ext_modules = cythonize(
        [
            Extension(
                "evacsim._solver",
                ["src/evacsim/_solver.pyx"],
                include_dirs=[np.get_include()],
                # No FMA contraction and no fast-math: results must match the
                # pure-Python fallback bit for bit.
                extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
