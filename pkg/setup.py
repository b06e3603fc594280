import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "schedtrace._kernels._tree_cy",
                ["src/schedtrace/_kernels/_tree_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    # No Cython available: install the pure-Python kernel only.
    ext_modules = []

setup(ext_modules=ext_modules)
