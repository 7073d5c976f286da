import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "zenocav._kernels_cy",
                ["src/zenocav/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    # pure-Python fallback in _kernels_py is picked up at import time
    ext_modules = []

setup(ext_modules=ext_modules)
