import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sim2realbench.imgcore._native",
                ["src/sim2realbench/imgcore/_native.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
except ImportError:
    # No Cython: the pure-numpy fallback in imgcore.filters is used instead.
    ext_modules = []

setup(ext_modules=ext_modules)
