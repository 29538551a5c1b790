"""Builds the optional compiled kernels; the package works without them."""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("dhnn._ckernels", ["src/dhnn/_ckernels.pyx"],
                   include_dirs=[np.get_include()], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
