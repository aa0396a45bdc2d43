"""Build script for the optional compiled quadrature kernel.

The package is pure Python except for the 4D interaction-quadrature inner
loop, which is also provided as a Cython extension.  If Cython or a C
compiler is unavailable the build silently skips the extension and the
package falls back to the NumPy kernel at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "nls1d._kernels._morawetz",
        ["src/nls1d/_kernels/_morawetz.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3", "-fopenmp"],
        extra_link_args=["-fopenmp"],
        optional=True,
    )
    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)
