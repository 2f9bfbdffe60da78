"""Build script: compiles the optional Cython kernel extensions.

The kernels accelerate the two hot loops (embedding training and the
multi-pattern mention scan). If the toolchain is unavailable the build
degrades to the pure-Python fallbacks in ripwire._kernels.pure; the
package selects the backend at import time.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "ripwire._kernels._sgns",
                ["src/ripwire/_kernels/_sgns.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffast-math"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            ),
            Extension(
                "ripwire._kernels._match",
                ["src/ripwire/_kernels/_match.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            ),
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
