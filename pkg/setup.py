"""Build script: compiles the optional Cython kernel extension.

The extension is optional. If Cython or a C compiler is unavailable the
package installs pure-Python and the numpy reference kernels are used at
import time instead.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "ratlab.nncore.kernels._ckernels",
                ["src/ratlab/nncore/kernels/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
