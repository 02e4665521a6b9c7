"""Build script: compiles the optional TER kernel extension.

The extension is a pure speed-up; if Cython or a C compiler is missing the
package installs anyway and falls back to the pure-Python kernels at import.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mtqe._ter_kernels",
                ["src/mtqe/_ter_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
