"""Build script for the optional compiled OMP kernel.

The package works without the extension: ecdl.omp falls back to the
numpy kernel when ecdl._omp_cy is missing (or ECDL_PURE_PYTHON is set).
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the Cython kernel if possible; never fail the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or toolchain missing
            print(f"warning: skipping compiled OMP kernel ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc})")


ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "ecdl._omp_cy",
                ["src/ecdl/_omp_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError as exc:
    print(f"warning: Cython/numpy unavailable, compiled kernel disabled ({exc})")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
