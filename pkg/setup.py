"""Build script for the optional compiled simplex kernel.

The package is fully functional without the extension: ``steercert.lp``
falls back to a vectorized pure-Python kernel at import time.  A failed
compilation therefore only costs speed, never correctness, so build
errors are downgraded to warnings.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing entirely
            warnings.warn(f"compiled simplex kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled simplex kernel skipped ({ext.name}): {exc}")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "steercert.lp._pivot",
                sources=["src/steercert/lp/_pivot.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
