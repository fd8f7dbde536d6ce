"""Build script: compiles the optional eigensolver extension when possible.

The package is fully functional without the extension (a numpy-backed
fallback is selected at import time), so any failure to build it is
downgraded to a warning.  Set EMOGAIT_PURE_PYTHON=1 to skip the build
explicitly.
"""

import os
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


def _extensions():
    if os.environ.get("EMOGAIT_PURE_PYTHON") == "1":
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        warnings.warn(f"skipping compiled eigensolver ({exc})")
        return []
    ext = Extension(
        "emogait._eigql",
        ["src/emogait/_eigql.pyx"],
        include_dirs=[numpy.get_include()],
    )
    return cythonize([ext], language_level="3")


class optional_build_ext(build_ext):
    """Treat extension build failures as non-fatal."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            warnings.warn(f"compiled eigensolver not built: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled eigensolver not built: {exc}")


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
