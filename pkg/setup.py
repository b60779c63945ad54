"""Build script: compiles the optional scan kernel, falls back to pure Python.

The package is fully functional without the extension; `fockdual._scan`
selects the compiled kernel at import time when present.
"""

import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    if os.environ.get("FOCKDUAL_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "fockdual._fastscan",
        ["src/fockdual/_fastscan.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )


class optional_build_ext(build_ext):
    """Skip the extension instead of failing the install when a toolchain is missing."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"fockdual: skipping compiled kernel ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"fockdual: skipping {ext.name} ({exc})", file=sys.stderr)


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
