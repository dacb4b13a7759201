"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure Python fallback is
selected at import time), so a failed compile only costs speed. Set
FLASHFLEET_SKIP_EXT=1 to skip the build entirely.
"""

import os

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("FLASHFLEET_SKIP_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "flashfleet._kernels",
        ["src/flashfleet/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=_extensions())
