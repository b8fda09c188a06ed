"""Build script: compiles the optional Cython core.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any failure here degrades to a pure-Python
install instead of aborting.
"""

import sys

from setuptools import Extension, setup


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [Extension("silt._core", ["src/silt/_core.pyx"])],
        compiler_directives={"language_level": "3"},
    )


try:
    setup(ext_modules=_extensions())
except SystemExit:
    raise
except Exception as exc:  # missing compiler, broken toolchain, ...
    print(f"warning: extension build failed ({exc}); installing pure-Python fallback",
          file=sys.stderr)
    setup(ext_modules=[])
