"""Build script: compiles the optional multiset-kernel extension.

The package works without the extension (a pure-Python kernel is selected
at import time), so a failed compilation is downgraded to a warning.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/membranes/_mskernel.pyx"],
        language_level="3",
    )
except Exception as exc:  # Cython missing or cythonize failed
    print(f"warning: skipping compiled kernel ({exc}); "
          "the pure-Python kernel will be used", file=sys.stderr)

setup(ext_modules=ext_modules)
