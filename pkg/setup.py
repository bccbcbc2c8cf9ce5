"""Build script: compiles the optional Cython kernel.

The package works without the extension (a pure-Python kernel is selected at
import time), so any build failure here degrades to the slow path instead of
breaking the install.  Set CRITORBIT_NO_EXT=1 to skip the extension build.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CRITORBIT_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("critorbit._kernel", ["src/critorbit/_kernel.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
