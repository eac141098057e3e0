"""Build script: compiles the clustering distance/MST kernel when Cython is
available.  The package works without it (a pure-Python kernel is selected at
import time), so the extension is marked optional."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("STYLOSPACE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "stylospace.cluster._mstcore",
                    ["src/stylospace/cluster/_mstcore.pyx"],
                    optional=True,
                )
            ],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
