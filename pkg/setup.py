import os

import numpy as np
from setuptools import setup

ext_modules = []
if os.environ.get("AIRYKIT_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("airykit._core", ["src/airykit/_core.pyx"],
                       include_dirs=[np.get_include()])],
            language_level=3,
        )
    except ImportError:
        # no Cython: the package falls back to the numpy implementations
        ext_modules = []

setup(ext_modules=ext_modules)
