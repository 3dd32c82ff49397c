import os

from setuptools import setup

ext_modules = []
if os.environ.get("TWAKRAUS_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "twakraus._core",
                    ["src/twakraus/_core.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3", "-fcx-limited-range"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # no Cython/numpy at build time: the pure-Python fallback is used
        ext_modules = []

setup(ext_modules=ext_modules)
