"""Build the optional Cython kernel; the package falls back to pure Python without it."""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FINIKEY_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("finikey._ckernels", ["src/finikey/_ckernels.pyx"], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3", "cdivision": True, "boundscheck": False},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
