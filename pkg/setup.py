import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off keeps the compiled kernel bitwise-identical to the
# pure-Python fallback (no FMA contraction of the mirrored arithmetic).
ext = Extension(
    "twomode._core",
    ["src/twomode/_core.pyx"],
    include_dirs=[numpy.get_include()],
    extra_compile_args=["-O2", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], language_level=3))
