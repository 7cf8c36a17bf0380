from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "hardy_rellich._ckernel",
    ["src/hardy_rellich/_ckernel.pyx"],
    libraries=["mpfr", "gmp"],
    extra_compile_args=["-O2"],
    optional=True,
)

setup(ext_modules=cythonize([ext], language_level=3))
