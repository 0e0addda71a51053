from setuptools import Extension, setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        [Extension("motirr._kernels", ["src/motirr/_kernels.pyx"])],
        language_level="3",
    )
)
